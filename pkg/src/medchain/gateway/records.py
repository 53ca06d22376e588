"""Patient records and role-based view projection.

A record is a flat JSON file per patient id under the records directory.
``project_view`` filters a record down to a view template: the output holds
exactly the template's fields in template order, skipping fields the record
lacks. Nothing outside the template ever leaks.
"""

from __future__ import annotations

import json
from pathlib import Path
from threading import Lock

PATIENT_FIELDS = [
    "ID",
    "Age",
    "Gender",
    "Weight",
    "Smoker",
    "Children",
    "BMI",
    "Region",
    "Charges",
    "BodyPartExamined",
    "PhotometricInterpretation",
    "PixelSpacing",
    "PixelBandwidth",
    "AcquisitionDate",
    "Image",
]

_TOMBSTONES = "_deleted"


def project_view(record: dict, template: list[str]) -> dict:
    return {name: record[name] for name in template if name in record}


class RecordStore:
    """Per-patient JSON files; deletes are per-modality tombstones."""

    def __init__(self, records_dir: str | Path) -> None:
        self.dir = Path(records_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = Lock()

    def _path(self, intid: int) -> Path:
        return self.dir / f"{int(intid)}.json"

    def save(self, intid: int, record: dict) -> None:
        with self._lock:
            self._path(intid).write_text(json.dumps(record, indent=2))

    def load(self, intid: int) -> dict | None:
        path = self._path(intid)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def view(self, intid: int, template: list[str]) -> dict | None:
        record = self.load(intid)
        if record is None:
            return None
        return project_view(record, template)

    def mark_deleted(self, intid: int, modality: str) -> bool:
        """Tombstone one image modality; False if the patient is unknown."""
        with self._lock:
            record = self.load(intid)
            if record is None:
                return False
            tombstones = set(record.get(_TOMBSTONES, []))
            tombstones.add(modality)
            record[_TOMBSTONES] = sorted(tombstones)
            self._path(intid).write_text(json.dumps(record, indent=2))
            return True

    def deleted_modalities(self, intid: int) -> list[str]:
        record = self.load(intid)
        if record is None:
            return []
        return list(record.get(_TOMBSTONES, []))
