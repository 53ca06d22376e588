"""Loaders turning the shipped fixture pack into contract payloads."""

from __future__ import annotations

import json
from pathlib import Path

from medchain.contract.payload import payloads


def fig3_payloads(path: str | Path) -> list[dict]:
    rows = json.loads(Path(path).read_text())
    return [
        payloads.define_permission(r["perm_id"], r["name"], r["route"], r["action"]) for r in rows
    ]


def fig4_payloads(path: str | Path) -> list[dict]:
    """Role definitions, grants and view templates (no user assignments)."""
    doc = json.loads(Path(path).read_text())
    out: list[dict] = []
    for role in doc["roles"]:
        out.append(payloads.define_role(role["role_id"], role["name"]))
    for grant in doc["grants"]:
        out.append(payloads.grant_permission(grant["role_id"], grant["perm_id"]))
    for template in doc["templates"]:
        out.append(payloads.define_view_template(template["role_id"], template["fields"]))
    return out


def load_patient(path: str | Path) -> tuple[int, dict]:
    doc = json.loads(Path(path).read_text())
    return doc["intid"], doc["record"]
