from medchain.gateway.records import PATIENT_FIELDS, RecordStore, project_view
from medchain.gateway.app import create_app

__all__ = ["PATIENT_FIELDS", "RecordStore", "project_view", "create_app"]
