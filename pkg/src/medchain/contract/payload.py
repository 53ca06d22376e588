"""Transaction payload variants and their wire schema.

A payload is a JSON object with a ``type`` tag plus variant fields; exactly
one variant per transaction. ``validate_payload`` enforces the schema the
contract expects before a transaction is admitted or applied.
"""

from __future__ import annotations

from typing import Any

from medchain.encoding import is_address_hex

ACTIONS = ("View", "Edit", "Delete")

INTID = "<intid>"


class MalformedPayload(ValueError):
    pass


def validate_route_pattern(text: Any) -> list[str]:
    """Validate a route pattern and return its inner segments."""
    if not isinstance(text, str) or not text.startswith("/") or not text.endswith("/") or len(text) < 2:
        raise MalformedPayload(f"route must begin and end with '/': {text!r}")
    segments = text.split("/")[1:-1]
    if not segments:
        raise MalformedPayload(f"route has no segments: {text!r}")
    for seg in segments:
        if seg == INTID:
            continue
        if not seg or "<" in seg or ">" in seg:
            raise MalformedPayload(f"route segment must be a literal or {INTID}: {seg!r}")
    return segments


_SCHEMAS: dict[str, dict[str, str]] = {
    "AddDelegate": {"addr": "address"},
    "RemoveDelegate": {"addr": "address"},
    "DefinePermission": {"perm_id": "id", "name": "name", "route": "route", "action": "action"},
    "DefineRole": {"role_id": "id", "name": "name"},
    "GrantPermissionToRole": {"role_id": "id", "perm_id": "id"},
    "RevokePermissionFromRole": {"role_id": "id", "perm_id": "id"},
    "AssignRole": {"user": "address", "role_id": "id"},
    "RevokeRole": {"user": "address", "role_id": "id"},
    "DefineViewTemplate": {"role_id": "id", "fields": "fields"},
}

PAYLOAD_TYPES = tuple(_SCHEMAS)


def _check(kind: str, name: str, value: Any) -> None:
    if kind == "address":
        if not is_address_hex(value):
            raise MalformedPayload(f"{name} must be a 40-char hex address")
    elif kind == "id":
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise MalformedPayload(f"{name} must be a positive integer")
    elif kind == "name":
        if not isinstance(value, str) or not value:
            raise MalformedPayload(f"{name} must be a non-empty string")
    elif kind == "route":
        validate_route_pattern(value)
    elif kind == "action":
        if value not in ACTIONS:
            raise MalformedPayload(f"{name} must be one of {ACTIONS}")
    elif kind == "fields":
        if not isinstance(value, list) or any(not isinstance(f, str) or not f for f in value):
            raise MalformedPayload(f"{name} must be a list of non-empty strings")


def validate_payload(payload: Any) -> str:
    """Validate against the variant schema; returns the payload type."""
    if not isinstance(payload, dict):
        raise MalformedPayload("payload must be an object")
    ptype = payload.get("type")
    if ptype not in _SCHEMAS:
        raise MalformedPayload(f"unknown payload type: {ptype!r}")
    schema = _SCHEMAS[ptype]
    expected = set(schema) | {"type"}
    if set(payload) != expected:
        raise MalformedPayload(f"{ptype} fields must be exactly {sorted(expected)}")
    for field, kind in schema.items():
        _check(kind, f"{ptype}.{field}", payload[field])
    return ptype


class payloads:
    """Builders for the nine payload variants."""

    @staticmethod
    def add_delegate(addr: str) -> dict:
        return {"type": "AddDelegate", "addr": addr}

    @staticmethod
    def remove_delegate(addr: str) -> dict:
        return {"type": "RemoveDelegate", "addr": addr}

    @staticmethod
    def define_permission(perm_id: int, name: str, route: str, action: str) -> dict:
        return {"type": "DefinePermission", "perm_id": perm_id, "name": name, "route": route, "action": action}

    @staticmethod
    def define_role(role_id: int, name: str) -> dict:
        return {"type": "DefineRole", "role_id": role_id, "name": name}

    @staticmethod
    def grant_permission(role_id: int, perm_id: int) -> dict:
        return {"type": "GrantPermissionToRole", "role_id": role_id, "perm_id": perm_id}

    @staticmethod
    def revoke_permission(role_id: int, perm_id: int) -> dict:
        return {"type": "RevokePermissionFromRole", "role_id": role_id, "perm_id": perm_id}

    @staticmethod
    def assign_role(user: str, role_id: int) -> dict:
        return {"type": "AssignRole", "user": user, "role_id": role_id}

    @staticmethod
    def revoke_role(user: str, role_id: int) -> dict:
        return {"type": "RevokeRole", "user": user, "role_id": role_id}

    @staticmethod
    def define_view_template(role_id: int, fields: list[str]) -> dict:
        return {"type": "DefineViewTemplate", "role_id": role_id, "fields": list(fields)}
