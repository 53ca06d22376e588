import json
from pathlib import Path

import pytest

from medchain.contract.payload import (
    MalformedPayload,
    PAYLOAD_TYPES,
    payloads,
    validate_payload,
    validate_route_pattern,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ADDR = "ab" * 20


def test_all_nine_variants_validate():
    docs = [
        payloads.add_delegate(ADDR),
        payloads.remove_delegate(ADDR),
        payloads.define_permission(1, "View CT Scan", "/ct/list/<intid>/", "View"),
        payloads.define_role(1, "oncologist"),
        payloads.grant_permission(1, 1),
        payloads.revoke_permission(1, 1),
        payloads.assign_role(ADDR, 1),
        payloads.revoke_role(ADDR, 1),
        payloads.define_view_template(1, ["ID", "Age"]),
    ]
    assert sorted(d["type"] for d in docs) == sorted(PAYLOAD_TYPES)
    for doc in docs:
        validate_payload(doc)


def test_golden_payload_fixtures_cover_every_variant():
    golden = json.loads((FIXTURES / "payload_golden.json").read_text())
    assert sorted(golden) == sorted(PAYLOAD_TYPES)
    for doc in golden.values():
        validate_payload(doc)


@pytest.mark.parametrize(
    "doc",
    [
        {"type": "Nope"},
        {"type": "AddDelegate"},
        {"type": "AddDelegate", "addr": "xyz"},
        {"type": "AddDelegate", "addr": ADDR, "extra": 1},
        {"type": "DefineRole", "role_id": 0, "name": "x"},
        {"type": "DefineRole", "role_id": -3, "name": "x"},
        {"type": "DefineRole", "role_id": 1, "name": ""},
        {"type": "DefineRole", "role_id": True, "name": "x"},
        {"type": "DefinePermission", "perm_id": 1, "name": "n", "route": "/a/b", "action": "View"},
        {"type": "DefinePermission", "perm_id": 1, "name": "n", "route": "/a//", "action": "View"},
        {"type": "DefinePermission", "perm_id": 1, "name": "n", "route": "/a/<id>/", "action": "View"},
        {"type": "DefinePermission", "perm_id": 1, "name": "n", "route": "/a/", "action": "Read"},
        {"type": "DefineViewTemplate", "role_id": 1, "fields": ["ok", 3]},
        "not an object",
    ],
)
def test_malformed_payloads_rejected(doc):
    with pytest.raises(MalformedPayload):
        validate_payload(doc)


def test_route_pattern_segments():
    assert validate_route_pattern("/ct/list/<intid>/") == ["ct", "list", "<intid>"]
    assert validate_route_pattern("/x/") == ["x"]
    with pytest.raises(MalformedPayload):
        validate_route_pattern("ct/list/")
    with pytest.raises(MalformedPayload):
        validate_route_pattern("/")
