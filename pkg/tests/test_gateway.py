import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from medchain.chain.types import Transaction
from medchain.contract.access import check_access
from medchain.contract.payload import payloads
from medchain.gateway.app import create_app
from medchain.gateway.auth import build_auth_header
from medchain.gateway.fixtures import fig3_payloads, fig4_payloads, load_patient
from medchain.gateway.records import PATIENT_FIELDS, RecordStore, project_view
from medchain.node.config import NodeConfig
from medchain.node.node import Node

from conftest import DELEGATE, ONCOLOGIST, OWNER, PHARMACIST, TxFactory, make_genesis, seeded_key

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def wait_until(predicate, timeout=20.0, message="condition"):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return
        time.sleep(0.01)
    raise AssertionError(f"timed out waiting for {message}")


def submit_and_confirm(node: Node, txs: list[Transaction]):
    for tx in txs:
        assert node.submit_tx(tx) == "accepted", tx.payload
    wait_until(
        lambda: all(tx.tx_id in node.confirmed_txs for tx in txs),
        message="txs confirmed",
    )


@pytest.fixture(scope="module")
def stack(tmp_path_factory):
    genesis = make_genesis()
    config = NodeConfig(
        node_name="gw",
        listen_endpoint="127.0.0.1:0",
        miner_enabled=True,
        miner_address=OWNER.address,
        batch_timeout_ms=20,
    )
    node = Node(config, genesis=genesis)
    node.start()

    factory = TxFactory()
    setup = [factory.tx(DELEGATE, p) for p in fig3_payloads(FIXTURES / "fig3_permissions.json")]
    setup += [factory.tx(DELEGATE, p) for p in fig4_payloads(FIXTURES / "fig4_templates.json")]
    setup += [
        factory.tx(DELEGATE, payloads.assign_role(ONCOLOGIST.address, 1)),
        factory.tx(DELEGATE, payloads.assign_role(PHARMACIST.address, 2)),
    ]
    submit_and_confirm(node, setup)

    records = RecordStore(tmp_path_factory.mktemp("records"))
    intid, record = load_patient(FIXTURES / "fig4_patient_PT0986.json")
    records.save(intid, record)

    keys = {k.address: k.public_key for k in (ONCOLOGIST, PHARMACIST, DELEGATE, OWNER)}
    app = create_app(node, records, key_directory=keys)
    client = TestClient(app)
    try:
        yield node, client, records, factory
    finally:
        node.stop()


def auth(key, method, path, **kwargs):
    return {"X-Auth": build_auth_header(key, method, path, **kwargs)}


# ---------------------------------------------------------------------------
# projection


def test_project_identity_and_empty():
    record = {"ID": "PT1", "Age": 4}
    assert project_view(record, ["ID", "Age"]) == record
    assert project_view(record, []) == {}


def test_project_keeps_template_order_and_skips_missing():
    record = {"Age": 4, "ID": "PT1"}
    out = project_view(record, ["ID", "Weight", "Age"])
    assert list(out) == ["ID", "Age"]


@settings(max_examples=150)
@given(
    record=st.dictionaries(st.sampled_from(PATIENT_FIELDS), st.integers(), max_size=10),
    template=st.lists(st.sampled_from(PATIENT_FIELDS + ["Bogus"]), max_size=8),
)
def test_projection_never_leaks(record, template):
    out = project_view(record, template)
    assert set(out) <= set(template)
    assert set(out) <= set(record)


# ---------------------------------------------------------------------------
# transaction endpoint


def test_post_tx_accepted_and_eventually_confirmed(stack):
    node, client, _records, factory = stack
    tx = factory.tx(OWNER, payloads.add_delegate(seeded_key(40).address))
    response = client.post("/api/tx", json=tx.to_json())
    assert response.status_code == 202
    body = response.json()
    assert body == {"tx_id": tx.tx_id, "status": "accepted"}
    wait_until(lambda: tx.tx_id in node.confirmed_txs, message="tx confirmed")
    assert client.post("/api/tx", json=tx.to_json()).status_code == 400


def test_post_tx_malformed_json(stack):
    _node, client, _records, _factory = stack
    response = client.post("/api/tx", content=b"{nope", headers={"content-type": "application/json"})
    assert response.status_code == 400
    assert response.json()["code"] == "MalformedPayload"


def test_post_tx_duplicate_rejected(stack):
    node, client, _records, factory = stack
    tx = factory.tx(OWNER, payloads.add_delegate(seeded_key(41).address))
    assert client.post("/api/tx", json=tx.to_json()).status_code == 202
    second = client.post("/api/tx", json=tx.to_json())
    assert second.status_code == 400
    assert second.json()["code"] == "DuplicateTx"
    wait_until(lambda: len(node.mempool) == 0, message="drain")


def test_post_tx_rejects_unknown_template_fields(stack):
    _node, client, _records, factory = stack
    tx = factory.tx(DELEGATE, payloads.define_view_template(1, ["ID", "NotAField"]))
    response = client.post("/api/tx", json=tx.to_json())
    assert response.status_code == 400
    assert "NotAField" in response.json()["message"]
    factory.nonces[DELEGATE.address] -= 1  # tx never reached the chain


# ---------------------------------------------------------------------------
# access endpoint


def test_access_oncologist_allow(stack):
    _node, client, _records, _factory = stack
    response = client.get(
        "/api/access",
        params={"user": ONCOLOGIST.address, "action": "View", "path": "/ct/list/42/"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["verdict"] == "Allow"
    assert body["matched_permission"] == 1
    assert body["via_role"] == 1
    assert body["height"] >= 1


def test_access_unknown_user_denied(stack):
    _node, client, _records, _factory = stack
    response = client.get(
        "/api/access", params={"user": "00" * 20, "action": "View", "path": "/ct/list/42/"}
    )
    assert response.json()["verdict"] == "Deny"
    assert response.json()["reason"] == "NoRoles"


def test_access_pharmacist_delete_denied(stack):
    _node, client, _records, _factory = stack
    response = client.get(
        "/api/access",
        params={"user": PHARMACIST.address, "action": "Delete", "path": "/pet/del/42/"},
    )
    assert response.json()["verdict"] == "Deny"
    assert response.json()["reason"] == "NoMatchingRole"


def test_access_rejects_malformed_address(stack):
    _node, client, _records, _factory = stack
    response = client.get(
        "/api/access", params={"user": "zz", "action": "View", "path": "/ct/list/42/"}
    )
    assert response.status_code == 400


# ---------------------------------------------------------------------------
# record routes (Fig 4)


def test_oncologist_gets_fig4a_panel(stack):
    _node, client, _records, _factory = stack
    path = "/ct/list/986/"
    response = client.get(path, headers=auth(ONCOLOGIST, "GET", path))
    assert response.status_code == 200
    assert response.json() == {
        "ID": "PT0986",
        "Age": 35,
        "Gender": "Female",
        "Weight": 99.79,
        "BodyPartExamined": "Arm",
        "PhotometricInterpretation": "+ .2568R + .5041G + .0979B + 16",
        "PixelSpacing": [2.03125, 2.03125],
        "PixelBandwidth": 1953.125,
        "AcquisitionDate": "2015/06/08",
        "Image": "imgref://PT0986/arm-ct",
    }


def test_pharmacist_gets_fig4b_panel(stack):
    _node, client, _records, _factory = stack
    path = "/ct/list/986/"
    response = client.get(path, headers=auth(PHARMACIST, "GET", path))
    assert response.status_code == 200
    assert response.json() == {
        "ID": "PT0986",
        "Age": 35,
        "Gender": "Female",
        "Smoker": "yes",
        "Children": 0,
        "BMI": "Arm",
        "Region": "Southwest",
        "Charges": 16884.924,
    }


def test_role_without_template_gets_empty_object(stack):
    node, client, records, factory = stack
    viewer = seeded_key(42)
    submit_and_confirm(
        node,
        [
            factory.tx(DELEGATE, payloads.define_role(9, "auditor")),
            factory.tx(DELEGATE, payloads.grant_permission(9, 1)),
            factory.tx(DELEGATE, payloads.assign_role(viewer.address, 9)),
        ],
    )
    # An unregistered key cannot authenticate at all.
    path = "/ct/list/986/"
    unauth = client.get(path, headers={"X-Auth": build_auth_header(viewer, "GET", path)})
    assert unauth.status_code == 401
    # Registered but the role never defined a view template: empty projection.
    with_viewer = TestClient(
        create_app(node, records, key_directory={viewer.address: viewer.public_key})
    )
    response = with_viewer.get(path, headers={"X-Auth": build_auth_header(viewer, "GET", path)})
    assert response.status_code == 200
    assert response.json() == {}


def test_empty_template_projects_empty(stack):
    node, client, _records, factory = stack
    submit_and_confirm(node, [factory.tx(DELEGATE, payloads.define_view_template(2, []))])
    path = "/ct/list/986/"
    response = client.get(path, headers=auth(PHARMACIST, "GET", path))
    assert response.status_code == 200
    assert response.json() == {}
    # Restore the Fig 4b template for later tests.
    fig4b = ["ID", "Age", "Gender", "Smoker", "Children", "BMI", "Region", "Charges"]
    submit_and_confirm(node, [factory.tx(DELEGATE, payloads.define_view_template(2, fig4b))])


def test_deny_carries_decision_body(stack):
    _node, client, _records, _factory = stack
    path = "/pet/del/986/"
    response = client.get(path, headers=auth(PHARMACIST, "GET", path))
    assert response.status_code == 403
    body = response.json()
    assert body["code"] == "AccessDenied"
    assert body["decision"]["verdict"] == "Deny"
    assert body["decision"]["reason"] == "NoMatchingRole"


def test_unknown_patient_404(stack):
    _node, client, _records, _factory = stack
    path = "/ct/list/31337/"
    response = client.get(path, headers=auth(ONCOLOGIST, "GET", path))
    assert response.status_code == 404


def test_del_route_soft_deletes(stack):
    _node, client, records, _factory = stack
    path = "/ct/del/986/"
    response = client.get(path, headers=auth(ONCOLOGIST, "GET", path))
    assert response.status_code == 200
    assert response.json() == {
        "deleted": "ct",
        "patient": 986,
        "via_permission": 8,
        "via_role": 1,
    }
    assert records.deleted_modalities(986) == ["ct"]
    # Repeatable: soft delete again.
    assert client.get(path, headers=auth(ONCOLOGIST, "GET", path)).status_code == 200


def test_auth_signature_byte_flips_all_yield_401(stack):
    _node, client, _records, _factory = stack
    path = "/ct/list/986/"
    header = json.loads(build_auth_header(ONCOLOGIST, "GET", path))
    signature = bytearray(bytes.fromhex(header["signature"]))
    for i in range(len(signature)):
        tampered = bytearray(signature)
        tampered[i] ^= 0x01
        bad = dict(header, signature=bytes(tampered).hex())
        response = client.get(path, headers={"X-Auth": json.dumps(bad)})
        assert response.status_code == 401, f"byte {i} not rejected"


def test_auth_timestamp_skew_rejected(stack):
    _node, client, _records, _factory = stack
    path = "/ct/list/986/"
    stale = int(time.time() * 1000) - 120_000
    response = client.get(path, headers=auth(ONCOLOGIST, "GET", path, timestamp=stale))
    assert response.status_code == 401


def test_auth_missing_header_rejected(stack):
    _node, client, _records, _factory = stack
    assert client.get("/ct/list/986/").status_code == 401


def test_chain_key_fallback_without_directory_entry(stack):
    node, client, records, factory = stack
    # DELEGATE appears on chain transactions; an app with an empty key
    # directory can still authenticate it from the chain.
    bare_app = create_app(node, records, key_directory={})
    bare = TestClient(bare_app)
    path = "/api/chain"
    response = bare.get("/ct/list/986/", headers=auth(DELEGATE, "GET", "/ct/list/986/"))
    # Delegate has no roles: authenticated, then denied.
    assert response.status_code == 403


# ---------------------------------------------------------------------------
# inspection endpoints


def test_state_permissions_match_fig3(stack):
    _node, client, _records, _factory = stack
    rows = client.get("/api/state/permissions").json()
    expected = json.loads((FIXTURES / "fig3_permissions.json").read_text())
    assert sorted(rows) == sorted(str(r["perm_id"]) for r in expected)
    for row in expected:
        got = rows[str(row["perm_id"])]
        assert got == {"name": row["name"], "route": row["route"], "action": row["action"]}
    assert "3" not in rows and "4" not in rows


def test_chain_pagination(stack):
    _node, client, _records, _factory = stack
    response = client.get("/api/chain", params={"from": 0, "count": 1})
    body = response.json()
    assert len(body["blocks"]) == 1
    assert body["blocks"][0]["header"]["index"] == 0
    assert client.get("/api/chain", params={"from": -1, "count": 1}).status_code == 400
    assert client.get("/api/chain", params={"from": "x", "count": 1}).status_code == 400


def test_events_since_and_completeness(stack):
    node, client, _records, _factory = stack
    events = client.get("/api/events", params={"since": 0}).json()
    _, state = node.state_snapshot()
    assert len(events) == len(state.events)
    tail = client.get("/api/events", params={"since": 2}).json()
    assert all(e["block_index"] >= 2 for e in tail)


def test_state_reads_are_pure(stack):
    node, client, _records, _factory = stack
    wait_until(lambda: len(node.mempool) == 0, message="quiesce")
    for endpoint in ("/api/state/delegates", "/api/state/roles", "/api/state/permissions", "/api/state/templates", "/api/events"):
        assert client.get(endpoint).content == client.get(endpoint).content


# ---------------------------------------------------------------------------
# enforcement equivalence (sampled here; full corpus in acceptance)


def test_enforcement_matches_check_access(stack):
    node, client, _records, _factory = stack
    rng = random.Random(17)
    users = [ONCOLOGIST, PHARMACIST, DELEGATE, OWNER]
    modalities = ["ct", "mri", "pet", "histo", "xr"]
    kinds = ["list", "del"]
    _, state = node.state_snapshot()
    for _ in range(200):
        key = rng.choice(users)
        modality = rng.choice(modalities)
        kind = rng.choice(kinds)
        patient = rng.choice([986, 986, 42])
        path = f"/{modality}/{kind}/{patient}/"
        action = "View" if kind == "list" else "Delete"
        expected = check_access(state, key.address, action, path)
        response = client.get(path, headers=auth(key, "GET", path))
        if expected.allowed:
            assert response.status_code in (200, 404), path
        else:
            assert response.status_code == 403, path
