import random

import pytest

from medchain.contract.payload import payloads
from medchain.contract.state import TxRejected, apply_tx, genesis_state
from medchain.chain.types import Transaction

from conftest import (
    DELEGATE,
    DELEGATE2,
    OUTSIDER,
    OWNER,
    make_genesis,
    random_payload,
    seeded_key,
)


@pytest.fixture
def state(genesis):
    return genesis_state(genesis)


def test_genesis_state_owner_and_delegates(genesis):
    st = genesis_state(genesis)
    assert st.owner == OWNER.address
    assert st.delegates == {DELEGATE.address: True, DELEGATE2.address: True}
    assert st.permissions == {} and st.roles == {} and st.nonces == {}


def test_genesis_state_empty_consortium():
    st = genesis_state(make_genesis(members=()))
    assert st.delegates == {}


def test_genesis_state_duplicate_members_deduplicated():
    st = genesis_state(make_genesis(members=(DELEGATE, DELEGATE)))
    assert st.delegates == {DELEGATE.address: True}


def test_owner_adds_delegate_emits_event(state, factory):
    ev = apply_tx(state, factory.tx(OWNER, payloads.add_delegate(OUTSIDER.address)), 1)
    assert state.delegates[OUTSIDER.address] is True
    assert ev.kind == "DelegateAdded" and ev.subject == OUTSIDER.address and ev.block_index == 1


def test_non_owner_cannot_manage_delegates(state, factory):
    for key in (DELEGATE, OUTSIDER):
        with pytest.raises(TxRejected) as exc:
            apply_tx(state, factory.tx(key, payloads.add_delegate(OUTSIDER.address), nonce=0), 1)
        assert exc.value.code == "Unauthorized"


def test_remove_delegate_is_unconditional_set_false(state, factory):
    ev = apply_tx(state, factory.tx(OWNER, payloads.remove_delegate(OUTSIDER.address)), 1)
    assert state.delegates[OUTSIDER.address] is False
    assert ev.kind == "DelegateRemoved"


def test_removed_delegate_loses_rights(state, factory):
    apply_tx(state, factory.tx(OWNER, payloads.remove_delegate(DELEGATE.address)), 1)
    with pytest.raises(TxRejected) as exc:
        apply_tx(state, factory.tx(DELEGATE, payloads.define_role(1, "r")), 1)
    assert exc.value.code == "Unauthorized"


def test_delegate_defines_fig3_permission(state, factory):
    tx = factory.tx(DELEGATE, payloads.define_permission(1, "View CT Scan", "/ct/list/<intid>/", "View"))
    apply_tx(state, tx, 2)
    perm = state.permissions[1]
    assert (perm.name, perm.route, perm.action) == ("View CT Scan", "/ct/list/<intid>/", "View")


def test_outsider_cannot_define(state, factory):
    with pytest.raises(TxRejected) as exc:
        apply_tx(state, factory.tx(OUTSIDER, payloads.define_role(1, "r")), 1)
    assert exc.value.code == "Unauthorized"


def test_grant_unknown_permission_rejected(state, factory):
    apply_tx(state, factory.tx(DELEGATE, payloads.define_role(7, "role")), 1)
    with pytest.raises(TxRejected) as exc:
        apply_tx(state, factory.tx(DELEGATE, payloads.grant_permission(7, 99)), 1)
    assert exc.value.code == "UnknownId"


def test_assign_unknown_role_rejected(state, factory):
    with pytest.raises(TxRejected) as exc:
        apply_tx(state, factory.tx(DELEGATE, payloads.assign_role(OUTSIDER.address, 9)), 1)
    assert exc.value.code == "UnknownId"


def test_bad_nonce_rejected(state, factory):
    with pytest.raises(TxRejected) as exc:
        apply_tx(state, factory.tx(OWNER, payloads.define_role(1, "r"), nonce=5), 1)
    assert exc.value.code == "BadNonce"


def test_define_role_upsert_keeps_grants(state, factory):
    apply_tx(state, factory.tx(DELEGATE, payloads.define_role(1, "oncologist")), 1)
    apply_tx(state, factory.tx(DELEGATE, payloads.define_permission(1, "View CT", "/ct/list/<intid>/", "View")), 1)
    apply_tx(state, factory.tx(DELEGATE, payloads.grant_permission(1, 1)), 1)
    apply_tx(state, factory.tx(DELEGATE, payloads.define_role(1, "radiation oncologist")), 2)
    assert state.roles[1].name == "radiation oncologist"
    assert state.roles[1].permission_ids == {1}


def test_define_permission_upsert_replaces(state, factory):
    apply_tx(state, factory.tx(DELEGATE, payloads.define_permission(1, "View CT", "/ct/list/<intid>/", "View")), 1)
    apply_tx(state, factory.tx(DELEGATE, payloads.define_permission(1, "Del CT", "/ct/del/<intid>/", "Delete")), 1)
    assert state.permissions[1].action == "Delete"


def test_revokes_are_unconditional_noops_on_missing_targets(state, factory):
    before_events = len(state.events)
    apply_tx(state, factory.tx(DELEGATE, payloads.revoke_permission(42, 42)), 1)
    apply_tx(state, factory.tx(DELEGATE, payloads.revoke_role(OUTSIDER.address, 42)), 1)
    assert len(state.events) == before_events + 2
    assert 42 not in state.roles


def test_rejection_is_atomic(state, factory):
    apply_tx(state, factory.tx(DELEGATE, payloads.define_role(1, "r")), 1)
    snapshot = state.canonical_encode()
    with pytest.raises(TxRejected):
        apply_tx(state, factory.tx(DELEGATE, payloads.grant_permission(1, 5)), 1)
    assert state.canonical_encode() == snapshot


def test_nonce_counts_applied_txs_per_sender(state, factory):
    for i in range(4):
        apply_tx(state, factory.tx(DELEGATE, payloads.define_role(i + 1, f"r{i}")), 1)
    assert state.nonces[DELEGATE.address] == 4
    assert DELEGATE2.address not in state.nonces


def test_event_log_counts_accepted_mutations(state, factory):
    accepted = 0
    rng = random.Random(11)
    keys = [OWNER, DELEGATE, OUTSIDER]
    addrs = [k.address for k in keys]
    nonces = {}
    for _ in range(300):
        key = rng.choice(keys)
        nonce = nonces.get(key.address, 0)
        tx = Transaction.build(key, nonce=nonce, payload=random_payload(rng, addrs), timestamp=1)
        try:
            apply_tx(state, tx, 3)
            accepted += 1
            nonces[key.address] = nonce + 1
        except TxRejected:
            pass
    assert len(state.events) == accepted


def test_fuzz_only_owner_ever_mutates_delegates(state):
    """Fig 6 semantics: audit every delegates-map change back to the owner."""
    rng = random.Random(99)
    keys = [seeded_key(i) for i in range(1, 10)]
    addrs = [k.address for k in keys]
    nonces: dict[str, int] = {}
    for _ in range(600):
        key = rng.choice(keys)
        nonce = nonces.get(key.address, 0)
        tx = Transaction.build(key, nonce=nonce, payload=random_payload(rng, addrs), timestamp=1)
        before = dict(state.delegates)
        try:
            apply_tx(state, tx, 1)
            nonces[key.address] = nonce + 1
        except TxRejected:
            assert state.delegates == before
            continue
        if state.delegates != before:
            assert tx.sender == state.owner
            assert tx.payload["type"] in ("AddDelegate", "RemoveDelegate")
            assert state.events[-1].kind in ("DelegateAdded", "DelegateRemoved")


def test_fuzz_rejections_never_mutate(state):
    rng = random.Random(123)
    keys = [seeded_key(i) for i in range(1, 8)]
    addrs = [k.address for k in keys]
    nonces: dict[str, int] = {}
    for _ in range(400):
        key = rng.choice(keys)
        # Half the time use a wrong nonce to force BadNonce.
        good = nonces.get(key.address, 0)
        nonce = good if rng.random() < 0.5 else good + rng.randint(1, 3)
        tx = Transaction.build(key, nonce=nonce, payload=random_payload(rng, addrs), timestamp=1)
        snapshot = state.canonical_encode()
        try:
            apply_tx(state, tx, 1)
            nonces[key.address] = nonce + 1
        except TxRejected:
            assert state.canonical_encode() == snapshot
