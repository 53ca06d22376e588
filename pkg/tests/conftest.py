import random
import time
from contextlib import contextmanager

import pytest

from medchain.chain.genesis import Genesis, genesis_block
from medchain.chain.merkle import merkle_root
from medchain.chain.pow import mine
from medchain.chain.types import Block, BlockHeader, Transaction
from medchain.contract.payload import payloads
from medchain.keys import KeyPair
from medchain.node.config import NodeConfig
from medchain.node.node import Node


def seeded_key(tag: int) -> KeyPair:
    return KeyPair.from_seed(bytes([tag]) * 32)


OWNER = seeded_key(1)
DELEGATE = seeded_key(2)
DELEGATE2 = seeded_key(3)
OUTSIDER = seeded_key(4)
ONCOLOGIST = seeded_key(5)
PHARMACIST = seeded_key(6)


def make_genesis(difficulty: int = 0, max_block_txs: int = 16, members=(DELEGATE, DELEGATE2)) -> Genesis:
    return Genesis(
        network_id="medchain-test",
        difficulty_bits=difficulty,
        max_block_txs=max_block_txs,
        owner_address=OWNER.address,
        consortium=tuple({"name": f"inst-{i}", "address": k.address} for i, k in enumerate(members)),
        genesis_timestamp=1_600_000_000_000,
    )


class TxFactory:
    """Builds correctly nonce-sequenced signed transactions per sender."""

    def __init__(self, start_ts: int = 1_600_000_000_001):
        self.nonces: dict[str, int] = {}
        self.ts = start_ts

    def tx(self, key: KeyPair, payload: dict, nonce: int | None = None) -> Transaction:
        if nonce is None:
            nonce = self.nonces.get(key.address, 0)
            self.nonces[key.address] = nonce + 1
        self.ts += 1
        return Transaction.build(key, nonce=nonce, payload=payload, timestamp=self.ts)


def seal_block(parent: Block, txs: list[Transaction], genesis: Genesis, miner: KeyPair = OWNER) -> Block:
    header = BlockHeader(
        index=parent.header.index + 1,
        parent_hash=parent.block_hash,
        merkle_root=merkle_root([t.tx_id for t in txs]),
        difficulty=genesis.difficulty_bits,
        pow_nonce=0,
        timestamp=max(parent.header.timestamp, max((t.timestamp for t in txs), default=0)) + 1,
        miner=miner.address,
    )
    sealed = mine(header)
    assert sealed is not None
    return Block(header=sealed, transactions=tuple(txs))


def build_chain(genesis: Genesis, batches: list[list[Transaction]]) -> list[Block]:
    chain = [genesis_block(genesis)]
    for txs in batches:
        chain.append(seal_block(chain[-1], txs, genesis))
    return chain


def fig3_permission_payloads() -> list[dict]:
    rows = [
        (8, "Delete CT Scan", "/ct/del/<intid>/", "Delete"),
        (7, "Delete PET Scan", "/pet/del/<intid>/", "Delete"),
        (6, "View Histopathology Images", "/histo/list/<intid>/", "View"),
        (5, "View PET Scan", "/pet/list/<intid>/", "View"),
        (2, "View MRI Scan", "/mri/list/<intid>/", "View"),
        (1, "View CT Scan", "/ct/list/<intid>/", "View"),
    ]
    return [payloads.define_permission(pid, name, route, action) for pid, name, route, action in rows]


def random_payload(rng: random.Random, known_addresses: list[str]) -> dict:
    kind = rng.randrange(9)
    addr = rng.choice(known_addresses)
    rid = rng.randint(1, 6)
    pid = rng.randint(1, 9)
    if kind == 0:
        return payloads.add_delegate(addr)
    if kind == 1:
        return payloads.remove_delegate(addr)
    if kind == 2:
        return payloads.define_permission(pid, f"perm-{pid}", f"/r{pid}/list/<intid>/", rng.choice(["View", "Edit", "Delete"]))
    if kind == 3:
        return payloads.define_role(rid, f"role-{rid}")
    if kind == 4:
        return payloads.grant_permission(rid, pid)
    if kind == 5:
        return payloads.revoke_permission(rid, pid)
    if kind == 6:
        return payloads.assign_role(addr, rid)
    if kind == 7:
        return payloads.revoke_role(addr, rid)
    return payloads.define_view_template(rid, rng.sample(["ID", "Age", "Gender", "Weight", "Charges"], k=rng.randint(0, 3)))


def wait_until(predicate, timeout=15.0, interval=0.02, message="condition"):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return
        time.sleep(interval)
    raise AssertionError(f"timed out waiting for {message}")


@contextmanager
def network(
    n: int,
    genesis: Genesis,
    miners: tuple[int, ...] = (),
    full_mesh: bool = True,
    data_dirs: list | None = None,
    batch_timeout_ms: int = 40,
):
    """Boot n nodes on loopback TCP; optionally connect them full mesh."""
    nodes = []
    try:
        for i in range(n):
            config = NodeConfig(
                node_name=f"n{i}",
                listen_endpoint="127.0.0.1:0",
                miner_enabled=i in miners,
                miner_address=OWNER.address,
                data_dir=str(data_dirs[i]) if data_dirs else None,
                batch_timeout_ms=batch_timeout_ms,
            )
            node = Node(config, genesis=genesis)
            node.start()
            nodes.append(node)
        if full_mesh:
            for a in nodes:
                for b in nodes:
                    if a is not b:
                        a.connect_to(b.endpoint)
            wait_until(
                lambda: all(len(x._connected_endpoints()) == n - 1 for x in nodes),
                message="full mesh",
            )
        yield nodes
    finally:
        for node in nodes:
            node.stop()


def all_tips_equal(nodes) -> bool:
    return len({n.tip_hash for n in nodes}) == 1


@pytest.fixture
def genesis() -> Genesis:
    return make_genesis()


@pytest.fixture
def factory() -> TxFactory:
    return TxFactory()
