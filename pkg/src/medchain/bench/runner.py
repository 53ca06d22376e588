"""Four-node latency experiment driver.

Boots N local nodes (one miner), replays the published experiment: a
transaction workload split into random groups, each group submitted as a
burst once the previous group is confirmed on every node. Per mined block
it records the sealing time and the end-to-end time from the block's first
transaction submission to acceptance at all nodes.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
import tempfile
import threading
import time
from dataclasses import dataclass
from hashlib import sha256
from pathlib import Path

from medchain.bench.config import BenchConfig
from medchain.chain.genesis import Genesis
from medchain.chain.types import Block, Transaction
from medchain.contract.payload import payloads
from medchain.contract.replay import replay
from medchain.keys import KeyPair
from medchain.node.config import NodeConfig
from medchain.node.node import Node

SETUP_ROLES = 4
SETUP_PERMS = 8


@dataclass(frozen=True)
class BenchRecord:
    block_index: int
    tx_count: int
    mine_ms: float
    e2e_ms: float


class BenchError(Exception):
    pass


def bench_owner(cfg: BenchConfig) -> KeyPair:
    return KeyPair.from_seed(sha256(f"bench-owner-{cfg.rng_seed}".encode()).digest())


def bench_genesis(cfg: BenchConfig) -> Genesis:
    owner = bench_owner(cfg)
    return Genesis(
        network_id=f"bench-{cfg.rng_seed}",
        difficulty_bits=cfg.difficulty_bits,
        max_block_txs=cfg.max_block_txs,
        owner_address=owner.address,
        consortium=(),
        genesis_timestamp=1_600_000_000_000,
    )


def setup_payloads() -> list[dict]:
    out = [payloads.define_role(rid, f"role-{rid}") for rid in range(1, SETUP_ROLES + 1)]
    out += [
        payloads.define_permission(pid, f"perm-{pid}", f"/area{pid}/list/<intid>/", "View")
        for pid in range(1, SETUP_PERMS + 1)
    ]
    return out


def generate_workload(cfg: BenchConfig, start_nonce: int) -> tuple[list[Transaction], list[int]]:
    """Deterministic (seeded) transaction stream and group-size partition."""
    rng = random.Random(cfg.rng_seed)
    owner = bench_owner(cfg)
    now_ms = 1_600_000_000_500
    txs: list[Transaction] = []
    for i in range(cfg.total_txs):
        if rng.random() < 0.7:
            user = rng.randbytes(20).hex()
            payload = payloads.assign_role(user, rng.randint(1, SETUP_ROLES))
        else:
            payload = payloads.grant_permission(
                rng.randint(1, SETUP_ROLES), rng.randint(1, SETUP_PERMS)
            )
        txs.append(Transaction.build(owner, nonce=start_nonce + i, payload=payload, timestamp=now_ms + i))
    sizes: list[int] = []
    remaining = cfg.total_txs
    while remaining > 0:
        size = min(rng.randint(cfg.group_size_law.min, cfg.group_size_law.max), remaining)
        sizes.append(size)
        remaining -= size
    return txs, sizes


class _Tracker:
    """Observes block acceptance across nodes; wakes the driver on progress."""

    def __init__(self, nodes: list[Node]):
        self.node_count = len(nodes)
        self.cond = threading.Condition()
        self.seen: dict[str, set[int]] = {}
        self.all_seen_at: dict[str, float] = {}
        self.confirmed: set[str] = set()
        for idx, node in enumerate(nodes):
            node.block_listeners.append(self._listener(idx))

    def _listener(self, idx: int):
        def on_block(_node: Node, block: Block, status: str) -> None:
            if status not in ("extended", "reorged"):
                return
            now = time.monotonic()
            with self.cond:
                seen = self.seen.setdefault(block.block_hash, set())
                seen.add(idx)
                if len(seen) == self.node_count and block.block_hash not in self.all_seen_at:
                    self.all_seen_at[block.block_hash] = now
                    self.confirmed.update(tx.tx_id for tx in block.transactions)
                    self.cond.notify_all()

        return on_block

    def wait_confirmed(self, tx_ids: list[str], deadline: float) -> bool:
        wanted = set(tx_ids)
        with self.cond:
            while not wanted <= self.confirmed:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self.cond.wait(timeout=min(remaining, 1.0))
        return True


def run_benchmark(
    cfg: BenchConfig,
    out_csv: str | Path | None = None,
    out_summary: str | Path | None = None,
    run_dir: str | Path | None = None,
    progress: bool = False,
) -> tuple[list[BenchRecord], dict]:
    owner = bench_owner(cfg)
    genesis = bench_genesis(cfg)
    tmp = None
    if run_dir is None:
        tmp = tempfile.TemporaryDirectory(prefix="medchain-bench-")
        run_dir = tmp.name
    run_dir = Path(run_dir)

    nodes: list[Node] = []
    try:
        for i in range(cfg.nodes):
            config = NodeConfig(
                node_name=f"bench{i}",
                listen_endpoint="127.0.0.1:0",
                miner_enabled=(i == 0),
                miner_address=owner.address,
                data_dir=str(run_dir / f"node{i}"),
                batch_timeout_ms=cfg.batch_timeout_ms,
            )
            node = Node(config, genesis=genesis)
            node.start()
            nodes.append(node)
        for a in nodes:
            for b in nodes:
                if a is not b:
                    a.connect_to(b.endpoint)
        miner = nodes[0]
        tracker = _Tracker(nodes)
        deadline = time.monotonic() + cfg.timeout_s

        # Setup phase: the owner defines the roles and permissions the
        # workload references; not part of the measured series.
        setup_txs = [
            Transaction.build(owner, nonce=i, payload=p, timestamp=1_600_000_000_100 + i)
            for i, p in enumerate(setup_payloads())
        ]
        for tx in setup_txs:
            code = miner.submit_tx(tx)
            if code != "accepted":
                raise BenchError(f"setup tx rejected: {code}")
        if not tracker.wait_confirmed([t.tx_id for t in setup_txs], deadline):
            raise BenchError("setup phase timed out")
        setup_height = miner.height()

        workload, sizes = generate_workload(cfg, start_nonce=len(setup_txs))
        submit_at: dict[str, float] = {}
        status = "ok"
        at = 0
        for group_idx, size in enumerate(sizes):
            group = workload[at : at + size]
            at += size
            for tx in group:
                submit_at[tx.tx_id] = time.monotonic()
                code = miner.submit_tx(tx)
                if code != "accepted":
                    raise BenchError(f"workload tx rejected: {code}")
            if not tracker.wait_confirmed([t.tx_id for t in group], deadline):
                status = "timeout"
                break
            if progress and group_idx % 20 == 0:
                print(f"  group {group_idx + 1}/{len(sizes)} confirmed (height {miner.height()})")
            if cfg.submit_delay_ms:
                time.sleep(cfg.submit_delay_ms / 1000.0)

        records: list[BenchRecord] = []
        chain = miner.canonical_chain()
        for block in chain[setup_height + 1 :]:
            block_hash = block.block_hash
            if block_hash not in tracker.all_seen_at:
                continue  # unconfirmed tail after a timeout
            first_submit = min(
                (submit_at[tx.tx_id] for tx in block.transactions if tx.tx_id in submit_at),
                default=None,
            )
            if first_submit is None:
                continue
            records.append(
                BenchRecord(
                    block_index=block.header.index,
                    tx_count=len(block.transactions),
                    mine_ms=round(miner.mine_ms.get(block_hash, 0.0), 3),
                    e2e_ms=round((tracker.all_seen_at[block_hash] - first_submit) * 1000.0, 3),
                )
            )

        summary = _summarize(cfg, records, status)
        if status == "ok":
            _audit(cfg, chain[: miner.height() + 1], genesis, workload, records)
        if out_csv:
            write_csv(records, out_csv)
        if out_summary:
            Path(out_summary).write_text(json.dumps(summary, indent=2) + "\n")
        return records, summary
    finally:
        for node in nodes:
            node.stop()
        if tmp is not None:
            tmp.cleanup()


def _summarize(cfg: BenchConfig, records: list[BenchRecord], status: str) -> dict:
    e2e = [r.e2e_ms for r in records]
    return {
        "block_count": len(records),
        "total_txs": sum(r.tx_count for r in records),
        "min_e2e_ms": round(min(e2e), 3) if e2e else None,
        "median_e2e_ms": round(statistics.median(e2e), 3) if e2e else None,
        "max_e2e_ms": round(max(e2e), 3) if e2e else None,
        "difficulty_bits": cfg.difficulty_bits,
        "status": status,
    }


def _audit(
    cfg: BenchConfig,
    chain: list[Block],
    genesis: Genesis,
    workload: list[Transaction],
    records: list[BenchRecord],
) -> None:
    """Conservation and state checks; raises BenchError on violation."""
    confirmed_counts: dict[str, int] = {}
    for block in chain:
        for tx in block.transactions:
            confirmed_counts[tx.tx_id] = confirmed_counts.get(tx.tx_id, 0) + 1
    for tx in workload:
        if confirmed_counts.get(tx.tx_id, 0) != 1:
            raise BenchError(f"tx {tx.tx_id} confirmed {confirmed_counts.get(tx.tx_id, 0)} times")
    if sum(r.tx_count for r in records) != cfg.total_txs:
        raise BenchError("record tx counts do not sum to the workload size")
    indices = [r.block_index for r in records]
    if indices != list(range(indices[0], indices[0] + len(indices))):
        raise BenchError("block indices are not gap-free")
    result = replay(chain, genesis)
    assigns = sum(1 for tx in workload if tx.payload["type"] == "AssignRole")
    assigned_events = sum(1 for e in result.state.events if e.kind == "RoleAssigned")
    if assigned_events != assigns:
        raise BenchError(f"assigned events {assigned_events} != AssignRole txs {assigns}")
    if result.rejections:
        raise BenchError(f"{len(result.rejections)} contract rejections during replay")


def write_csv(records: list[BenchRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["block_index", "tx_count", "mine_ms", "e2e_ms"])
        for r in records:
            writer.writerow([r.block_index, r.tx_count, r.mine_ms, r.e2e_ms])
