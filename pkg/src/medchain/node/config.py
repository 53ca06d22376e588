"""Node runtime configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


def parse_endpoint(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"endpoint must be host:port, got {text!r}")
    return host, int(port)


@dataclass
class NodeConfig:
    node_name: str
    listen_endpoint: str = "127.0.0.1:0"
    peers: list[str] = field(default_factory=list)
    genesis_path: str | None = None
    miner_enabled: bool = False
    miner_address: str = ""
    max_block_txs: int | None = None  # defaults to the genesis limit
    confirmations: int = 0
    data_dir: str | None = None
    # Miner batching: wait this long after the first pending transaction so a
    # burst lands in one block instead of being split. Skipped at difficulty 0
    # (instant-seal dev mode) so unmined runs stay fast.
    batch_timeout_ms: int = 600
    # Attempts per mining slice; the miner re-checks the tip between slices.
    mine_slice_attempts: int = 20_000
    fault_threshold: int = 10
    orphan_cap: int = 64

    def __post_init__(self) -> None:
        if self.listen_endpoint in self.peers:
            raise ValueError("peers must exclude the node's own endpoint")
        if self.max_block_txs is not None and self.max_block_txs < 1:
            raise ValueError("max_block_txs must be >= 1")
        if self.confirmations < 0:
            raise ValueError("confirmations must be >= 0")
        parse_endpoint(self.listen_endpoint)
        for peer in self.peers:
            parse_endpoint(peer)

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "NodeConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown node config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "NodeConfig":
        return cls.from_json(json.loads(Path(path).read_text()))
