"""Benchmark configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class GroupSizeLaw:
    min: int = 1
    max: int = 16

    def __post_init__(self) -> None:
        if self.min < 1 or self.min > self.max:
            raise ValueError("group size law requires 1 <= min <= max")


@dataclass
class BenchConfig:
    total_txs: int = 1000
    nodes: int = 4
    difficulty_bits: int = 0
    group_size_law: GroupSizeLaw = field(default_factory=GroupSizeLaw)
    rng_seed: int = 42
    submit_delay_ms: int = 0
    max_block_txs: int = 16
    batch_timeout_ms: int = 600
    timeout_s: int = 1800

    def __post_init__(self) -> None:
        if self.total_txs < 1:
            raise ValueError("total_txs must be >= 1")
        if self.nodes < 1:
            raise ValueError("nodes must be >= 1")
        if isinstance(self.group_size_law, dict):
            self.group_size_law = GroupSizeLaw(**self.group_size_law)
        if self.group_size_law.max > self.max_block_txs:
            raise ValueError("group sizes larger than max_block_txs would always split")

    @classmethod
    def load(cls, path: str | Path) -> "BenchConfig":
        return cls(**json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {
            "total_txs": self.total_txs,
            "nodes": self.nodes,
            "difficulty_bits": self.difficulty_bits,
            "group_size_law": {"min": self.group_size_law.min, "max": self.group_size_law.max},
            "rng_seed": self.rng_seed,
            "submit_delay_ms": self.submit_delay_ms,
            "max_block_txs": self.max_block_txs,
            "batch_timeout_ms": self.batch_timeout_ms,
            "timeout_s": self.timeout_s,
        }
