"""Append-only block store under the node's data directory.

One canonical-encoded JSON block per line, appended in acceptance order so
parents always precede children. Loading re-checks that every stored line
is byte-identical to the canonical encoding of the block it decodes to:
any single-byte mutation of the file fails startup validation, either as a
parse error or as a round-trip/hash mismatch.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

from medchain.chain.types import Block, DecodeError


class StoreCorrupt(Exception):
    pass


class BlockStore:
    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.blocks_path = self.data_dir / "blocks.jsonl"

    def copy_genesis(self, genesis_path: str | Path) -> None:
        target = self.data_dir / "genesis.json"
        if Path(genesis_path) != target:
            shutil.copyfile(genesis_path, target)

    def append(self, block: Block) -> None:
        with self.blocks_path.open("ab") as fh:
            fh.write(block.canonical_encode() + b"\n")

    def load(self) -> list[Block]:
        """All stored blocks in append order; raises StoreCorrupt on tampering."""
        if not self.blocks_path.exists():
            return []
        blocks: list[Block] = []
        with self.blocks_path.open("rb") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip(b"\n")
                if not line:
                    continue
                try:
                    block = Block.from_json(json.loads(line.decode("utf-8")))
                except (UnicodeDecodeError, ValueError, DecodeError) as exc:
                    raise StoreCorrupt(f"{self.blocks_path}:{lineno}: {exc}") from exc
                if block.canonical_encode() != line:
                    raise StoreCorrupt(
                        f"{self.blocks_path}:{lineno}: stored bytes are not canonical"
                    )
                blocks.append(block)
        return blocks
