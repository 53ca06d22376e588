"""Genesis configuration and the derived genesis block.

The genesis block is a pure function of the genesis file: its parent hash
commits to the canonical encoding of the whole configuration, so two
networks with different genesis files can never share a chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from medchain.encoding import canonical_dumps, is_address_hex, sha256_hex
from medchain.chain.merkle import merkle_root
from medchain.chain.types import Block, BlockHeader


class GenesisError(ValueError):
    """Malformed genesis content; the message names the offending field."""


@dataclass(frozen=True)
class Genesis:
    network_id: str
    difficulty_bits: int
    max_block_txs: int
    owner_address: str
    consortium: tuple[dict, ...]
    genesis_timestamp: int

    def to_json(self) -> dict:
        return {
            "network_id": self.network_id,
            "difficulty_bits": self.difficulty_bits,
            "max_block_txs": self.max_block_txs,
            "owner_address": self.owner_address,
            "consortium": [dict(m) for m in self.consortium],
            "genesis_timestamp": self.genesis_timestamp,
        }

    def canonical_encode(self) -> bytes:
        return canonical_dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: Any) -> "Genesis":
        if not isinstance(doc, dict):
            raise GenesisError("genesis must be a JSON object")
        required = {
            "network_id": str,
            "difficulty_bits": int,
            "max_block_txs": int,
            "owner_address": str,
            "consortium": list,
            "genesis_timestamp": int,
        }
        for name, kind in required.items():
            if name not in doc:
                raise GenesisError(f"genesis field missing: {name}")
            if not isinstance(doc[name], kind) or isinstance(doc[name], bool):
                raise GenesisError(f"genesis field {name}: expected {kind.__name__}")
        if not 0 <= doc["difficulty_bits"] <= 256:
            raise GenesisError("genesis field difficulty_bits: must be in [0, 256]")
        if doc["max_block_txs"] < 1:
            raise GenesisError("genesis field max_block_txs: must be >= 1")
        if not is_address_hex(doc["owner_address"]):
            raise GenesisError("genesis field owner_address: not a 40-char hex address")
        if doc["genesis_timestamp"] < 0:
            raise GenesisError("genesis field genesis_timestamp: must be >= 0")
        members = []
        for i, member in enumerate(doc["consortium"]):
            if not isinstance(member, dict) or set(member) != {"name", "address"}:
                raise GenesisError(f"genesis field consortium[{i}]: expected {{name, address}}")
            if not isinstance(member["name"], str) or not member["name"]:
                raise GenesisError(f"genesis field consortium[{i}].name: non-empty string required")
            if not is_address_hex(member["address"]):
                raise GenesisError(f"genesis field consortium[{i}].address: not a 40-char hex address")
            members.append({"name": member["name"], "address": member["address"]})
        return cls(
            network_id=doc["network_id"],
            difficulty_bits=doc["difficulty_bits"],
            max_block_txs=doc["max_block_txs"],
            owner_address=doc["owner_address"],
            consortium=tuple(members),
            genesis_timestamp=doc["genesis_timestamp"],
        )

    @classmethod
    def load(cls, path: str | Path) -> "Genesis":
        return cls.from_json(json.loads(Path(path).read_text()))


def genesis_block(genesis: Genesis) -> Block:
    """Derive the (unmined) genesis block from the genesis configuration."""
    header = BlockHeader(
        index=0,
        parent_hash=sha256_hex(genesis.canonical_encode()),
        merkle_root=merkle_root([]),
        difficulty=genesis.difficulty_bits,
        pow_nonce=0,
        timestamp=genesis.genesis_timestamp,
        miner=genesis.owner_address,
    )
    return Block(header=header, transactions=())
