"""Transactions, block headers and blocks with canonical encodings.

Block headers and transactions are content-addressed: their identity is the
SHA-256 of their canonical JSON encoding. Transactions are signed over the
same encoding with the signature field omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

from medchain.encoding import (
    canonical_dumps,
    is_address_hex,
    is_hash_hex,
    sha256_hex,
)
from medchain.keys import KeyPair, address_from_public_key, verify_signature


class DecodeError(ValueError):
    """Raised when raw JSON does not decode to a well-formed chain object."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DecodeError(msg)


@dataclass(frozen=True)
class Transaction:
    """A signed, nonce-sequenced envelope carrying one RBAC payload."""

    sender: str
    nonce: int
    payload: dict
    timestamp: int
    public_key: bytes
    signature: bytes

    def to_json(self) -> dict:
        return {
            "sender": self.sender,
            "nonce": self.nonce,
            "payload": self.payload,
            "timestamp": self.timestamp,
            "public_key": self.public_key.hex(),
            "signature": self.signature.hex(),
        }

    def signing_bytes(self) -> bytes:
        doc = self.to_json()
        del doc["signature"]
        return canonical_dumps(doc)

    def canonical_encode(self) -> bytes:
        return canonical_dumps(self.to_json())

    @property
    def tx_id(self) -> str:
        return sha256_hex(self.canonical_encode())

    def verify_signature(self) -> bool:
        if address_from_public_key(self.public_key) != self.sender:
            return False
        return verify_signature(self.public_key, self.signature, self.signing_bytes())

    @classmethod
    def from_json(cls, doc: Any) -> "Transaction":
        _require(isinstance(doc, dict), "transaction must be an object")
        expected = {"sender", "nonce", "payload", "timestamp", "public_key", "signature"}
        _require(set(doc) == expected, f"transaction fields must be {sorted(expected)}")
        _require(is_address_hex(doc["sender"]), "sender must be a 40-char hex address")
        _require(isinstance(doc["nonce"], int) and doc["nonce"] >= 0, "nonce must be >= 0")
        _require(isinstance(doc["payload"], dict), "payload must be an object")
        _require(isinstance(doc["timestamp"], int) and doc["timestamp"] >= 0, "bad timestamp")
        for key in ("public_key", "signature"):
            _require(isinstance(doc[key], str), f"{key} must be a hex string")
        try:
            public_key = bytes.fromhex(doc["public_key"])
            signature = bytes.fromhex(doc["signature"])
        except ValueError as exc:
            raise DecodeError(f"bad hex field: {exc}") from exc
        return cls(
            sender=doc["sender"],
            nonce=doc["nonce"],
            payload=doc["payload"],
            timestamp=doc["timestamp"],
            public_key=public_key,
            signature=signature,
        )

    @classmethod
    def build(
        cls,
        key: KeyPair,
        nonce: int,
        payload: dict,
        timestamp: int,
    ) -> "Transaction":
        """Construct and sign a transaction with ``key``."""
        tx = cls(
            sender=key.address,
            nonce=nonce,
            payload=payload,
            timestamp=timestamp,
            public_key=key.public_key,
            signature=b"",
        )
        return replace(tx, signature=key.sign(tx.signing_bytes()))


@dataclass(frozen=True)
class BlockHeader:
    index: int
    parent_hash: str
    merkle_root: str
    difficulty: int
    pow_nonce: int
    timestamp: int
    miner: str

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "parent_hash": self.parent_hash,
            "merkle_root": self.merkle_root,
            "difficulty": self.difficulty,
            "pow_nonce": self.pow_nonce,
            "timestamp": self.timestamp,
            "miner": self.miner,
        }

    def canonical_encode(self) -> bytes:
        return canonical_dumps(self.to_json())

    @property
    def block_hash(self) -> str:
        return sha256_hex(self.canonical_encode())

    @classmethod
    def from_json(cls, doc: Any) -> "BlockHeader":
        _require(isinstance(doc, dict), "header must be an object")
        expected = {"index", "parent_hash", "merkle_root", "difficulty", "pow_nonce", "timestamp", "miner"}
        _require(set(doc) == expected, f"header fields must be {sorted(expected)}")
        for key in ("index", "difficulty", "pow_nonce", "timestamp"):
            _require(isinstance(doc[key], int) and doc[key] >= 0, f"{key} must be a non-negative int")
        _require(doc["difficulty"] <= 256, "difficulty must be <= 256")
        _require(is_hash_hex(doc["parent_hash"]), "parent_hash must be a 64-char hex hash")
        _require(is_hash_hex(doc["merkle_root"]), "merkle_root must be a 64-char hex hash")
        _require(is_address_hex(doc["miner"]), "miner must be a 40-char hex address")
        return cls(
            index=doc["index"],
            parent_hash=doc["parent_hash"],
            merkle_root=doc["merkle_root"],
            difficulty=doc["difficulty"],
            pow_nonce=doc["pow_nonce"],
            timestamp=doc["timestamp"],
            miner=doc["miner"],
        )


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    transactions: tuple[Transaction, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "header": self.header.to_json(),
            "transactions": [tx.to_json() for tx in self.transactions],
        }

    def canonical_encode(self) -> bytes:
        return canonical_dumps(self.to_json())

    @property
    def block_hash(self) -> str:
        return self.header.block_hash

    @property
    def tx_ids(self) -> list[str]:
        return [tx.tx_id for tx in self.transactions]

    @classmethod
    def from_json(cls, doc: Any) -> "Block":
        _require(isinstance(doc, dict), "block must be an object")
        _require(set(doc) == {"header", "transactions"}, "block fields must be header, transactions")
        _require(isinstance(doc["transactions"], list), "transactions must be a list")
        header = BlockHeader.from_json(doc["header"])
        txs = tuple(Transaction.from_json(t) for t in doc["transactions"])
        return cls(header=header, transactions=txs)
