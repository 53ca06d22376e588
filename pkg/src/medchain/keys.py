"""Ed25519 account keys and address derivation.

An account address is the first 20 bytes of SHA-256 over the raw 32-byte
public key, rendered as 40 lowercase hex characters.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)


def address_from_public_key(public_key: bytes) -> str:
    return hashlib.sha256(public_key).digest()[:20].hex()


@dataclass(frozen=True)
class KeyPair:
    """An Ed25519 keypair plus its derived chain address."""

    seed: bytes
    public_key: bytes
    address: str

    @classmethod
    def generate(cls) -> "KeyPair":
        priv = Ed25519PrivateKey.generate()
        return cls.from_seed(priv.private_bytes_raw())

    @classmethod
    def from_seed(cls, seed: bytes) -> "KeyPair":
        if len(seed) != 32:
            raise ValueError("ed25519 seed must be 32 bytes")
        priv = Ed25519PrivateKey.from_private_bytes(seed)
        pub = priv.public_key().public_bytes_raw()
        return cls(seed=seed, public_key=pub, address=address_from_public_key(pub))

    def sign(self, message: bytes) -> bytes:
        return Ed25519PrivateKey.from_private_bytes(self.seed).sign(message)

    def to_json(self) -> dict:
        return {
            "address": self.address,
            "public_key": self.public_key.hex(),
            "secret": self.seed.hex(),
        }


def verify_signature(public_key: bytes, signature: bytes, message: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


def load_key_directory(path: str | Path) -> dict[str, bytes]:
    """Load a key directory file: a JSON list of {address, public_key}."""
    entries = json.loads(Path(path).read_text())
    directory: dict[str, bytes] = {}
    for entry in entries:
        directory[entry["address"]] = bytes.fromhex(entry["public_key"])
    return directory
