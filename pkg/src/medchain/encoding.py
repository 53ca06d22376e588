"""Canonical JSON encoding used for hashing and signing.

Every hashed or signed object in the system is serialised the same way:
keys sorted lexicographically, no whitespace, integers in base 10, byte
fields rendered as lowercase hex strings. The encoding is deterministic, so
replaying it on any node yields byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

HASH_HEX_LEN = 64
ADDRESS_HEX_LEN = 40

ZERO_HASH = "0" * HASH_HEX_LEN


def canonical_dumps(obj: Any) -> bytes:
    """Serialise ``obj`` to canonical JSON bytes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("utf-8")


def canonical_loads(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_bytes(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def is_hex(value: str, length: int | None = None) -> bool:
    """True iff ``value`` is a lowercase hex string (of ``length`` chars if given)."""
    if length is not None and len(value) != length:
        return False
    if len(value) % 2 != 0:
        return False
    return all(c in "0123456789abcdef" for c in value)


def is_hash_hex(value: Any) -> bool:
    return isinstance(value, str) and is_hex(value, HASH_HEX_LEN)


def is_address_hex(value: Any) -> bool:
    return isinstance(value, str) and is_hex(value, ADDRESS_HEX_LEN)
