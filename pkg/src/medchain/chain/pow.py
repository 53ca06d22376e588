"""Proof-of-work target checks and the nonce search.

A sealed header's SHA-256 must start with ``difficulty`` zero bits. The
search iterates the nonce from 0 upward, so sealing is deterministic for a
given template. Callers bound the search with an attempt budget to keep
cancellation and tip checks responsive.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import replace

from medchain.chain.types import BlockHeader

_NONCE_KEY = b'"pow_nonce":'


def meets_difficulty(block_hash: str | bytes, difficulty: int) -> bool:
    """True iff the first ``difficulty`` bits of the hash are zero."""
    if not 0 <= difficulty <= 256:
        raise ValueError("difficulty must be in [0, 256]")
    if difficulty == 0:
        return True
    digest = bytes.fromhex(block_hash) if isinstance(block_hash, str) else block_hash
    return int.from_bytes(digest, "big") >> (256 - difficulty) == 0


def _nonce_split(template: BlockHeader) -> tuple[bytes, bytes]:
    # The canonical encoding is compact JSON with sorted keys, so the nonce
    # value sits between a fixed prefix and suffix; hashing candidates avoids
    # re-serialising the whole header per attempt.
    encoded = replace(template, pow_nonce=0).canonical_encode()
    marker = _NONCE_KEY + b"0"
    at = encoded.index(marker)
    return encoded[: at + len(_NONCE_KEY)], encoded[at + len(marker):]


def mine(
    template: BlockHeader,
    budget: int | None = None,
    start_nonce: int = 0,
) -> BlockHeader | None:
    """Search for a sealing nonce; ``None`` means the budget was exhausted.

    On exhaustion the caller may resume from ``start_nonce + budget`` or
    refresh the template (new timestamp) and restart.
    """
    difficulty = template.difficulty
    if difficulty == 0:
        return replace(template, pow_nonce=start_nonce)
    prefix, suffix = _nonce_split(template)
    target = (1 << (256 - difficulty)).to_bytes(32, "big")
    sha256 = hashlib.sha256
    nonce = start_nonce
    end = None if budget is None else start_nonce + budget
    while end is None or nonce < end:
        digest = sha256(prefix + str(nonce).encode() + suffix).digest()
        if digest < target:
            return replace(template, pow_nonce=nonce)
        nonce += 1
    return None


def measure_hash_rate(probe_ms: int, template: BlockHeader | None = None) -> float:
    """Attempts per second of the sealing loop, measured over ``probe_ms``."""
    if probe_ms < 100:
        raise ValueError("probe must be at least 100 ms")
    if template is None:
        template = BlockHeader(
            index=1,
            parent_hash="11" * 32,
            merkle_root="22" * 32,
            difficulty=256,
            pow_nonce=0,
            timestamp=0,
            miner="33" * 20,
        )
    prefix, suffix = _nonce_split(template)
    sha256 = hashlib.sha256
    deadline = time.perf_counter() + probe_ms / 1000.0
    attempts = 0
    batch = 5000
    start = time.perf_counter()
    while time.perf_counter() < deadline:
        for nonce in range(attempts, attempts + batch):
            sha256(prefix + str(nonce).encode() + suffix).digest()
        attempts += batch
    elapsed = time.perf_counter() - start
    return attempts / elapsed
