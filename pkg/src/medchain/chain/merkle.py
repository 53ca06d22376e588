"""Merkle commitment over transaction ids.

The tree reduces pairwise with SHA-256 over the concatenated child digests.
An odd level duplicates its last element; the empty sequence commits to
SHA-256 of the empty byte string.
"""

from __future__ import annotations

import hashlib


def merkle_root(ids: list[str]) -> str:
    """Root over 32-byte hashes given as 64-char hex strings."""
    if not ids:
        return hashlib.sha256(b"").hexdigest()
    level = [bytes.fromhex(h) for h in ids]
    if len(level) == 1:
        return hashlib.sha256(level[0] + level[0]).hexdigest()
    while len(level) > 1:
        if len(level) % 2 == 1:
            level.append(level[-1])
        level = [
            hashlib.sha256(level[i] + level[i + 1]).digest()
            for i in range(0, len(level), 2)
        ]
    return level[0].hex()
