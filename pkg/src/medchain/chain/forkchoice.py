"""Deterministic fork choice over competing valid chains.

The canonical branch is the one with maximum cumulative work, where each
block contributes 2^difficulty. Ties break toward the lexicographically
smallest tip hash so every node resolves identically.
"""

from __future__ import annotations

from medchain.chain.types import Block


class EmptyForkSet(ValueError):
    """fork_choice was given no branches to choose from."""


def chain_work(blocks: list[Block]) -> int:
    return sum(1 << b.header.difficulty for b in blocks)


def fork_choice(branches: list[list[Block]]) -> list[Block]:
    """Select the canonical branch among valid chains sharing a genesis."""
    if not branches:
        raise EmptyForkSet("no branches")
    # max work first; tie-break on smaller tip hash (reversed for max()).
    return max(branches, key=lambda c: (chain_work(c), _inverted_hash(c[-1].block_hash)))


def _inverted_hash(block_hash: str) -> str:
    # Maps each hex digit to its complement so max() prefers smaller hashes.
    table = "fedcba9876543210"
    return "".join(table[int(c, 16)] for c in block_hash)
