"""Structural block and chain validation.

``validate_block`` returns every violation, not just the first, each with a
machine-readable code. Chain validation folds it over consecutive blocks
after pinning the genesis block to the genesis configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

from medchain.chain.genesis import Genesis, genesis_block
from medchain.chain.merkle import merkle_root
from medchain.chain.pow import meets_difficulty
from medchain.chain.types import Block


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


def validate_block(block: Block, parent: Block, genesis: Genesis) -> list[Violation]:
    """Check a sealed block against its parent; empty list means ok."""
    violations: list[Violation] = []
    header = block.header

    if header.index != parent.header.index + 1:
        violations.append(Violation("BadIndex", f"index {header.index} after parent {parent.header.index}"))
    if header.parent_hash != parent.block_hash:
        violations.append(Violation("BadLink", f"parent_hash {header.parent_hash} != {parent.block_hash}"))
    if header.difficulty != genesis.difficulty_bits:
        violations.append(
            Violation("BadPow", f"difficulty {header.difficulty} != network {genesis.difficulty_bits}")
        )
    if not meets_difficulty(header.block_hash, header.difficulty):
        violations.append(Violation("BadPow", f"hash {header.block_hash} misses {header.difficulty} bits"))
    expected_root = merkle_root(block.tx_ids)
    if header.merkle_root != expected_root:
        violations.append(Violation("BadMerkle", f"merkle_root {header.merkle_root} != {expected_root}"))
    if header.timestamp < parent.header.timestamp:
        violations.append(
            Violation("BadTime", f"timestamp {header.timestamp} before parent {parent.header.timestamp}")
        )
    if len(block.transactions) > genesis.max_block_txs:
        violations.append(
            Violation("TooManyTxs", f"{len(block.transactions)} txs > limit {genesis.max_block_txs}")
        )
    for tx in block.transactions:
        if not tx.verify_signature():
            violations.append(Violation("BadSig", f"tx {tx.tx_id} signature invalid"))
    return violations


def validate_chain(blocks: list[Block], genesis: Genesis) -> list[Violation]:
    """Validate a full chain starting at the genesis block."""
    if not blocks:
        return [Violation("BadIndex", "empty chain")]
    expected_genesis = genesis_block(genesis)
    violations: list[Violation] = []
    if blocks[0].block_hash != expected_genesis.block_hash:
        violations.append(
            Violation("BadLink", "genesis block does not match genesis configuration")
        )
    for previous, current in zip(blocks, blocks[1:]):
        violations.extend(validate_block(current, previous, genesis))
    return violations
