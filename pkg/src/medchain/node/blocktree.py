"""Block tree with cumulative-work canonical-tip selection.

All valid blocks live in the tree; the canonical chain is the branch with
maximum cumulative work (2^difficulty per block), ties broken toward the
lexicographically smallest tip hash — the same rule every node applies.
"""

from __future__ import annotations

from medchain.chain.forkchoice import _inverted_hash
from medchain.chain.types import Block


class BlockTree:
    def __init__(self, genesis: Block) -> None:
        g_hash = genesis.block_hash
        self.genesis_hash = g_hash
        self.blocks: dict[str, Block] = {g_hash: genesis}
        self.children: dict[str, list[str]] = {g_hash: []}
        self.work: dict[str, int] = {g_hash: 1 << genesis.header.difficulty}
        self.tips: set[str] = {g_hash}

    def __contains__(self, block_hash: str) -> bool:
        return block_hash in self.blocks

    def get(self, block_hash: str) -> Block | None:
        return self.blocks.get(block_hash)

    def insert(self, block: Block) -> None:
        """Insert a validated block whose parent is present."""
        parent_hash = block.header.parent_hash
        if parent_hash not in self.blocks:
            raise KeyError(f"unknown parent {parent_hash}")
        block_hash = block.block_hash
        if block_hash in self.blocks:
            return
        self.blocks[block_hash] = block
        self.children[block_hash] = []
        self.children[parent_hash].append(block_hash)
        self.work[block_hash] = self.work[parent_hash] + (1 << block.header.difficulty)
        self.tips.discard(parent_hash)
        self.tips.add(block_hash)

    def best_tip(self) -> str:
        return max(self.tips, key=lambda h: (self.work[h], _inverted_hash(h)))

    def height_of(self, block_hash: str) -> int:
        return self.blocks[block_hash].header.index

    def chain_to(self, tip_hash: str) -> list[Block]:
        """Blocks from genesis to ``tip_hash`` inclusive."""
        chain: list[Block] = []
        cursor = tip_hash
        while True:
            block = self.blocks[cursor]
            chain.append(block)
            if cursor == self.genesis_hash:
                break
            cursor = block.header.parent_hash
        chain.reverse()
        return chain

    def headers_back(self, from_hash: str, count: int) -> list[Block]:
        """Up to ``count`` blocks walking back from ``from_hash`` inclusive."""
        out: list[Block] = []
        cursor = from_hash
        while cursor in self.blocks and len(out) < count:
            block = self.blocks[cursor]
            out.append(block)
            if cursor == self.genesis_hash:
                break
            cursor = block.header.parent_hash
        return out

    def fork_point(self, tip_a: str, tip_b: str) -> str:
        """Hash of the deepest common ancestor of two tips."""
        seen = set()
        cursor = tip_a
        while True:
            seen.add(cursor)
            if cursor == self.genesis_hash:
                break
            cursor = self.blocks[cursor].header.parent_hash
        cursor = tip_b
        while cursor not in seen:
            cursor = self.blocks[cursor].header.parent_hash
        return cursor

    def blocks_since(self, tip_hash: str, ancestor_hash: str) -> list[Block]:
        """Blocks strictly after ``ancestor_hash`` up to ``tip_hash``, ascending."""
        out: list[Block] = []
        cursor = tip_hash
        while cursor != ancestor_hash:
            block = self.blocks[cursor]
            out.append(block)
            cursor = block.header.parent_hash
        out.reverse()
        return out
