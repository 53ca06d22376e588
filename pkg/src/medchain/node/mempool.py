"""Mempool: pending transactions awaiting inclusion.

Per sender, the pending queue holds a gap-free nonce run starting at the
chain's next expected nonce; arrivals with a nonce gap park in a future
queue until the gap closes. Arrival order is preserved, so drafting the
first N pending transactions is automatically nonce-respecting.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from typing import Callable, Iterable

from medchain.chain.types import Transaction


class Mempool:
    def __init__(self) -> None:
        self.pending: OrderedDict[str, Transaction] = OrderedDict()
        self.future: dict[str, dict[int, Transaction]] = {}
        self._pending_count: dict[str, int] = {}
        self.oldest_pending_at: float | None = None
        self.last_push_at: float | None = None

    def __len__(self) -> int:
        return len(self.pending)

    def __contains__(self, tx_id: str) -> bool:
        if tx_id in self.pending:
            return True
        return any(tx.tx_id == tx_id for queue in self.future.values() for tx in queue.values())

    def next_pending_nonce(self, sender: str, chain_next: int) -> int:
        return chain_next + self._pending_count.get(sender, 0)

    def admit(self, tx: Transaction, chain_next: Callable[[str], int]) -> str | None:
        """Admit a signature-checked transaction; returns a rejection code or None."""
        if tx.tx_id in self:
            return "DuplicateTx"
        base = chain_next(tx.sender)
        if tx.nonce < base:
            return "StaleNonce"
        expected = self.next_pending_nonce(tx.sender, base)
        if tx.nonce < expected:
            return "StaleNonce"  # nonce already occupied in the pool
        if tx.nonce == expected:
            self._push(tx)
            self._promote(tx.sender, chain_next)
            return None
        queue = self.future.setdefault(tx.sender, {})
        if tx.nonce in queue:
            return "StaleNonce"
        queue[tx.nonce] = tx
        return None

    def _push(self, tx: Transaction) -> None:
        self.pending[tx.tx_id] = tx
        self._pending_count[tx.sender] = self._pending_count.get(tx.sender, 0) + 1
        self.last_push_at = time.monotonic()
        if self.oldest_pending_at is None:
            self.oldest_pending_at = self.last_push_at

    def _promote(self, sender: str, chain_next: Callable[[str], int]) -> None:
        queue = self.future.get(sender)
        if not queue:
            return
        expected = self.next_pending_nonce(sender, chain_next(sender))
        while expected in queue:
            self._push(queue.pop(expected))
            expected += 1
        if not queue:
            del self.future[sender]

    def draft(self, max_txs: int) -> list[Transaction]:
        return list(self.pending.values())[:max_txs]

    def remove_included(self, txs: Iterable[Transaction], chain_next: Callable[[str], int]) -> None:
        """Drop included/overtaken transactions after the chain advanced."""
        for tx in txs:
            self._drop(tx.tx_id)
        # Nonces consumed by the chain invalidate any pending tx below them.
        for tx_id, tx in list(self.pending.items()):
            if tx.nonce < chain_next(tx.sender):
                self._drop(tx_id)
        for sender, queue in list(self.future.items()):
            for nonce in [n for n in queue if n < chain_next(sender)]:
                del queue[nonce]
            if not queue:
                del self.future[sender]
        for sender in list(self.future):
            self._promote(sender, chain_next)
        if not self.pending:
            self.oldest_pending_at = None

    def _drop(self, tx_id: str) -> None:
        tx = self.pending.pop(tx_id, None)
        if tx is not None:
            self._pending_count[tx.sender] -= 1
            if self._pending_count[tx.sender] == 0:
                del self._pending_count[tx.sender]
        if not self.pending:
            self.oldest_pending_at = None
