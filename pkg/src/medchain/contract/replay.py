"""Full-chain replay of the contract state.

Replay folds ``apply_tx`` over every transaction in block order. A block may
carry transactions the contract rejects (miners enforce only structural
rules), so rejections are skipped deterministically and recorded in a
rejection log for audit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from medchain.chain.genesis import Genesis
from medchain.chain.types import Block
from medchain.contract.state import ContractState, TxRejected, apply_tx, genesis_state


@dataclass(frozen=True)
class Rejection:
    tx_id: str
    block_index: int
    code: str

    def to_json(self) -> dict:
        return {"tx_id": self.tx_id, "block_index": self.block_index, "code": self.code}


@dataclass
class ReplayResult:
    state: ContractState
    rejections: list[Rejection]


def apply_block(state: ContractState, block: Block) -> list[Rejection]:
    """Apply one block's transactions in order, collecting rejections."""
    rejections = []
    for tx in block.transactions:
        try:
            apply_tx(state, tx, block.header.index)
        except TxRejected as exc:
            rejections.append(Rejection(tx.tx_id, block.header.index, exc.code))
    return rejections


def replay(blocks: Iterable[Block], genesis: Genesis) -> ReplayResult:
    """Fold the chain into contract state; genesis-only input yields genesis state."""
    state = genesis_state(genesis)
    rejections: list[Rejection] = []
    for block in blocks:
        if block.header.index == 0:
            continue
        rejections.extend(apply_block(state, block))
    return ReplayResult(state=state, rejections=rejections)


def write_rejection_log(rejections: Iterable[Rejection], path) -> None:
    """JSON-lines rejection log: one {tx_id, block_index, code} per line."""
    with open(path, "w") as fh:
        for rej in rejections:
            fh.write(json.dumps(rej.to_json(), sort_keys=True) + "\n")
