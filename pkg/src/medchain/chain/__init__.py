from medchain.chain.types import Block, BlockHeader, Transaction
from medchain.chain.merkle import merkle_root
from medchain.chain.pow import meets_difficulty, mine
from medchain.chain.genesis import Genesis, genesis_block
from medchain.chain.validate import Violation, validate_block, validate_chain
from medchain.chain.forkchoice import EmptyForkSet, chain_work, fork_choice

__all__ = [
    "Block",
    "BlockHeader",
    "Transaction",
    "merkle_root",
    "meets_difficulty",
    "mine",
    "Genesis",
    "genesis_block",
    "Violation",
    "validate_block",
    "validate_chain",
    "EmptyForkSet",
    "chain_work",
    "fork_choice",
]
