from medchain.contract.payload import (
    MalformedPayload,
    PAYLOAD_TYPES,
    payloads,
    validate_payload,
    validate_route_pattern,
)
from medchain.contract.state import (
    ContractState,
    Event,
    Permission,
    Role,
    TxRejected,
    apply_tx,
    genesis_state,
)
from medchain.contract.access import AccessDecision, check_access, match_route
from medchain.contract.replay import Rejection, ReplayResult, replay

__all__ = [
    "MalformedPayload",
    "PAYLOAD_TYPES",
    "payloads",
    "validate_payload",
    "validate_route_pattern",
    "ContractState",
    "Event",
    "Permission",
    "Role",
    "TxRejected",
    "apply_tx",
    "genesis_state",
    "AccessDecision",
    "check_access",
    "match_route",
    "Rejection",
    "ReplayResult",
    "replay",
]
