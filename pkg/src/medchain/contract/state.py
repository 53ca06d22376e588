"""The deterministic RBAC state machine.

State is a pure function of the chain: the genesis file bootstraps the
owner and consortium delegates, and every accepted transaction applies one
mutation and appends one event. Rejected transactions leave the state
untouched; all checks run before any mutation.

Authorization mirrors the delegation contract: only the owner manages the
delegates map (and removal is an unconditional set-to-false), while any
current delegate or the owner may manage permissions, roles, assignments
and view templates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from medchain.chain.genesis import Genesis
from medchain.chain.types import Transaction
from medchain.encoding import canonical_dumps
from medchain.contract.payload import MalformedPayload, validate_payload


class TxRejected(Exception):
    """Transaction refused by the contract; ``code`` is machine-readable."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code
        self.detail = detail


@dataclass
class Permission:
    name: str
    route: str
    action: str

    def to_json(self) -> dict:
        return {"name": self.name, "route": self.route, "action": self.action}


@dataclass
class Role:
    name: str
    permission_ids: set[int] = field(default_factory=set)

    def to_json(self) -> dict:
        return {"name": self.name, "permission_ids": sorted(self.permission_ids)}


@dataclass(frozen=True)
class Event:
    kind: str
    subject: str
    block_index: int
    tx_id: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject,
            "block_index": self.block_index,
            "tx_id": self.tx_id,
        }


@dataclass
class ContractState:
    owner: str
    delegates: dict[str, bool] = field(default_factory=dict)
    permissions: dict[int, Permission] = field(default_factory=dict)
    roles: dict[int, Role] = field(default_factory=dict)
    user_roles: dict[str, set[int]] = field(default_factory=dict)
    view_templates: dict[int, list[str]] = field(default_factory=dict)
    nonces: dict[str, int] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "owner": self.owner,
            "delegates": dict(sorted(self.delegates.items())),
            "permissions": {str(pid): p.to_json() for pid, p in sorted(self.permissions.items())},
            "roles": {str(rid): r.to_json() for rid, r in sorted(self.roles.items())},
            "user_roles": {a: sorted(rids) for a, rids in sorted(self.user_roles.items())},
            "view_templates": {str(rid): list(f) for rid, f in sorted(self.view_templates.items())},
            "nonces": dict(sorted(self.nonces.items())),
            "events": [e.to_json() for e in self.events],
        }

    def canonical_encode(self) -> bytes:
        return canonical_dumps(self.to_json())

    def next_nonce(self, address: str) -> int:
        return self.nonces.get(address, 0)

    def is_delegate(self, address: str) -> bool:
        return self.delegates.get(address, False)


def genesis_state(genesis: Genesis) -> ContractState:
    state = ContractState(owner=genesis.owner_address)
    for member in genesis.consortium:
        state.delegates[member["address"]] = True
    return state


_EVENT_KINDS = {
    "AddDelegate": "DelegateAdded",
    "RemoveDelegate": "DelegateRemoved",
    "DefinePermission": "PermissionDefined",
    "DefineRole": "RoleDefined",
    "GrantPermissionToRole": "PermissionGranted",
    "RevokePermissionFromRole": "PermissionRevoked",
    "AssignRole": "RoleAssigned",
    "RevokeRole": "RoleRevoked",
    "DefineViewTemplate": "ViewTemplateDefined",
}


def apply_tx(state: ContractState, tx: Transaction, block_index: int) -> Event:
    """Apply one transaction in place; raises ``TxRejected`` without mutating.

    Check order: nonce, payload schema, authorization, referential targets.
    The caller is responsible for signature verification (chain layer).
    """
    payload = tx.payload
    if tx.nonce != state.next_nonce(tx.sender):
        raise TxRejected("BadNonce", f"expected {state.next_nonce(tx.sender)}, got {tx.nonce}")

    try:
        ptype = validate_payload(payload)
    except MalformedPayload as exc:
        raise TxRejected("MalformedPayload", str(exc)) from exc

    if ptype in ("AddDelegate", "RemoveDelegate"):
        if tx.sender != state.owner:
            raise TxRejected("Unauthorized", "delegate management is owner-only")
    else:
        if tx.sender != state.owner and not state.is_delegate(tx.sender):
            raise TxRejected("Unauthorized", f"{tx.sender} is neither owner nor delegate")

    if ptype in ("GrantPermissionToRole", "AssignRole", "DefineViewTemplate"):
        if payload["role_id"] not in state.roles:
            raise TxRejected("UnknownId", f"role {payload['role_id']} not defined")
    if ptype == "GrantPermissionToRole" and payload["perm_id"] not in state.permissions:
        raise TxRejected("UnknownId", f"permission {payload['perm_id']} not defined")

    # All checks passed; mutate and record.
    subject: str
    if ptype == "AddDelegate":
        state.delegates[payload["addr"]] = True
        subject = payload["addr"]
    elif ptype == "RemoveDelegate":
        # Unconditional set-to-false: removal of a never-delegate still lands.
        state.delegates[payload["addr"]] = False
        subject = payload["addr"]
    elif ptype == "DefinePermission":
        state.permissions[payload["perm_id"]] = Permission(
            name=payload["name"], route=payload["route"], action=payload["action"]
        )
        subject = str(payload["perm_id"])
    elif ptype == "DefineRole":
        existing = state.roles.get(payload["role_id"])
        perm_ids = existing.permission_ids if existing else set()
        state.roles[payload["role_id"]] = Role(name=payload["name"], permission_ids=perm_ids)
        subject = str(payload["role_id"])
    elif ptype == "GrantPermissionToRole":
        state.roles[payload["role_id"]].permission_ids.add(payload["perm_id"])
        subject = str(payload["role_id"])
    elif ptype == "RevokePermissionFromRole":
        # Revocation is unconditional, like delegate removal: a missing role
        # or ungranted permission is a no-op that still lands and logs.
        role = state.roles.get(payload["role_id"])
        if role is not None:
            role.permission_ids.discard(payload["perm_id"])
        subject = str(payload["role_id"])
    elif ptype == "AssignRole":
        state.user_roles.setdefault(payload["user"], set()).add(payload["role_id"])
        subject = payload["user"]
    elif ptype == "RevokeRole":
        rids = state.user_roles.get(payload["user"])
        if rids is not None:
            rids.discard(payload["role_id"])
            if not rids:
                del state.user_roles[payload["user"]]
        subject = payload["user"]
    else:  # DefineViewTemplate
        state.view_templates[payload["role_id"]] = list(payload["fields"])
        subject = str(payload["role_id"])

    state.nonces[tx.sender] = tx.nonce + 1
    event = Event(kind=_EVENT_KINDS[ptype], subject=subject, block_index=block_index, tx_id=tx.tx_id)
    state.events.append(event)
    return event
