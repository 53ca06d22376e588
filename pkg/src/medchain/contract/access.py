"""Access decisions against replayed contract state.

``check_access`` is a pure read: it matches the request path against every
permission route, then looks for a role of the user holding a matching
permission. The world is closed — no match means Deny. Ties break to the
lowest matching permission id and the lowest role id granting it, so every
node reports the identical witness.
"""

from __future__ import annotations

from dataclasses import dataclass

from medchain.contract.payload import INTID
from medchain.contract.state import ContractState


@dataclass(frozen=True)
class AccessDecision:
    verdict: str  # "Allow" | "Deny"
    matched_permission: int | None
    via_role: int | None
    reason: str

    @property
    def allowed(self) -> bool:
        return self.verdict == "Allow"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "matched_permission": self.matched_permission,
            "via_role": self.via_role,
            "reason": self.reason,
        }


def match_route(pattern: str, path: str) -> list[int] | None:
    """Segment-wise route match; returns captured <intid> values, or None.

    The trailing slash is significant: "/ct/list/42" does not match
    "/ct/list/<intid>/".
    """
    pattern_parts = pattern.split("/")
    path_parts = path.split("/")
    if len(pattern_parts) != len(path_parts):
        return None
    captures: list[int] = []
    for expected, got in zip(pattern_parts, path_parts):
        if expected == INTID:
            if not got.isdigit() or not got.isascii():
                return None
            captures.append(int(got))
        elif expected != got:
            return None
    return captures


def check_access(state: ContractState, user: str, action: str, path: str) -> AccessDecision:
    roles = state.user_roles.get(user)
    if not roles:
        return AccessDecision("Deny", None, None, "NoRoles")

    matching_perms = sorted(
        pid
        for pid, perm in state.permissions.items()
        if perm.action == action and match_route(perm.route, path) is not None
    )
    if not matching_perms:
        return AccessDecision("Deny", None, None, "NoMatchingPermission")

    for pid in matching_perms:
        granting = sorted(
            rid for rid in roles if pid in state.roles.get(rid, _NO_ROLE).permission_ids
        )
        if granting:
            return AccessDecision("Allow", pid, granting[0], "Granted")
    return AccessDecision("Deny", None, None, "NoMatchingRole")


class _NoRole:
    permission_ids: frozenset = frozenset()


_NO_ROLE = _NoRole()
