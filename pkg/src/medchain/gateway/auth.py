"""Signed-request authentication for record routes.

Requests carry an ``X-Auth`` header: a JSON object with the caller's
address, a unix-millisecond timestamp, and an Ed25519 signature over
``METHOD\\npath\\ntimestamp``. The public key comes from the gateway's key
directory, falling back to the key observed on the caller's first chain
transaction.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from medchain.encoding import is_address_hex
from medchain.keys import KeyPair, verify_signature

MAX_SKEW_MS = 60_000


class AuthError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


@dataclass(frozen=True)
class AuthContext:
    address: str
    timestamp: int


def signing_message(method: str, path: str, timestamp: int) -> bytes:
    return f"{method.upper()}\n{path}\n{timestamp}".encode("utf-8")


def build_auth_header(key: KeyPair, method: str, path: str, timestamp: int | None = None) -> str:
    ts = int(time.time() * 1000) if timestamp is None else timestamp
    signature = key.sign(signing_message(method, path, ts))
    return json.dumps({"address": key.address, "timestamp": ts, "signature": signature.hex()})


def verify_auth_header(
    header: str | None,
    method: str,
    path: str,
    lookup_key,
    now_ms: int | None = None,
) -> AuthContext:
    """Validate X-Auth; ``lookup_key(address)`` returns the public key bytes."""
    if not header:
        raise AuthError("missing X-Auth header")
    try:
        doc = json.loads(header)
        address = doc["address"]
        timestamp = doc["timestamp"]
        signature = bytes.fromhex(doc["signature"])
    except (ValueError, KeyError, TypeError) as exc:
        raise AuthError(f"malformed X-Auth header: {exc}") from exc
    if not is_address_hex(address) or not isinstance(timestamp, int):
        raise AuthError("malformed X-Auth fields")
    now = int(time.time() * 1000) if now_ms is None else now_ms
    if abs(now - timestamp) > MAX_SKEW_MS:
        raise AuthError("timestamp outside the +/-60s window")
    public_key = lookup_key(address)
    if public_key is None:
        raise AuthError("no registered public key for address")
    if not verify_signature(public_key, signature, signing_message(method, path, timestamp)):
        raise AuthError("bad signature")
    return AuthContext(address=address, timestamp=timestamp)
