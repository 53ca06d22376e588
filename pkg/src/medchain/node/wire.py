"""Length-prefixed JSON wire protocol between consortium nodes.

Frames are a 4-byte big-endian length followed by a JSON message object
with a ``type`` tag: Hello, Tx, Block, GetHeaders, Headers, GetBlock.
"""

from __future__ import annotations

import json
import socket
import struct
from typing import Any

MAX_FRAME = 8 * 1024 * 1024

MESSAGE_TYPES = ("Hello", "Tx", "Block", "GetHeaders", "Headers", "GetBlock")


class WireError(Exception):
    pass


def hello(network_id: str, tip_hash: str, height: int, listen: str | None = None) -> dict:
    return {
        "type": "Hello",
        "network_id": network_id,
        "tip_hash": tip_hash,
        "height": height,
        "listen": listen,
    }


def tx_msg(transaction: dict) -> dict:
    return {"type": "Tx", "transaction": transaction}


def block_msg(block: dict) -> dict:
    return {"type": "Block", "block": block}


def get_headers(from_hash: str, count: int) -> dict:
    return {"type": "GetHeaders", "from_hash": from_hash, "count": count}


def headers_msg(from_hash: str, headers: list[dict]) -> dict:
    return {"type": "Headers", "from_hash": from_hash, "headers": headers}


def get_block(block_hash: str) -> dict:
    return {"type": "GetBlock", "hash": block_hash}


def send_message(sock: socket.socket, message: dict) -> None:
    data = json.dumps(message, separators=(",", ":")).encode("utf-8")
    if len(data) > MAX_FRAME:
        raise WireError(f"frame too large: {len(data)}")
    sock.sendall(struct.pack(">I", len(data)) + data)


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("peer closed connection")
        buf.extend(chunk)
    return bytes(buf)


def recv_message(sock: socket.socket) -> dict:
    (length,) = struct.unpack(">I", _recv_exact(sock, 4))
    if length > MAX_FRAME:
        raise WireError(f"frame too large: {length}")
    payload = _recv_exact(sock, length)
    try:
        message = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError(f"bad frame: {exc}") from exc
    if not isinstance(message, dict) or message.get("type") not in MESSAGE_TYPES:
        raise WireError(f"unknown message type: {message!r}")
    return message


def message_summary(message: Any) -> str:
    if not isinstance(message, dict):
        return repr(message)
    kind = message.get("type")
    if kind == "Hello":
        return f"Hello(height={message.get('height')})"
    if kind == "Block":
        return f"Block({message.get('block', {}).get('header', {}).get('index')})"
    return str(kind)
