"""A connection to one peer: framed sends, request/reply correlation."""

from __future__ import annotations

import queue
import socket
import threading

from medchain.node import wire


class Peer:
    def __init__(self, sock: socket.socket, endpoint: str | None, inbound: bool) -> None:
        self.sock = sock
        self.endpoint = endpoint  # dialable host:port, None for inbound connections
        self.inbound = inbound
        self.alive = True
        self.faults = 0
        self._send_lock = threading.Lock()
        self._replies_lock = threading.Lock()
        self._replies: dict[tuple, queue.Queue] = {}
        sock.settimeout(30)
        try:
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        except OSError:
            pass

    def label(self) -> str:
        return self.endpoint or f"in:{id(self):x}"

    def send(self, message: dict) -> bool:
        if not self.alive:
            return False
        try:
            with self._send_lock:
                wire.send_message(self.sock, message)
            return True
        except OSError:
            self.close()
            return False

    def request(self, message: dict, reply_key: tuple, timeout: float = 10.0) -> dict | None:
        """Send and wait for the correlated reply; None on timeout/disconnect."""
        q: queue.Queue = queue.Queue(maxsize=1)
        with self._replies_lock:
            self._replies[reply_key] = q
        try:
            if not self.send(message):
                return None
            return q.get(timeout=timeout)  # close() delivers None to waiters
        except queue.Empty:
            return None
        finally:
            with self._replies_lock:
                self._replies.pop(reply_key, None)

    def deliver_reply(self, reply_key: tuple, message: dict) -> bool:
        """Route an incoming message to a waiting request, if any."""
        with self._replies_lock:
            q = self._replies.get(reply_key)
        if q is None:
            return False
        try:
            q.put_nowait(message)
        except queue.Full:
            pass
        return True

    def close(self) -> None:
        self.alive = False
        with self._replies_lock:
            waiting = list(self._replies.values())
        for q in waiting:
            try:
                q.put_nowait(None)
            except queue.Full:
                pass
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass
