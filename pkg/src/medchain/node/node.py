"""Consortium node runtime.

One logical writer (the lock) guards the block tree, contract state and
mempool. Network readers, the miner and sync helpers run on their own
threads and take the lock only for short mutations; proof-of-work search
happens in bounded slices so tip changes are observed promptly.
"""

from __future__ import annotations

import json
import logging
import socket
import threading
import time
from collections import OrderedDict
from pathlib import Path

from medchain.chain.genesis import Genesis, genesis_block
from medchain.chain.merkle import merkle_root
from medchain.chain.pow import mine
from medchain.chain.types import Block, BlockHeader, DecodeError, Transaction
from medchain.chain.validate import validate_block
from medchain.contract.payload import MalformedPayload, validate_payload
from medchain.contract.replay import Rejection, apply_block, replay
from medchain.contract.state import genesis_state
from medchain.node import wire
from medchain.node.blocktree import BlockTree
from medchain.node.config import NodeConfig, parse_endpoint
from medchain.node.mempool import Mempool
from medchain.node.peer import Peer
from medchain.node.storage import BlockStore, StoreCorrupt


class StartupValidationError(Exception):
    """The persisted chain failed validation at startup."""


class Node:
    def __init__(self, config: NodeConfig, genesis: Genesis | None = None) -> None:
        if genesis is None:
            if not config.genesis_path:
                raise ValueError("node needs a genesis (path or object)")
            genesis = Genesis.load(config.genesis_path)
        self.config = config
        self.genesis = genesis
        self.log = logging.getLogger(f"medchain.node.{config.node_name}")
        self.draft_limit = min(config.max_block_txs or genesis.max_block_txs, genesis.max_block_txs)

        self.lock = threading.RLock()
        self.genesis_block = genesis_block(genesis)
        self.tree = BlockTree(self.genesis_block)
        self.tip_hash = self.genesis_block.block_hash
        self.state = genesis_state(genesis)
        self.rejections: list[Rejection] = []
        self.confirmed_txs: set[str] = set()
        self.known_keys: dict[str, bytes] = {}
        self.mempool = Mempool()
        self.seen_txs: set[str] = set()
        self.orphans: OrderedDict[str, Block] = OrderedDict()

        self.peers: list[Peer] = []
        self.peers_lock = threading.Lock()
        self.banned: set[str] = set()
        self._syncing: set[str] = set()

        self.block_listeners: list = []  # callables (node, block, status)
        self.mine_ms: dict[str, float] = {}

        self.running = False
        self._stop_event = threading.Event()
        self.listen_host, self.listen_port = parse_endpoint(config.listen_endpoint)
        self._server: socket.socket | None = None
        self._threads: list[threading.Thread] = []

        self.store: BlockStore | None = None
        if config.data_dir:
            self.store = BlockStore(config.data_dir)
            genesis_copy = self.store.data_dir / "genesis.json"
            if config.genesis_path:
                self.store.copy_genesis(config.genesis_path)
            elif not genesis_copy.exists():
                genesis_copy.write_text(json.dumps(genesis.to_json(), indent=2) + "\n")
            self._load_store()

    # ------------------------------------------------------------------
    # persistence

    def _load_store(self) -> None:
        assert self.store is not None
        try:
            blocks = self.store.load()
        except StoreCorrupt as exc:
            raise StartupValidationError(str(exc)) from exc
        if not blocks:
            self.store.append(self.genesis_block)
            return
        if blocks[0].block_hash != self.genesis_block.block_hash:
            raise StartupValidationError("stored genesis does not match genesis configuration")
        for block in blocks[1:]:
            parent = self.tree.get(block.header.parent_hash)
            if parent is None:
                raise StartupValidationError(f"stored block {block.block_hash} has unknown parent")
            violations = validate_block(block, parent, self.genesis)
            if violations:
                raise StartupValidationError(
                    f"stored block {block.block_hash}: " + "; ".join(map(str, violations))
                )
            self.tree.insert(block)
        self.tip_hash = self.tree.best_tip()
        result = replay(self.tree.chain_to(self.tip_hash), self.genesis)
        self.state = result.state
        self.rejections = result.rejections
        self._reindex_canonical()

    def _reindex_canonical(self) -> None:
        self.confirmed_txs = set()
        self.known_keys = {}
        for block in self.tree.chain_to(self.tip_hash):
            for tx in block.transactions:
                self.confirmed_txs.add(tx.tx_id)
                self.known_keys.setdefault(tx.sender, tx.public_key)

    def _write_rejection_log(self) -> None:
        if not self.config.data_dir:
            return
        path = Path(self.config.data_dir) / "rejections.jsonl"
        with path.open("w") as fh:
            for rej in self.rejections:
                fh.write(json.dumps(rej.to_json(), sort_keys=True) + "\n")

    # ------------------------------------------------------------------
    # lifecycle

    def _sleep(self, seconds: float) -> None:
        self._stop_event.wait(seconds)

    def start(self) -> None:
        self.running = True
        self._stop_event.clear()
        self._server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._server.bind((self.listen_host, self.listen_port))
        self._server.listen(32)
        self.listen_port = self._server.getsockname()[1]
        self._spawn(self._accept_loop, name="accept")
        for endpoint in self.config.peers:
            self._spawn(self._dial_loop, endpoint, name=f"dial-{endpoint}")
        self._spawn(self._heartbeat_loop, name="heartbeat")
        if self.config.miner_enabled:
            self._spawn(self._mine_loop, name="miner")

    def stop(self) -> None:
        self.running = False
        self._stop_event.set()
        if self._server is not None:
            try:
                self._server.close()
            except OSError:
                pass
        with self.peers_lock:
            peers = list(self.peers)
        for peer in peers:
            peer.close()
        for thread in self._threads:
            thread.join(timeout=3)

    def _spawn(self, fn, *args, name: str) -> None:
        thread = threading.Thread(
            target=fn, args=args, daemon=True, name=f"{self.config.node_name}-{name}"
        )
        thread.start()
        self._threads.append(thread)

    @property
    def endpoint(self) -> str:
        return f"{self.listen_host}:{self.listen_port}"

    # ------------------------------------------------------------------
    # chain access (for gateway / tests)

    def height(self) -> int:
        with self.lock:
            return self.tree.height_of(self.tip_hash)

    def tip(self) -> Block:
        with self.lock:
            return self.tree.blocks[self.tip_hash]

    def canonical_chain(self) -> list[Block]:
        with self.lock:
            return self.tree.chain_to(self.tip_hash)

    def state_snapshot(self, confirmations: int = 0):
        """(height_evaluated, state) — state at tip minus ``confirmations``."""
        with self.lock:
            height = self.tree.height_of(self.tip_hash)
            if confirmations <= 0 or height == 0:
                return height, self.state
            target = max(0, height - confirmations)
            chain = self.tree.chain_to(self.tip_hash)[: target + 1]
            return target, replay(chain, self.genesis).state

    def public_key_of(self, address: str) -> bytes | None:
        with self.lock:
            return self.known_keys.get(address)

    def next_pending_nonce(self, address: str) -> int:
        """Next usable nonce counting both chain state and pooled txs."""
        with self.lock:
            return self.mempool.next_pending_nonce(address, self.state.next_nonce(address))

    # ------------------------------------------------------------------
    # transaction intake

    def submit_tx(self, tx: Transaction, from_peer: Peer | None = None) -> str:
        # Duplicates are identical bytes, so the first admission already
        # verified the signature; skip the crypto for gossip echoes.
        with self.lock:
            if tx.tx_id in self.seen_txs or tx.tx_id in self.confirmed_txs:
                return "DuplicateTx"
        if not tx.verify_signature():
            return "BadSig"
        try:
            validate_payload(tx.payload)
        except MalformedPayload:
            return "MalformedPayload"
        with self.lock:
            if tx.tx_id in self.seen_txs or tx.tx_id in self.confirmed_txs:
                return "DuplicateTx"
            code = self.mempool.admit(tx, self.state.next_nonce)
            if code is not None:
                return code
            self.seen_txs.add(tx.tx_id)
        self._broadcast(wire.tx_msg(tx.to_json()), exclude=from_peer)
        return "accepted"

    # ------------------------------------------------------------------
    # block intake

    def on_block(self, block: Block, from_peer: Peer | None = None) -> str:
        with self.lock:
            status, attach = self._on_block_locked(block, from_peer)
        if status == "rejected" and from_peer is not None:
            self._fault(from_peer)
        if status in ("extended", "reorged", "parked-side"):
            self._broadcast(wire.block_msg(block.to_json()), exclude=from_peer)
        if status == "parked-orphan" and from_peer is not None:
            from_peer.send(wire.get_block(block.header.parent_hash))
        self._notify(block, status)
        for orphan in attach:
            self.on_block(orphan, from_peer)
        return status.split("-")[0]  # parked-side / parked-orphan -> parked

    def _on_block_locked(self, block: Block, from_peer: Peer | None):
        block_hash = block.block_hash
        if block_hash in self.tree:
            return "known", []
        parent = self.tree.get(block.header.parent_hash)
        if parent is None:
            if block_hash not in self.orphans:
                self.orphans[block_hash] = block
                while len(self.orphans) > self.config.orphan_cap:
                    self.orphans.popitem(last=False)
            return "parked-orphan", []
        violations = validate_block(block, parent, self.genesis)
        if violations:
            self.log.warning("rejected block %s: %s", block_hash[:12], "; ".join(map(str, violations)))
            return "rejected", []

        self.tree.insert(block)
        if self.store is not None:
            self.store.append(block)
        old_tip = self.tip_hash
        new_tip = self.tree.best_tip()
        if new_tip == old_tip:
            status = "parked-side"
        elif block.header.parent_hash == old_tip and new_tip == block_hash:
            status = "extended"
            self.tip_hash = new_tip
            new_rejections = apply_block(self.state, block)
            self.rejections.extend(new_rejections)
            for tx in block.transactions:
                self.confirmed_txs.add(tx.tx_id)
                self.known_keys.setdefault(tx.sender, tx.public_key)
            self.mempool.remove_included(block.transactions, self.state.next_nonce)
            if new_rejections:
                self._write_rejection_log()
        else:
            status = "reorged"
            self._reorg_to(new_tip, old_tip)
        attach = [o for o in self.orphans.values() if o.header.parent_hash == block_hash]
        for orphan in attach:
            del self.orphans[orphan.block_hash]
        return status, attach

    def _reorg_to(self, new_tip: str, old_tip: str) -> None:
        fork = self.tree.fork_point(old_tip, new_tip)
        abandoned = self.tree.blocks_since(old_tip, fork)
        self.tip_hash = new_tip
        result = replay(self.tree.chain_to(new_tip), self.genesis)
        self.state = result.state
        self.rejections = result.rejections
        self._reindex_canonical()
        self._write_rejection_log()
        # Return orphaned transactions, then re-admit what was already pooled.
        returned = [
            tx
            for block in abandoned
            for tx in block.transactions
            if tx.tx_id not in self.confirmed_txs
        ]
        pooled = list(self.mempool.pending.values()) + [
            tx for q in self.mempool.future.values() for _, tx in sorted(q.items())
        ]
        self.mempool = Mempool()
        for tx in returned + pooled:
            self.mempool.admit(tx, self.state.next_nonce)
        self.log.info(
            "reorg to %s (fork at %s, returned %d txs)", new_tip[:12], fork[:12], len(returned)
        )

    def _notify(self, block: Block, status: str) -> None:
        for listener in list(self.block_listeners):
            try:
                listener(self, block, status)
            except Exception:  # listeners must not break consensus
                self.log.exception("block listener failed")

    # ------------------------------------------------------------------
    # mining

    def _mine_loop(self) -> None:
        slice_budget = self.config.mine_slice_attempts
        instant_seal = self.genesis.difficulty_bits == 0
        while self.running:
            with self.lock:
                pending = len(self.mempool)
                oldest = self.mempool.oldest_pending_at
                last_push = self.mempool.last_push_at
            if pending == 0:
                self._sleep(0.002 if instant_seal else 0.01)
                continue
            # Batch window: give a transaction burst time to land so the
            # group is sealed as one block. In instant-seal mode (difficulty
            # 0) wait only for a short quiet period after the last arrival.
            if pending < self.draft_limit:
                if instant_seal:
                    quiet = time.monotonic() - (last_push or 0.0)
                    if quiet < 0.01:
                        self._sleep(0.002)
                        continue
                elif oldest is not None:
                    remaining = self.config.batch_timeout_ms / 1000.0 - (time.monotonic() - oldest)
                    if remaining > 0:
                        self._sleep(min(remaining, 0.05))
                        continue

            with self.lock:
                txs = self.mempool.draft(self.draft_limit)
                tip_hash = self.tip_hash
                parent = self.tree.blocks[tip_hash]
            if not txs:
                continue
            template = BlockHeader(
                index=parent.header.index + 1,
                parent_hash=tip_hash,
                merkle_root=merkle_root([t.tx_id for t in txs]),
                difficulty=self.genesis.difficulty_bits,
                pow_nonce=0,
                timestamp=max(int(time.time() * 1000), parent.header.timestamp),
                miner=self.config.miner_address or self.genesis.owner_address,
            )
            started = time.monotonic()
            sealed = None
            start_nonce = 0
            stale = False
            while self.running and not stale:
                sealed = mine(template, budget=slice_budget, start_nonce=start_nonce)
                if sealed is not None:
                    break
                start_nonce += slice_budget
                with self.lock:
                    stale = self.tip_hash != tip_hash
            if sealed is None or stale:
                continue  # redraft against the new tip
            with self.lock:
                if self.tip_hash != tip_hash:
                    continue
            block = Block(header=sealed, transactions=tuple(txs))
            self.mine_ms[block.block_hash] = (time.monotonic() - started) * 1000.0
            self.on_block(block)

    # ------------------------------------------------------------------
    # networking

    def connect_to(self, endpoint: str) -> None:
        """Add a peer endpoint at runtime and dial it."""
        if endpoint in self.config.peers:
            return
        self.config.peers.append(endpoint)
        if self.running:
            self._spawn(self._dial_loop, endpoint, name=f"dial-{endpoint}")

    def _connected_endpoints(self) -> set[str]:
        with self.peers_lock:
            return {p.endpoint for p in self.peers if p.alive and p.endpoint}

    def _dial_loop(self, endpoint: str) -> None:
        backoff = 0.2
        while self.running:
            if endpoint in self.banned:
                return
            if endpoint not in self._connected_endpoints():
                try:
                    host, port = parse_endpoint(endpoint)
                    sock = socket.create_connection((host, port), timeout=5)
                except OSError:
                    self._sleep(backoff)
                    backoff = min(backoff * 2, 30.0)  # PeerUnreachable: capped backoff
                    continue
                backoff = 0.2
                peer = Peer(sock, endpoint=endpoint, inbound=False)
                self._register_peer(peer)
            self._sleep(0.5)

    def _accept_loop(self) -> None:
        assert self._server is not None
        while self.running:
            try:
                sock, _addr = self._server.accept()
            except OSError:
                return
            self._register_peer(Peer(sock, endpoint=None, inbound=True))

    def _register_peer(self, peer: Peer) -> None:
        with self.peers_lock:
            self.peers.append(peer)
        self._spawn(self._reader_loop, peer, name=f"reader-{peer.label()}")
        peer.send(self._hello())

    def _hello(self) -> dict:
        with self.lock:
            height = self.tree.height_of(self.tip_hash)
            return wire.hello(self.genesis.network_id, self.tip_hash, height, listen=self.endpoint)

    def _heartbeat_loop(self) -> None:
        while self.running:
            self._sleep(2.0)
            message = self._hello()
            for peer in self._alive_peers():
                peer.send(message)

    def _alive_peers(self) -> list[Peer]:
        with self.peers_lock:
            self.peers = [p for p in self.peers if p.alive]
            return list(self.peers)

    def _broadcast(self, message: dict, exclude: Peer | None = None) -> None:
        for peer in self._alive_peers():
            if peer is not exclude:
                peer.send(message)

    def _dedup_connection(self, peer: Peer, listen: str | None) -> None:
        """Collapse the two connections a simultaneous dial race creates.

        Both ends apply the same rule — the endpoint-lexicographically
        smaller node's outbound connection survives — so exactly one link
        per pair remains.
        """
        if not listen:
            return
        if peer.endpoint is None:
            peer.endpoint = listen
        keep_outbound = self.endpoint < listen
        with self.peers_lock:
            twins = [p for p in self.peers if p.alive and p.endpoint == listen]
        if len(twins) <= 1:
            return
        for twin in twins:
            preferred = not twin.inbound if keep_outbound else twin.inbound
            if not preferred:
                twin.close()

    def _fault(self, peer: Peer) -> None:
        peer.faults += 1
        if peer.faults >= self.config.fault_threshold:
            self.log.warning("peer %s exceeded fault threshold; disconnecting", peer.label())
            if peer.endpoint:
                self.banned.add(peer.endpoint)
            peer.close()

    def _reader_loop(self, peer: Peer) -> None:
        while self.running and peer.alive:
            try:
                message = wire.recv_message(peer.sock)
            except (OSError, ConnectionError):
                peer.close()
                return
            except wire.WireError:
                # Framing is broken; the stream cannot be trusted further.
                self._fault(peer)
                peer.close()
                return
            try:
                self._dispatch(peer, message)
            except (DecodeError, KeyError, TypeError, ValueError) as exc:
                self.log.warning("bad message from %s: %s", peer.label(), exc)
                self._fault(peer)

    def _dispatch(self, peer: Peer, message: dict) -> None:
        kind = message["type"]
        if kind == "Hello":
            if message["network_id"] != self.genesis.network_id:
                self._fault(peer)
                return
            self._dedup_connection(peer, message.get("listen"))
            if not peer.alive:
                return
            their_tip = message["tip_hash"]
            with self.lock:
                known = their_tip in self.tree
            if not known:
                self._spawn(self._sync_from, peer, their_tip, name="sync")
        elif kind == "Tx":
            self.submit_tx(Transaction.from_json(message["transaction"]), from_peer=peer)
        elif kind == "Block":
            block = Block.from_json(message["block"])
            if not peer.deliver_reply(("Block", block.block_hash), message):
                self.on_block(block, from_peer=peer)
        elif kind == "Headers":
            peer.deliver_reply(("Headers", message["from_hash"]), message)
        elif kind == "GetHeaders":
            with self.lock:
                blocks = self.tree.headers_back(message["from_hash"], min(int(message["count"]), 256))
                headers = [b.header.to_json() for b in blocks]
            peer.send(wire.headers_msg(message["from_hash"], headers))
        elif kind == "GetBlock":
            with self.lock:
                block = self.tree.get(message["hash"])
            if block is not None:
                peer.send(wire.block_msg(block.to_json()))

    # ------------------------------------------------------------------
    # sync

    def _sync_from(self, peer: Peer, their_tip: str) -> None:
        with self.lock:
            if their_tip in self._syncing or their_tip in self.tree:
                return
            self._syncing.add(their_tip)
        try:
            missing: list[BlockHeader] = []
            cursor = their_tip
            while True:
                reply = peer.request(wire.get_headers(cursor, 64), ("Headers", cursor))
                if reply is None or not reply.get("headers"):
                    return
                headers = [BlockHeader.from_json(h) for h in reply["headers"]]
                found = False
                for header in headers:
                    with self.lock:
                        if header.block_hash in self.tree:
                            found = True
                            break
                    missing.append(header)
                if found:
                    break
                last = headers[-1]
                if last.index == 0:
                    self._fault(peer)  # different genesis
                    return
                cursor = last.parent_hash
            for header in reversed(missing):
                want = header.block_hash
                with self.lock:
                    if want in self.tree:
                        continue
                reply = peer.request(wire.get_block(want), ("Block", want))
                if reply is None:
                    return
                block = Block.from_json(reply["block"])
                if block.block_hash != want:
                    self._fault(peer)
                    return
                if self.on_block(block, from_peer=peer) == "rejected":
                    return
        finally:
            with self.lock:
                self._syncing.discard(their_tip)
