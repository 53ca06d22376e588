"""HTTP facade for the CAD system and admin console.

Handlers evaluate against an immutable snapshot of the node's replayed
state at the configured confirmation depth. Record routes authenticate the
caller's signature, run the same access check the contract defines, and on
Allow project the patient record through the caller's role view template.
"""

from __future__ import annotations

import logging
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from medchain.chain.types import DecodeError, Transaction
from medchain.contract.access import check_access
from medchain.contract.payload import ACTIONS
from medchain.encoding import is_address_hex
from medchain.gateway.auth import AuthError, verify_auth_header
from medchain.gateway.records import PATIENT_FIELDS, RecordStore
from medchain.node.node import Node

log = logging.getLogger("medchain.gateway")


def _error(status: int, code: str, message: str, decision=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if decision is not None:
        body["decision"] = decision.to_json()
    return JSONResponse(status_code=status, content=body)


def create_app(
    node: Node,
    records: RecordStore,
    key_directory: dict[str, bytes] | None = None,
    confirmations: int | None = None,
) -> FastAPI:
    app = FastAPI(title="medchain gateway", redirect_slashes=False)
    keys = dict(key_directory or {})
    depth = node.config.confirmations if confirmations is None else confirmations

    def lookup_key(address: str) -> bytes | None:
        found = keys.get(address)
        if found is not None:
            return found
        # Fall back to the key first seen on any of the address's chain txs.
        return node.public_key_of(address)

    def snapshot():
        return node.state_snapshot(depth)

    # -- transactions ------------------------------------------------------

    @app.post("/api/tx")
    async def submit_tx(request: Request):
        try:
            doc = await request.json()
        except Exception:
            return _error(400, "MalformedPayload", "body is not valid JSON")
        try:
            tx = Transaction.from_json(doc)
        except DecodeError as exc:
            return _error(400, "MalformedPayload", str(exc))
        payload = tx.payload
        if payload.get("type") == "DefineViewTemplate":
            unknown = [f for f in payload.get("fields", []) if f not in PATIENT_FIELDS]
            if unknown:
                return _error(400, "MalformedPayload", f"unknown record fields: {unknown}")
        if not node.running:
            return _error(503, "NodeUnavailable", "node is not running")
        status = node.submit_tx(tx)
        if status == "accepted":
            return JSONResponse(status_code=202, content={"tx_id": tx.tx_id, "status": "accepted"})
        return _error(400, status, f"transaction rejected: {status}")

    # -- access decisions --------------------------------------------------

    @app.get("/api/access")
    def access(user: str = "", action: str = "", path: str = ""):
        if not is_address_hex(user):
            return _error(400, "BadRequest", "user must be a 40-char hex address")
        if action not in ACTIONS:
            return _error(400, "BadRequest", f"action must be one of {ACTIONS}")
        if not path.startswith("/"):
            return _error(400, "BadRequest", "path must start with '/'")
        height, state = snapshot()
        decision = check_access(state, user, action, path)
        body = decision.to_json()
        body["height"] = height
        return JSONResponse(content=body)

    # -- record routes -----------------------------------------------------

    def _authenticate(request: Request):
        return verify_auth_header(
            request.headers.get("X-Auth"),
            request.method,
            request.scope["path"],
            lookup_key,
        )

    def _record_route(request: Request, action: str, intid: str, handler: Callable):
        raw_path = request.scope["path"]
        try:
            ctx = _authenticate(request)
        except AuthError as exc:
            return _error(401, "BadAuth", exc.message)
        height, state = snapshot()
        decision = check_access(state, ctx.address, action, raw_path)
        if not decision.allowed:
            return _error(403, "AccessDenied", f"{action} denied for {raw_path}", decision)
        if not intid.isdigit():
            return _error(404, "UnknownPatient", f"no record for id {intid!r}")
        template = state.view_templates.get(decision.via_role, [])
        return handler(int(intid), template, decision)

    @app.get("/{modality}/list/{intid}/")
    def list_record(modality: str, intid: str, request: Request):
        def handle(patient: int, template: list[str], decision):
            view = records.view(patient, template)
            if view is None:
                return _error(404, "UnknownPatient", f"no record for id {patient}")
            return JSONResponse(content=view)

        return _record_route(request, "View", intid, handle)

    @app.get("/{modality}/del/{intid}/")
    def delete_record(modality: str, intid: str, request: Request):
        def handle(patient: int, template: list[str], decision):
            if not records.mark_deleted(patient, modality):
                return _error(404, "UnknownPatient", f"no record for id {patient}")
            return JSONResponse(
                content={
                    "deleted": modality,
                    "patient": patient,
                    "via_permission": decision.matched_permission,
                    "via_role": decision.via_role,
                }
            )

        return _record_route(request, "Delete", intid, handle)

    # -- chain and state inspection ----------------------------------------

    @app.get("/api/chain")
    def chain(request: Request):
        params = request.query_params
        try:
            start = int(params.get("from", 0))
            count = int(params.get("count", 50))
        except ValueError:
            return _error(400, "BadRequest", "from and count must be integers")
        if start < 0 or count < 0 or count > 1000:
            return _error(400, "BadRequest", "bad range")
        blocks = node.canonical_chain()
        return JSONResponse(
            content={
                "height": len(blocks) - 1,
                "blocks": [b.to_json() for b in blocks[start : start + count]],
            }
        )

    @app.get("/api/head")
    def head():
        tip = node.tip()
        return JSONResponse(
            content={"height": tip.header.index, "tip_hash": tip.block_hash}
        )

    @app.get("/api/nonce")
    def next_nonce(address: str = ""):
        if not is_address_hex(address):
            return _error(400, "BadRequest", "address must be a 40-char hex address")
        # Pending-aware so clients can submit bursts without nonce clashes.
        return JSONResponse(
            content={"address": address, "next_nonce": node.next_pending_nonce(address)}
        )

    @app.get("/api/state/delegates")
    def state_delegates():
        _, state = snapshot()
        return JSONResponse(content=dict(sorted(state.delegates.items())))

    @app.get("/api/state/permissions")
    def state_permissions():
        _, state = snapshot()
        return JSONResponse(
            content={str(pid): p.to_json() for pid, p in sorted(state.permissions.items())}
        )

    @app.get("/api/state/roles")
    def state_roles():
        _, state = snapshot()
        return JSONResponse(content={str(rid): r.to_json() for rid, r in sorted(state.roles.items())})

    @app.get("/api/state/templates")
    def state_templates():
        _, state = snapshot()
        return JSONResponse(
            content={str(rid): list(f) for rid, f in sorted(state.view_templates.items())}
        )

    @app.get("/api/events")
    def events(request: Request):
        try:
            since = int(request.query_params.get("since", 0))
        except ValueError:
            return _error(400, "BadRequest", "since must be an integer")
        _, state = snapshot()
        out = [e.to_json() for e in state.events if e.block_index >= since]
        return JSONResponse(content=out)

    return app
