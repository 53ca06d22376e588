/** Thin gateway client; fetch is injectable so tests can mock the wire. */

import { buildAuthHeader, buildSignedTx, txId, type SessionKey } from "./signing.js";
import type {
  AccessDecision,
  Action,
  Block,
  ChainEvent,
  Payload,
  PermissionRow,
  RoleRow,
  Transaction,
} from "./types.js";

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public decision?: AccessDecision,
  ) {
    super(message);
  }
}

export class GatewayClient {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchFn = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<any> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new GatewayError(
        response.status,
        body.code ?? "HttpError",
        body.message ?? `HTTP ${response.status}`,
        body.decision,
      );
    }
    return body;
  }

  getPermissions(): Promise<Record<string, PermissionRow>> {
    return this.request("/api/state/permissions");
  }

  getRoles(): Promise<Record<string, RoleRow>> {
    return this.request("/api/state/roles");
  }

  getTemplates(): Promise<Record<string, string[]>> {
    return this.request("/api/state/templates");
  }

  getDelegates(): Promise<Record<string, boolean>> {
    return this.request("/api/state/delegates");
  }

  getAccess(user: string, action: Action, path: string): Promise<AccessDecision> {
    const q = new URLSearchParams({ user, action, path });
    return this.request(`/api/access?${q}`);
  }

  getEvents(since = 0): Promise<ChainEvent[]> {
    return this.request(`/api/events?since=${since}`);
  }

  getChain(from = 0, count = 20): Promise<{ height: number; blocks: Block[] }> {
    return this.request(`/api/chain?from=${from}&count=${count}`);
  }

  getHead(): Promise<{ height: number; tip_hash: string }> {
    return this.request("/api/head");
  }

  getNextNonce(address: string): Promise<number> {
    return this.request(`/api/nonce?address=${address}`).then((b) => b.next_nonce);
  }

  async postTx(tx: Transaction): Promise<{ tx_id: string; status: string }> {
    return this.request("/api/tx", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(tx),
    });
  }

  /** Build, sign and submit a payload for the session; returns the tx id. */
  async submitPayload(session: SessionKey, payload: Payload): Promise<string> {
    const nonce = await this.getNextNonce(session.address);
    const tx = await buildSignedTx(session, nonce, payload);
    const accepted = await this.postTx(tx);
    const localId = await txId(tx);
    if (accepted.tx_id !== localId) {
      throw new GatewayError(500, "IdMismatch", "gateway and console disagree on tx id");
    }
    return accepted.tx_id;
  }

  /** Signed record fetch through a Fig 3 route, e.g. ("ct", 986). */
  async fetchRecord(
    session: SessionKey,
    modality: string,
    intid: number,
  ): Promise<Record<string, unknown>> {
    const path = `/${modality}/list/${intid}/`;
    const auth = await buildAuthHeader(session, "GET", path);
    return this.request(path, { headers: { "X-Auth": auth } });
  }

  async isConfirmed(txIdHex: string, since = 0): Promise<boolean> {
    const events = await this.getEvents(since);
    return events.some((e) => e.tx_id === txIdHex);
  }
}
