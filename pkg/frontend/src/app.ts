/**
 * Browser wiring: four screens over one gateway base URL and one pasted
 * session secret. Confirmation state refreshes on a 2 s poll — block
 * cadence is seconds, so polling is plenty.
 */

import { GatewayClient } from "./api.js";
import { sessionFromSecret, type SessionKey } from "./signing.js";
import { runAccessTest, renderAccessResult } from "./screens/access.js";
import { loadPage, renderBlockList, renderBlockDetail } from "./screens/explorer.js";
import {
  loadPermissionRows,
  renderPermissionTable,
  submitPermission,
  unbindPermission,
  waitConfirmed,
} from "./screens/permissions.js";
import { fetchPatientView, renderRecordPanel } from "./screens/records.js";
import type { Action } from "./types.js";

interface AppState {
  client: GatewayClient;
  session: SessionKey | null;
  pendingPerms: Map<number, string>;
}

const state: AppState = {
  client: new GatewayClient(localStorage.getItem("gateway") ?? "http://127.0.0.1:8080"),
  session: null,
  pendingPerms: new Map(),
};

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function requireSession(): SessionKey {
  if (!state.session) throw new Error("paste a session secret first");
  return state.session;
}

async function refreshPermissions(): Promise<void> {
  const rows = await loadPermissionRows(state.client, state.pendingPerms);
  $("permission-table").innerHTML = renderPermissionTable(rows);
}

async function refreshExplorer(): Promise<void> {
  const head = await state.client.getHead();
  const from = Math.max(0, head.height - 19);
  const page = await loadPage(state.client, from, 20);
  $("block-list").innerHTML = renderBlockList(page);
  const detailTarget = page.blocks.at(-1);
  if (detailTarget) {
    const events = await state.client.getEvents(detailTarget.header.index);
    $("block-detail").innerHTML = renderBlockDetail(detailTarget, events);
  }
}

function wire(): void {
  $("connect").addEventListener("click", async () => {
    const base = ($("gateway-url") as HTMLInputElement).value;
    localStorage.setItem("gateway", base);
    state.client = new GatewayClient(base);
    const secret = ($("session-secret") as HTMLInputElement).value.trim();
    state.session = secret ? await sessionFromSecret(secret) : null;
    $("session-info").textContent = state.session
      ? `signed in as ${state.session.address}`
      : "read-only (no secret)";
    await Promise.all([refreshPermissions(), refreshExplorer()]);
  });

  $("perm-submit").addEventListener("click", async () => {
    const form = {
      perm_id: Number(($("perm-id") as HTMLInputElement).value),
      name: ($("perm-name") as HTMLInputElement).value,
      route: ($("perm-route") as HTMLInputElement).value,
      action: ($("perm-action") as HTMLSelectElement).value as Action,
    };
    const txId = await submitPermission(state.client, requireSession(), form);
    state.pendingPerms.set(form.perm_id, txId);
    await refreshPermissions();
    void waitConfirmed(state.client, txId).then(async () => {
      state.pendingPerms.delete(form.perm_id);
      await refreshPermissions();
    });
  });

  $("permission-table").addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    const unbind = target.getAttribute("data-unbind");
    if (unbind) {
      // Delete surfaced as unbinding from every role (no delete payload exists).
      await unbindPermission(state.client, requireSession(), Number(unbind));
      await refreshPermissions();
    }
    const edit = target.getAttribute("data-edit");
    if (edit) {
      const rows = await state.client.getPermissions();
      const row = rows[edit];
      ($("perm-id") as HTMLInputElement).value = edit;
      ($("perm-name") as HTMLInputElement).value = row.name;
      ($("perm-route") as HTMLInputElement).value = row.route;
      ($("perm-action") as HTMLSelectElement).value = row.action;
    }
  });

  $("access-run").addEventListener("click", async () => {
    const decision = await runAccessTest(
      state.client,
      ($("access-user") as HTMLInputElement).value,
      ($("access-action") as HTMLSelectElement).value as Action,
      ($("access-path") as HTMLInputElement).value,
    );
    $("access-result").innerHTML = renderAccessResult(decision);
  });

  $("record-fetch").addEventListener("click", async () => {
    const view = await fetchPatientView(
      state.client,
      requireSession(),
      ($("record-modality") as HTMLSelectElement).value,
      Number(($("record-id") as HTMLInputElement).value),
    );
    $("record-panel").innerHTML = renderRecordPanel(view);
  });

  setInterval(() => {
    refreshExplorer().catch(() => undefined);
  }, 2000);
}

document.addEventListener("DOMContentLoaded", wire);
