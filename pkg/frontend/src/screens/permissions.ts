/**
 * Permission table screen: the live permission rows with Edit (upsert) and
 * Delete (unbind-from-all-roles — the contract has no delete, so removal is
 * surfaced as revoking the permission from every role that holds it).
 */

import { GatewayClient } from "../api.js";
import type { SessionKey } from "../signing.js";
import type { Action, PermissionRow } from "../types.js";

export type RowStatus = "confirmed" | "pending";

export interface PermissionTableRow extends PermissionRow {
  perm_id: number;
  status: RowStatus;
}

export function renderPermissionTable(rows: PermissionTableRow[]): string {
  const body = rows
    .map(
      (r) => `<tr data-perm="${r.perm_id}" class="${r.status}">
  <td>${r.perm_id}</td>
  <td>${escapeHtml(r.name)}</td>
  <td><code>${escapeHtml(r.route)}</code></td>
  <td>${r.action}</td>
  <td>${r.status === "pending" ? "pending…" : "confirmed"}</td>
  <td><button data-edit="${r.perm_id}">Edit</button> <button data-unbind="${r.perm_id}">Delete</button></td>
</tr>`,
    )
    .join("\n");
  return `<table class="permissions">
<thead><tr><th>ID</th><th>name</th><th>address</th><th>Operation</th><th>status</th><th></th></tr></thead>
<tbody>
${body}
</tbody>
</table>`;
}

/** Live rows sorted by descending id, the table's published ordering. */
export async function loadPermissionRows(
  client: GatewayClient,
  pending: Map<number, string>,
): Promise<PermissionTableRow[]> {
  const rows = await client.getPermissions();
  return Object.entries(rows)
    .map(([id, row]) => ({
      perm_id: Number(id),
      ...row,
      status: (pending.has(Number(id)) ? "pending" : "confirmed") as RowStatus,
    }))
    .sort((a, b) => b.perm_id - a.perm_id);
}

export interface PermissionForm {
  perm_id: number;
  name: string;
  route: string;
  action: Action;
}

/** Upsert one permission (Edit submits the same form prefilled). */
export async function submitPermission(
  client: GatewayClient,
  session: SessionKey,
  form: PermissionForm,
): Promise<string> {
  return client.submitPayload(session, {
    type: "DefinePermission",
    perm_id: form.perm_id,
    name: form.name,
    route: form.route,
    action: form.action,
  });
}

/** "Delete" = revoke the permission from every role holding it. */
export async function unbindPermission(
  client: GatewayClient,
  session: SessionKey,
  permId: number,
): Promise<string[]> {
  const roles = await client.getRoles();
  const holders = Object.entries(roles)
    .filter(([, role]) => role.permission_ids.includes(permId))
    .map(([id]) => Number(id));
  const txIds: string[] = [];
  for (const roleId of holders) {
    txIds.push(
      await client.submitPayload(session, {
        type: "RevokePermissionFromRole",
        role_id: roleId,
        perm_id: permId,
      }),
    );
  }
  return txIds;
}

/** Poll the event log until a submitted tx lands in a block. */
export async function waitConfirmed(
  client: GatewayClient,
  txIdHex: string,
  opts: { intervalMs?: number; attempts?: number } = {},
): Promise<boolean> {
  const interval = opts.intervalMs ?? 2000;
  const attempts = opts.attempts ?? 30;
  for (let i = 0; i < attempts; i++) {
    if (await client.isConfirmed(txIdHex)) return true;
    await new Promise((resolve) => setTimeout(resolve, interval));
  }
  return false;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
