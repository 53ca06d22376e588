/**
 * Record viewer: the clinician enters a patient id; the console signs the
 * request and renders exactly the fields the gateway returns — the console
 * itself never filters or evaluates access.
 */

import { GatewayClient, GatewayError } from "../api.js";
import type { SessionKey } from "../signing.js";
import { escapeHtml } from "./permissions.js";

export interface RecordView {
  ok: boolean;
  fields?: Record<string, unknown>;
  error?: { status: number; code: string; reason?: string };
}

export async function fetchPatientView(
  client: GatewayClient,
  session: SessionKey,
  modality: string,
  intid: number,
): Promise<RecordView> {
  try {
    const fields = await client.fetchRecord(session, modality, intid);
    return { ok: true, fields };
  } catch (error) {
    if (error instanceof GatewayError) {
      return {
        ok: false,
        error: { status: error.status, code: error.code, reason: error.decision?.reason },
      };
    }
    throw error;
  }
}

export function renderRecordPanel(view: RecordView): string {
  if (!view.ok) {
    const reason = view.error?.reason ? ` — ${escapeHtml(view.error.reason)}` : "";
    return `<div class="record denied">Access refused (${view.error?.status} ${escapeHtml(
      view.error?.code ?? "",
    )}${reason})</div>`;
  }
  const rows = Object.entries(view.fields ?? {})
    .map(
      ([name, value]) =>
        `<tr><th>${escapeHtml(name)}</th><td>${escapeHtml(formatValue(value))}</td></tr>`,
    )
    .join("\n");
  return `<table class="record">\n${rows}\n</table>`;
}

function formatValue(value: unknown): string {
  if (Array.isArray(value)) return `[${value.join(", ")}]`;
  return String(value);
}
