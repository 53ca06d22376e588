/** Chain explorer: paged block list with drill-down into txs and events. */

import { GatewayClient } from "../api.js";
import { escapeHtml } from "./permissions.js";
import type { Block, ChainEvent } from "../types.js";

export interface ExplorerPage {
  height: number;
  blocks: Block[];
}

export async function loadPage(client: GatewayClient, from: number, count: number): Promise<ExplorerPage> {
  return client.getChain(from, count);
}

export function renderBlockList(page: ExplorerPage): string {
  const rows = page.blocks
    .map(
      (b) => `<tr data-block="${b.header.index}">
  <td>${b.header.index}</td>
  <td><code>${b.header.parent_hash.slice(0, 10)}…</code></td>
  <td>${b.transactions.length}</td>
  <td>${new Date(b.header.timestamp).toISOString()}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="blocks">
<thead><tr><th>#</th><th>parent</th><th>txs</th><th>time</th></tr></thead>
<tbody>
${rows}
</tbody>
</table>
<div class="chain-height">height ${page.height}</div>`;
}

export function renderBlockDetail(block: Block, events: ChainEvent[]): string {
  const txRows = block.transactions
    .map(
      (tx) => `<li><code>${escapeHtml(tx.payload.type)}</code> from <code>${tx.sender.slice(0, 12)}…</code> (nonce ${tx.nonce})</li>`,
    )
    .join("\n");
  const eventRows = events
    .filter((e) => e.block_index === block.header.index)
    .map((e) => `<li>${escapeHtml(e.kind)} → ${escapeHtml(e.subject)}</li>`)
    .join("\n");
  return `<section class="block-detail">
<h3>Block ${block.header.index}</h3>
<ul class="txs">${txRows}</ul>
<h4>Events</h4>
<ul class="events">${eventRows}</ul>
</section>`;
}

