/** Access tester: the admin's what-if check before granting anything. */

import { GatewayClient } from "../api.js";
import { escapeHtml } from "./permissions.js";
import type { AccessDecision, Action } from "../types.js";

export async function runAccessTest(
  client: GatewayClient,
  user: string,
  action: Action,
  path: string,
): Promise<AccessDecision> {
  return client.getAccess(user, action, path);
}

export function renderAccessResult(decision: AccessDecision): string {
  if (decision.verdict === "Allow") {
    return `<div class="decision allow">
  <strong>Allow</strong> via permission ${decision.matched_permission} through role ${decision.via_role}
  <span class="height">evaluated at block ${decision.height}</span>
</div>`;
  }
  return `<div class="decision deny">
  <strong>Deny</strong> (${escapeHtml(decision.reason)})
  <span class="height">evaluated at block ${decision.height}</span>
</div>`;
}
