/** Shared wire types for the gateway API. */

export type Action = "View" | "Edit" | "Delete";

export interface PermissionRow {
  name: string;
  route: string;
  action: Action;
}

export interface RoleRow {
  name: string;
  permission_ids: number[];
}

export type Payload =
  | { type: "AddDelegate"; addr: string }
  | { type: "RemoveDelegate"; addr: string }
  | { type: "DefinePermission"; perm_id: number; name: string; route: string; action: Action }
  | { type: "DefineRole"; role_id: number; name: string }
  | { type: "GrantPermissionToRole"; role_id: number; perm_id: number }
  | { type: "RevokePermissionFromRole"; role_id: number; perm_id: number }
  | { type: "AssignRole"; user: string; role_id: number }
  | { type: "RevokeRole"; user: string; role_id: number }
  | { type: "DefineViewTemplate"; role_id: number; fields: string[] };

export interface Transaction {
  sender: string;
  nonce: number;
  payload: Payload;
  timestamp: number;
  public_key: string;
  signature: string;
}

export interface AccessDecision {
  verdict: "Allow" | "Deny";
  matched_permission: number | null;
  via_role: number | null;
  reason: string;
  height?: number;
}

export interface BlockHeader {
  index: number;
  parent_hash: string;
  merkle_root: string;
  difficulty: number;
  pow_nonce: number;
  timestamp: number;
  miner: string;
}

export interface Block {
  header: BlockHeader;
  transactions: Transaction[];
}

export interface ChainEvent {
  kind: string;
  subject: string;
  block_index: number;
  tx_id: string;
}
