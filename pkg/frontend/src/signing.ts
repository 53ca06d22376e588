/**
 * Browser-side Ed25519 signing over WebCrypto. The secret seed stays inside
 * the session object; transactions and record requests are signed
 * client-side and only signatures travel.
 */

import { bytesToHex, canonicalBytes, hexToBytes, sha256Hex } from "./canonical.js";
import type { Payload, Transaction } from "./types.js";

// PKCS#8 wrapper for a raw Ed25519 seed (RFC 8410 structure).
const PKCS8_PREFIX = hexToBytes("302e020100300506032b657004220420");

export interface SessionKey {
  address: string;
  publicKeyHex: string;
  sign(message: Uint8Array): Promise<Uint8Array>;
}

export async function sessionFromSecret(secretHex: string): Promise<SessionKey> {
  const seed = hexToBytes(secretHex);
  if (seed.length !== 32) throw new Error("secret must be 32 bytes of hex");
  const pkcs8 = new Uint8Array(PKCS8_PREFIX.length + seed.length);
  pkcs8.set(PKCS8_PREFIX);
  pkcs8.set(seed, PKCS8_PREFIX.length);
  const privateKey = await crypto.subtle.importKey(
    "pkcs8",
    pkcs8 as BufferSource,
    { name: "Ed25519" },
    true,
    ["sign"],
  );
  const jwk = await crypto.subtle.exportKey("jwk", privateKey);
  if (!jwk.x) throw new Error("could not derive the public key");
  const publicKey = base64UrlToBytes(jwk.x);
  const digest = new Uint8Array(await crypto.subtle.digest("SHA-256", publicKey as BufferSource));
  return {
    address: bytesToHex(digest.slice(0, 20)),
    publicKeyHex: bytesToHex(publicKey),
    async sign(message: Uint8Array): Promise<Uint8Array> {
      const sig = await crypto.subtle.sign({ name: "Ed25519" }, privateKey, message as BufferSource);
      return new Uint8Array(sig);
    },
  };
}

export async function verifySignature(
  publicKeyHex: string,
  signature: Uint8Array,
  message: Uint8Array,
): Promise<boolean> {
  const key = await crypto.subtle.importKey(
    "raw",
    hexToBytes(publicKeyHex) as BufferSource,
    { name: "Ed25519" },
    false,
    ["verify"],
  );
  return crypto.subtle.verify({ name: "Ed25519" }, key, signature as BufferSource, message as BufferSource);
}

function base64UrlToBytes(b64url: string): Uint8Array {
  const b64 = b64url.replace(/-/g, "+").replace(/_/g, "/");
  const padded = b64 + "=".repeat((4 - (b64.length % 4)) % 4);
  const raw = atob(padded);
  const out = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) out[i] = raw.charCodeAt(i);
  return out;
}

/** Sign a transaction exactly as the chain verifies it. */
export async function buildSignedTx(
  session: SessionKey,
  nonce: number,
  payload: Payload,
  timestamp?: number,
): Promise<Transaction> {
  const ts = timestamp ?? Date.now();
  const unsigned = {
    sender: session.address,
    nonce,
    payload,
    timestamp: ts,
    public_key: session.publicKeyHex,
  };
  const signature = await session.sign(canonicalBytes(unsigned));
  return { ...unsigned, signature: bytesToHex(signature) };
}

export async function txId(tx: Transaction): Promise<string> {
  return sha256Hex(canonicalBytes(tx));
}

/** X-Auth header for record routes: signature over METHOD\npath\ntimestamp. */
export async function buildAuthHeader(
  session: SessionKey,
  method: string,
  path: string,
  timestamp?: number,
): Promise<string> {
  const ts = timestamp ?? Date.now();
  const message = new TextEncoder().encode(`${method.toUpperCase()}\n${path}\n${ts}`);
  const signature = await session.sign(message);
  return JSON.stringify({ address: session.address, timestamp: ts, signature: bytesToHex(signature) });
}
