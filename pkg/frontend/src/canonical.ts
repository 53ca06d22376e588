/**
 * Canonical JSON encoding, byte-compatible with the chain's hashing rules:
 * lexicographically sorted keys, no whitespace, non-ASCII escaped as
 * lowercase \uXXXX (UTF-16 code units, matching Python's ensure_ascii).
 */

export function canonicalStringify(value: unknown): string {
  if (value === null) return "null";
  switch (typeof value) {
    case "boolean":
      return value ? "true" : "false";
    case "number":
      if (!Number.isSafeInteger(value)) {
        throw new Error(`canonical encoding only supports safe integers, got ${value}`);
      }
      return String(value);
    case "string":
      return encodeString(value);
    case "object":
      if (Array.isArray(value)) {
        return "[" + value.map(canonicalStringify).join(",") + "]";
      }
      return encodeObject(value as Record<string, unknown>);
    default:
      throw new Error(`cannot canonically encode a ${typeof value}`);
  }
}

function encodeObject(obj: Record<string, unknown>): string {
  const keys = Object.keys(obj).sort();
  const parts = keys.map((k) => encodeString(k) + ":" + canonicalStringify(obj[k]));
  return "{" + parts.join(",") + "}";
}

function encodeString(s: string): string {
  return JSON.stringify(s).replace(/[-￿]/g, (c) => {
    return "\\u" + c.charCodeAt(0).toString(16).padStart(4, "0");
  });
}

export function canonicalBytes(value: unknown): Uint8Array {
  return new TextEncoder().encode(canonicalStringify(value));
}

export function bytesToHex(bytes: Uint8Array): string {
  let out = "";
  for (const b of bytes) out += b.toString(16).padStart(2, "0");
  return out;
}

export function hexToBytes(hex: string): Uint8Array {
  if (hex.length % 2 !== 0 || /[^0-9a-f]/.test(hex)) {
    throw new Error("expected lowercase hex");
  }
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(i * 2, i * 2 + 2), 16);
  }
  return out;
}

export async function sha256Hex(data: Uint8Array): Promise<string> {
  const digest = await crypto.subtle.digest("SHA-256", data as BufferSource);
  return bytesToHex(new Uint8Array(digest));
}
