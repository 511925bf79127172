/**
 * FNV-1a 64-bit over raw bytes, with the seed XORed into the offset basis.
 * Matches the reference values in docs/embedding-protocol.md.
 */

const FNV_OFFSET_BASIS = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const U64_MASK = 0xffffffffffffffffn;

export function fnv1a64(data: Uint8Array, seed: bigint = 0n): bigint {
  let hash = (FNV_OFFSET_BASIS ^ (seed & U64_MASK)) & U64_MASK;
  for (const byte of data) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & U64_MASK;
  }
  return hash;
}
