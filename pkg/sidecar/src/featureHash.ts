/**
 * Feature-hashed bag-of-terms embeddings, bit-compatible with the Python
 * toolkit's built-in backend (see docs/embedding-protocol.md).
 */

import { fnv1a64 } from "./hash.js";

// Unicode P* plus the ASCII punctuation characters that are symbols ($+<=>^`|~)
const PUNCTUATION = /[\p{P}$+<=>^`|~]/gu;
// Python's whitespace definition: the protocol's \\s, including the ASCII
// separators \\x1c-\\x1f and NEL \\x85, excluding the BOM.
const WS_CLASS =
  "\\t\\n\\v\\f\\r \\u001c-\\u001f\\u0085\\u00a0\\u1680\\u2000-\\u200a\\u2028\\u2029\\u202f\\u205f\\u3000";
const WHITESPACE = new RegExp(`[${WS_CLASS}]+`, "g");
const EDGE_WHITESPACE = new RegExp(`^[${WS_CLASS}]+|[${WS_CLASS}]+$`, "g");

const encoder = new TextEncoder();

export function normalize(raw: string): string {
  return raw
    .toLowerCase()
    .replace(PUNCTUATION, "")
    .replace(WHITESPACE, " ")
    .replace(EDGE_WHITESPACE, "");
}

export function embedSentence(sentence: string, dim: number, seed: bigint): number[] {
  const counts = new Float64Array(dim);
  const normalized = normalize(sentence);
  if (normalized.length > 0) {
    const bigDim = BigInt(dim);
    for (const term of normalized.split(" ")) {
      const bucket = Number(fnv1a64(encoder.encode(term), seed) % bigDim);
      counts[bucket] += 1;
    }
  }
  // counts are integers, so the sum of squares is exact in float64 and the
  // result matches the Python implementation bit-for-bit
  let sumSquares = 0;
  for (let i = 0; i < dim; i++) sumSquares += counts[i] * counts[i];
  if (sumSquares > 0) {
    const norm = Math.sqrt(sumSquares);
    for (let i = 0; i < dim; i++) counts[i] /= norm;
  }
  return Array.from(counts);
}

export interface EmbeddingBackend {
  id: string;
  dim: number;
  embedBatch(sentences: string[]): number[][] | Promise<number[][]>;
}

export function featureHashBackend(dim = 256, seed = 0n): EmbeddingBackend {
  if (dim <= 0 || !Number.isInteger(dim)) {
    throw new Error(`embedding dim must be a positive integer, got ${dim}`);
  }
  return {
    id: `feature-hash/${dim}/seed${seed}`,
    dim,
    embedBatch: (sentences) => sentences.map((s) => embedSentence(s, dim, seed)),
  };
}
