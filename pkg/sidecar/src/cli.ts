#!/usr/bin/env node
/**
 * Sidecar entry point.
 *
 *   corpus-scope-sidecar [--port N] [--mode feature-hash|external]
 *                        [--dim D] [--seed S] [--batch-limit N]
 *                        [--model path/to/module.mjs]
 *
 * External mode loads a module exporting { id, dim, embedBatch } so a real
 * sentence encoder can sit behind the same protocol.
 */

import { EmbeddingBackend, featureHashBackend } from "./featureHash.js";
import { createServer, listen } from "./server.js";

interface CliOptions {
  port: number;
  mode: string;
  dim: number;
  seed: bigint;
  batchLimit: number;
  model?: string;
}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = {
    port: 8900,
    mode: "feature-hash",
    dim: 256,
    seed: 0n,
    batchLimit: 1024,
  };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    switch (flag) {
      case "--port":
        options.port = Number(value);
        break;
      case "--mode":
        options.mode = value;
        break;
      case "--dim":
        options.dim = Number(value);
        break;
      case "--seed":
        options.seed = BigInt(value);
        break;
      case "--batch-limit":
        options.batchLimit = Number(value);
        break;
      case "--model":
        options.model = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!Number.isInteger(options.port) || options.port < 0 || options.port > 65535) {
    throw new Error(`invalid port ${options.port}`);
  }
  if (options.mode !== "feature-hash" && options.mode !== "external") {
    throw new Error(`unknown mode ${options.mode}`);
  }
  if (options.mode === "external" && !options.model) {
    throw new Error("external mode needs --model");
  }
  return options;
}

export async function loadBackend(options: CliOptions): Promise<EmbeddingBackend> {
  if (options.mode === "external") {
    const mod = await import(options.model!);
    const backend = (mod.default ?? mod) as Partial<EmbeddingBackend>;
    if (typeof backend.id !== "string" || typeof backend.dim !== "number" ||
        typeof backend.embedBatch !== "function") {
      throw new Error(`module ${options.model} does not export { id, dim, embedBatch }`);
    }
    return backend as EmbeddingBackend;
  }
  return featureHashBackend(options.dim, options.seed);
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  const backend = await loadBackend(options);
  const server = createServer({ backend, batchLimit: options.batchLimit });
  const port = await listen(server, options.port);
  console.log(`embedding sidecar ${backend.id} listening on http://127.0.0.1:${port}`);
  const shutdown = () => server.close(() => process.exit(0));
  process.on("SIGINT", shutdown);
  process.on("SIGTERM", shutdown);
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "",
);
if (invokedDirectly) {
  main().catch((err) => {
    console.error(String(err));
    process.exit(1);
  });
}
