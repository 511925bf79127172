/**
 * HTTP server for the embedding protocol: GET /health and POST /embed.
 * Stateless request handling; every response is JSON.
 */

import http from "node:http";

import { EmbeddingBackend } from "./featureHash.js";

export interface ServerOptions {
  backend: EmbeddingBackend;
  batchLimit?: number;
}

const DEFAULT_BATCH_LIMIT = 1024;
const MAX_BODY_BYTES = 64 * 1024 * 1024;

function sendJson(res: http.ServerResponse, status: number, payload: unknown): void {
  const body = JSON.stringify(payload);
  res.writeHead(status, {
    "content-type": "application/json",
    "content-length": Buffer.byteLength(body),
  });
  res.end(body);
}

function readBody(req: http.IncomingMessage): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    let size = 0;
    req.on("data", (chunk: Buffer) => {
      size += chunk.length;
      if (size > MAX_BODY_BYTES) {
        reject(new Error("request body too large"));
        req.destroy();
        return;
      }
      chunks.push(chunk);
    });
    req.on("end", () => resolve(Buffer.concat(chunks)));
    req.on("error", reject);
  });
}

/** Parse and validate an /embed request body; returns an error string on failure. */
export function parseEmbedRequest(body: string): { sentences: string[] } | { error: string } {
  let parsed: unknown;
  try {
    parsed = JSON.parse(body);
  } catch {
    return { error: "request body is not valid JSON" };
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return { error: "request body must be a JSON object" };
  }
  const sentences = (parsed as Record<string, unknown>)["sentences"];
  if (!Array.isArray(sentences)) {
    return { error: 'request body must have a "sentences" array' };
  }
  for (const entry of sentences) {
    if (typeof entry !== "string") {
      return { error: "every sentence must be a string" };
    }
  }
  return { sentences: sentences as string[] };
}

export function createServer(options: ServerOptions): http.Server {
  const { backend } = options;
  const batchLimit = options.batchLimit ?? DEFAULT_BATCH_LIMIT;

  return http.createServer(async (req, res) => {
    try {
      if (req.method === "GET" && req.url === "/health") {
        sendJson(res, 200, { status: "ok", id: backend.id, dim: backend.dim });
        return;
      }
      if (req.method === "POST" && req.url === "/embed") {
        const body = await readBody(req);
        const request = parseEmbedRequest(body.toString("utf-8"));
        if ("error" in request) {
          sendJson(res, 400, { error: request.error });
          return;
        }
        if (request.sentences.length > batchLimit) {
          sendJson(res, 413, {
            error: `batch of ${request.sentences.length} exceeds limit ${batchLimit}`,
          });
          return;
        }
        const embeddings = await backend.embedBatch(request.sentences);
        sendJson(res, 200, { dim: backend.dim, embeddings });
        return;
      }
      sendJson(res, 404, { error: `no route for ${req.method} ${req.url}` });
    } catch (err) {
      sendJson(res, 500, { error: String(err) });
    }
  });
}

export function listen(server: http.Server, port: number, host = "127.0.0.1"): Promise<number> {
  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(port, host, () => {
      const address = server.address();
      if (address && typeof address === "object") {
        resolve(address.port);
      } else {
        reject(new Error("server has no bound port"));
      }
    });
  });
}
