export { fnv1a64 } from "./hash.js";
export { embedSentence, featureHashBackend, normalize } from "./featureHash.js";
export type { EmbeddingBackend } from "./featureHash.js";
export { createServer, listen, parseEmbedRequest } from "./server.js";
export type { ServerOptions } from "./server.js";
