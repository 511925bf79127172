"""Sentence embeddings and set-level semantic Precision/Recall/F1.

Precision(G,T) averages, over generated sentences, the best cosine match in
the test set; Recall(G,T) is the same sum with the sets swapped, so the two
directions share one kernel. The built-in embedding is a deterministic
feature-hashed bag of terms; a remote HTTP backend adapts real encoders.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np
import requests

from .core import Corpus, normalize

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

DEFAULT_DIM = 256
DEFAULT_SEED = 0
DEFAULT_BATCH_SIZE = 64


class EmbeddingError(Exception):
    """Embedding backend failure (remote protocol or shape problems)."""


class EmptyEmbeddingSetError(EmbeddingError):
    """Set similarity was asked to score an empty corpus."""


@dataclass(frozen=True)
class SetSimilarityScores:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_precision_recall(cls, precision: float, recall: float) -> "SetSimilarityScores":
        if precision + recall == 0:
            f1 = 0.0
        elif precision == recall:
            f1 = precision  # harmonic mean of equals, without rounding drift
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
            if precision > 0 and recall > 0:
                # the harmonic mean lies between p and r; keep rounding inside
                f1 = min(max(f1, min(precision, recall)), max(precision, recall))
        return cls(precision=precision, recall=recall, f1=f1)


class EmbeddingBackend(Protocol):
    """Contract every embedding source satisfies.

    `embed_batch` must be deterministic within a process run: the same
    sentence always maps to the same vector.
    """

    id: str
    dim: int

    def embed_batch(self, sentences: Sequence[str]) -> np.ndarray: ...


def fnv1a_64(data: bytes, seed: int = 0) -> int:
    """FNV-1a 64-bit hash; the seed is XORed into the offset basis."""
    h = FNV_OFFSET_BASIS ^ (seed & _U64)
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _U64
    return h


class FeatureHashBackend:
    """Feature-hashed bag-of-terms embedding of the normalized sentence.

    Each term is hashed with seeded FNV-1a 64 into one of `dim` buckets,
    bucket counts are accumulated and the vector is L2-normalized. Empty
    sentences map to the zero vector. Documented in docs/embedding-protocol.md
    so independent implementations can reproduce it bit-for-bit.
    """

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = DEFAULT_SEED):
        if dim <= 0:
            raise ValueError("embedding dim must be positive")
        self.dim = dim
        self.seed = seed
        self.id = f"feature-hash/{dim}/seed{seed}"
        self._bucket_cache: dict[str, int] = {}

    def _bucket(self, term: str) -> int:
        b = self._bucket_cache.get(term)
        if b is None:
            b = fnv1a_64(term.encode("utf-8"), self.seed) % self.dim
            self._bucket_cache[term] = b
        return b

    def embed_batch(self, sentences: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(sentences), self.dim), dtype=np.float64)
        for i, sentence in enumerate(sentences):
            row = out[i]
            for term in normalize(sentence).split():
                row[self._bucket(term)] += 1.0
            norm = math.sqrt(float(np.dot(row, row)))
            if norm > 0.0:
                row /= norm
        return out


def embed_builtin(sentences: Sequence[str], dim: int = DEFAULT_DIM, seed: int = DEFAULT_SEED) -> np.ndarray:
    """One feature-hash embedding row per sentence."""
    return FeatureHashBackend(dim=dim, seed=seed).embed_batch(sentences)


def embed_remote(
    sentences: Sequence[str],
    endpoint: str,
    batch_size: int = DEFAULT_BATCH_SIZE,
    timeout: float = 30.0,
) -> np.ndarray:
    """POST sentences in batches to an embedding server, preserving order.

    Protocol: POST <endpoint>/embed {"sentences": [...]} ->
    {"dim": d, "embeddings": [[...], ...]} with one row per input.
    """
    if batch_size <= 0:
        raise ValueError("batch size must be positive")
    rows: list[list[float]] = []
    dim: int | None = None
    for start in range(0, len(sentences), batch_size):
        batch = list(sentences[start:start + batch_size])
        try:
            resp = requests.post(f"{endpoint.rstrip('/')}/embed",
                                 json={"sentences": batch}, timeout=timeout)
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        if resp.status_code != 200:
            raise EmbeddingError(f"embedding server returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            batch_dim = int(body["dim"])
            vectors = body["embeddings"]
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(batch):
            raise EmbeddingError(
                f"embedding server returned {len(vectors)} rows for {len(batch)} sentences")
        if dim is None:
            dim = batch_dim
        elif batch_dim != dim:
            raise EmbeddingError(f"embedding dim changed across batches: {dim} then {batch_dim}")
        for vec in vectors:
            if len(vec) != dim:
                raise EmbeddingError(f"embedding row has {len(vec)} components, expected {dim}")
            rows.append([float(x) for x in vec])
    return np.asarray(rows, dtype=np.float64).reshape(len(sentences), dim or 0)


class RemoteEmbeddingBackend:
    """Adapter for the embedding-server HTTP protocol."""

    def __init__(self, endpoint: str, batch_size: int = DEFAULT_BATCH_SIZE, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        try:
            resp = requests.get(f"{self.endpoint}/health", timeout=timeout)
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding server health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise EmbeddingError(f"embedding server health returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            self.id = str(body["id"])
            self.dim = int(body["dim"])
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbeddingError(f"malformed health response: {exc}") from exc

    def embed_batch(self, sentences: Sequence[str]) -> np.ndarray:
        return embed_remote(sentences, self.endpoint, self.batch_size, self.timeout)


class EmbeddingCache:
    """Disk cache of embeddings keyed by (backend id, sha256 of raw text).

    One file per backend id; one line per sentence: the key followed by the
    decimal components. Decimal repr round-trips float64 exactly, so cached
    runs reproduce uncached ones bit-for-bit.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._loaded: dict[str, dict[str, np.ndarray]] = {}

    @staticmethod
    def sentence_key(sentence: str) -> str:
        return hashlib.sha256(sentence.encode("utf-8")).hexdigest()

    def _path(self, backend_id: str) -> Path:
        safe = re.sub(r"[^A-Za-z0-9._-]", "_", backend_id)
        return self.directory / f"{safe}.cache"

    def _table(self, backend_id: str) -> dict[str, np.ndarray]:
        table = self._loaded.get(backend_id)
        if table is None:
            table = {}
            path = self._path(backend_id)
            if path.exists():
                for line in path.read_text(encoding="utf-8").splitlines():
                    if not line:
                        continue
                    key, _, rest = line.partition(" ")
                    table[key] = np.array([float(x) for x in rest.split()], dtype=np.float64)
            self._loaded[backend_id] = table
        return table

    def get(self, backend_id: str, sentence: str) -> np.ndarray | None:
        return self._table(backend_id).get(self.sentence_key(sentence))

    def put_many(self, backend_id: str, sentences: Sequence[str], vectors: np.ndarray) -> None:
        table = self._table(backend_id)
        with self._path(backend_id).open("a", encoding="utf-8") as fh:
            for sentence, vec in zip(sentences, vectors):
                key = self.sentence_key(sentence)
                if key in table:
                    continue
                table[key] = np.asarray(vec, dtype=np.float64)
                fh.write(key + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def default_cache_dir() -> Path | None:
    """Directory from CORPUS_SCOPE_CACHE, if set."""
    env = os.environ.get("CORPUS_SCOPE_CACHE")
    return Path(env) if env else None


def embed_corpus(
    backend: EmbeddingBackend,
    corpus: Corpus,
    cache: EmbeddingCache | None = None,
) -> np.ndarray:
    """Embed every raw sentence of a corpus, via the cache when provided."""
    sentences = corpus.raw_texts()
    if cache is None:
        return backend.embed_batch(sentences)
    hits: dict[int, np.ndarray] = {}
    missing: list[int] = []
    for i, sentence in enumerate(sentences):
        vec = cache.get(backend.id, sentence)
        if vec is None:
            missing.append(i)
        else:
            hits[i] = vec
    if missing:
        fresh = backend.embed_batch([sentences[i] for i in missing])
        cache.put_many(backend.id, [sentences[i] for i in missing], fresh)
        for row, i in enumerate(missing):
            hits[i] = fresh[row]
    dim = len(next(iter(hits.values()))) if hits else backend.dim
    out = np.zeros((len(sentences), dim), dtype=np.float64)
    for i, vec in hits.items():
        out[i] = vec
    return out


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1]; zero-norm vectors match nothing."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"embedding dimensions differ: {a.shape} vs {b.shape}")
    dot_ab = float(np.dot(a, b))
    dot_aa = float(np.dot(a, a))
    dot_bb = float(np.dot(b, b))
    if dot_aa == 0.0 or dot_bb == 0.0:
        return 0.0
    return min(1.0, max(-1.0, dot_ab / math.sqrt(dot_aa * dot_bb)))


_CHUNK_ROWS = 2048


def max_cosine_rows(a_emb: np.ndarray, b_emb: np.ndarray) -> np.ndarray:
    """For each row of a_emb, the best cosine similarity to any row of b_emb.

    A nonzero row that occurs bitwise-identically in b_emb scores exactly 1.0;
    the self-match is the maximum and cosine is clamped to [-1, 1], so the
    shortcut agrees with the exact computation.
    """
    a_emb = np.asarray(a_emb, dtype=np.float64)
    b_emb = np.asarray(b_emb, dtype=np.float64)
    if a_emb.shape[1] != b_emb.shape[1]:
        raise ValueError(f"embedding dimensions differ: {a_emb.shape[1]} vs {b_emb.shape[1]}")
    a_norms = np.sqrt(np.einsum("ij,ij->i", a_emb, a_emb))
    b_norms = np.sqrt(np.einsum("ij,ij->i", b_emb, b_emb))
    b_nonzero = b_norms > 0.0
    b_bytes = {b_emb[j].tobytes() for j in range(b_emb.shape[0]) if b_nonzero[j]}
    any_b = bool(b_nonzero.any())

    out = np.zeros(a_emb.shape[0], dtype=np.float64)
    for start in range(0, a_emb.shape[0], _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, a_emb.shape[0])
        chunk = a_emb[start:stop]
        sims = chunk @ b_emb.T
        denom = np.outer(a_norms[start:stop], b_norms)
        with np.errstate(divide="ignore", invalid="ignore"):
            sims = np.where(denom > 0.0, sims / denom, 0.0)
        np.clip(sims, -1.0, 1.0, out=sims)
        if any_b:
            out[start:stop] = sims.max(axis=1)
        for i in range(start, stop):
            if a_norms[i] > 0.0 and a_emb[i].tobytes() in b_bytes:
                out[i] = 1.0
    return out


def directed_mean_max(a_emb: np.ndarray, b_emb: np.ndarray) -> float:
    """Mean over rows of a_emb of the best cosine match in b_emb."""
    row_max = max_cosine_rows(a_emb, b_emb)
    return math.fsum(float(x) for x in row_max) / len(row_max)


def set_scores_from_embeddings(g_emb: np.ndarray, t_emb: np.ndarray) -> SetSimilarityScores:
    if g_emb.shape[0] == 0 or t_emb.shape[0] == 0:
        raise EmptyEmbeddingSetError("set similarity requires non-empty sets")
    precision = directed_mean_max(g_emb, t_emb)
    recall = directed_mean_max(t_emb, g_emb)
    return SetSimilarityScores.from_precision_recall(precision, recall)


def semantic_set_scores(
    generated: Corpus,
    test: Corpus,
    backend: EmbeddingBackend,
    cache: EmbeddingCache | None = None,
) -> SetSimilarityScores:
    """Set-level Precision/Recall/F1 of the generated corpus against the test set."""
    if len(generated) == 0 or len(test) == 0:
        raise EmptyEmbeddingSetError("semantic set scores require non-empty corpora")
    g_emb = embed_corpus(backend, generated, cache)
    t_emb = embed_corpus(backend, test, cache)
    return set_scores_from_embeddings(g_emb, t_emb)
