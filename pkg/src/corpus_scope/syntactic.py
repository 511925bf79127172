"""Word-level Levenshtein distance and syntactic set similarity.

SynSim(s1, s2) = 1 / (1 + dist / max(len1, len2)) lives in [0.5, 1] and hits
1 exactly for identical token sequences. Set scores are the semantic-module
Precision/Recall/F1 with SynSim as the pairwise similarity; the reference
set for generated corpora is the train split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import Corpus, SentenceRecord
from .semantic import EmptyEmbeddingSetError, SetSimilarityScores


@dataclass(frozen=True)
class EditDistanceResult:
    distance: int
    len_a: int
    len_b: int


@dataclass(frozen=True)
class SynSimScore:
    value: float


def _levenshtein(a: Sequence, b: Sequence) -> int:
    # two-row DP over the shorter sequence to keep memory at O(min(len))
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, x in enumerate(a, start=1):
        cur[0] = i
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j - 1], prev[j], cur[j - 1])
        prev, cur = cur, prev
    return prev[len(b)]


def word_edit_distance(a: Sequence[str], b: Sequence[str]) -> EditDistanceResult:
    """Levenshtein distance over term sequences with unit add/delete/update costs."""
    return EditDistanceResult(distance=_levenshtein(a, b), len_a=len(a), len_b=len(b))


def _syn_sim_tokens(a: Sequence[str], b: Sequence[str]) -> float:
    max_len = max(len(a), len(b))
    if max_len == 0:
        return 1.0  # both empty: zero distance, defined as identical
    return 1.0 / (1.0 + _levenshtein(a, b) / max_len)


def syn_sim(s1: SentenceRecord, s2: SentenceRecord) -> SynSimScore:
    """Normalized-edit-distance similarity between two sentences."""
    return SynSimScore(value=_syn_sim_tokens(s1.tokens, s2.tokens))


def _intern_tokens(corpus: Corpus, table: dict[str, int]) -> list[tuple[int, ...]]:
    # map terms to ints so the DP compares machine words, not strings
    out = []
    for rec in corpus.records:
        out.append(tuple(table.setdefault(t, len(table)) for t in rec.tokens))
    return out


def max_synsim_rows(generated: Corpus, reference: Corpus) -> list[float]:
    """For each generated sentence, its best SynSim against the reference set.

    Exact: the length-difference lower bound on the distance only skips
    candidates that provably cannot beat the current best, and a verbatim
    token-sequence match short-circuits at the score ceiling of 1.0.
    """
    table: dict[str, int] = {}
    gen_tokens = _intern_tokens(generated, table)
    ref_tokens = _intern_tokens(reference, table)
    ref_set = set(ref_tokens)

    out = []
    for tokens in gen_tokens:
        if tokens in ref_set:
            out.append(1.0)
            continue
        la = len(tokens)
        best = 0.0
        for other in ref_tokens:
            lb = len(other)
            max_len = max(la, lb)
            if max_len == 0:
                sim = 1.0
            else:
                # dist >= |la - lb| caps the achievable similarity
                if 1.0 / (1.0 + abs(la - lb) / max_len) <= best:
                    continue
                sim = 1.0 / (1.0 + _levenshtein(tokens, other) / max_len)
            if sim > best:
                best = sim
                if best == 1.0:
                    break
        out.append(best)
    return out


def min_novelty_rows(generated: Corpus, reference: Corpus) -> list[float]:
    """For each generated sentence, the normalized edit distance to the
    closest reference sentence: min over the reference set of dist / max-len.

    0 exactly when an identical token sequence exists in the reference set;
    1 at the far end (nothing shared, e.g. against an empty sentence).
    """
    table: dict[str, int] = {}
    gen_tokens = _intern_tokens(generated, table)
    ref_tokens = _intern_tokens(reference, table)
    ref_set = set(ref_tokens)

    out = []
    for tokens in gen_tokens:
        if tokens in ref_set:
            out.append(0.0)
            continue
        la = len(tokens)
        best = 1.0
        for other in ref_tokens:
            lb = len(other)
            max_len = max(la, lb)
            if max_len == 0:
                continue  # unreachable: identical empties short-circuit above
            # dist >= |la - lb| floors the achievable normalized distance
            if abs(la - lb) / max_len >= best:
                continue
            nd = _levenshtein(tokens, other) / max_len
            if nd < best:
                best = nd
                if best == 0.0:
                    break
        out.append(best)
    return out


def directed_mean_max_synsim(generated: Corpus, reference: Corpus) -> float:
    rows = max_synsim_rows(generated, reference)
    return math.fsum(rows) / len(rows)


def syntactic_set_scores(generated: Corpus, train_ref: Corpus) -> SetSimilarityScores:
    """Set-level Precision/Recall/F1 with SynSim as the pairwise similarity."""
    if len(generated) == 0 or len(train_ref) == 0:
        raise EmptyEmbeddingSetError("syntactic set scores require non-empty corpora")
    precision = directed_mean_max_synsim(generated, train_ref)
    recall = directed_mean_max_synsim(train_ref, generated)
    return SetSimilarityScores.from_precision_recall(precision, recall)
