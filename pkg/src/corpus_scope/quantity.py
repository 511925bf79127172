"""Uniqueness and vocabulary-gain metrics for a generated corpus.

A generated sentence counts as unique only if its normalized form appears
exactly once in the generated set and never in the train set; every member
of a duplicate group is non-unique.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import Corpus, EmptyCorpusError


@dataclass(frozen=True)
class UniquenessResult:
    n: int
    unique_count: int
    fraction: float


@dataclass(frozen=True)
class VocabGainResult:
    new_terms: int
    new_term_list: tuple[str, ...]


def unique_count(generated: Corpus, train: Corpus) -> int:
    """Number of generated sentences colliding with nothing else.

    Collisions are exact matches of the normalized form, either against the
    train set or against any other generated sentence.
    """
    if len(generated) == 0:
        raise EmptyCorpusError("unique_count requires a non-empty generated corpus")
    gen_counts = Counter(generated.normalized_texts())
    train_forms = set(train.normalized_texts())
    return sum(
        1
        for rec in generated.records
        if gen_counts[rec.normalized] == 1 and rec.normalized not in train_forms
    )


def unique_fraction(generated: Corpus, train: Corpus) -> UniquenessResult:
    """Unique(n) = U_n / n over the full generated corpus."""
    n = len(generated)
    u = unique_count(generated, train)
    return UniquenessResult(n=n, unique_count=u, fraction=u / n)


def uniqueness_curve(
    generated: Corpus, train: Corpus, checkpoints: list[int]
) -> list[UniquenessResult]:
    """Unique(n) over the first n generated records, for each checkpoint n.

    Duplicates are counted within each prefix, matching the reading of n as
    the number of sampling attempts so far.
    """
    if len(generated) == 0:
        raise EmptyCorpusError("uniqueness_curve requires a non-empty generated corpus")
    prev = 0
    for n in checkpoints:
        if n <= prev:
            raise ValueError(f"checkpoints must be ascending positive integers, got {checkpoints}")
        if n > len(generated):
            raise ValueError(f"checkpoint {n} exceeds corpus size {len(generated)}")
        prev = n

    train_forms = set(train.normalized_texts())
    seen: Counter[str] = Counter()
    unique_now = 0  # forms with count == 1 that miss the train set
    results = []
    pos = 0
    for n in checkpoints:
        while pos < n:
            form = generated.records[pos].normalized
            seen[form] += 1
            if form not in train_forms:
                if seen[form] == 1:
                    unique_now += 1
                elif seen[form] == 2:
                    unique_now -= 1
            pos += 1
        results.append(UniquenessResult(n=n, unique_count=unique_now, fraction=unique_now / n))
    return results


def vocab_gain(generated: Corpus, train: Corpus) -> VocabGainResult:
    """Terms of the generated set absent from the train vocabulary."""
    gen_terms = {t for rec in generated.records for t in rec.tokens}
    train_terms = {t for rec in train.records for t in rec.tokens}
    new = sorted(gen_terms - train_terms)
    return VocabGainResult(new_terms=len(new), new_term_list=tuple(new))
