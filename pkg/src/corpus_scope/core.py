"""Corpus ingestion, normalization, tokenization, splitting and vocabulary.

Everything downstream (uniqueness, edit distance, embeddings, the n-gram LM)
operates on the normalized/tokenized view produced here, so the rules are
pinned: Unicode lowercase, punctuation stripped, whitespace collapsed.
"""

from __future__ import annotations

import csv
import random
import re
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

ROLES = ("train", "validation", "test", "generated")

_WS_RE = re.compile(r"\s+")
_ASCII_PUNCT = set(string.punctuation)


class CorpusError(Exception):
    """Base error for corpus ingestion and handling."""


class EmptyCorpusError(CorpusError):
    """An input file produced no sentence records."""


class _PunctDeleteTable(dict):
    """Lazy str.translate table deleting Unicode P* and ASCII punctuation."""

    def __missing__(self, codepoint: int):
        ch = chr(codepoint)
        if ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P"):
            result = None  # delete
        else:
            result = codepoint  # keep as-is
        self[codepoint] = result
        return result


_PUNCT_TABLE = _PunctDeleteTable()


def normalize(raw: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace runs, trim.

    Punctuation means Unicode general categories P* plus the ASCII
    punctuation set (which adds symbols like ``$ + < = > ^ | ~``).
    Idempotent; the empty string is a legal result.
    """
    lowered = raw.lower()
    stripped = lowered.translate(_PUNCT_TABLE)
    return _WS_RE.sub(" ", stripped).strip()


def tokenize(normalized: str) -> tuple[str, ...]:
    """Whitespace-split an already-normalized sentence into terms."""
    return tuple(normalized.split())


@dataclass(frozen=True)
class SentenceRecord:
    """A sentence with its normalized form and term tokens."""

    id: int
    raw: str
    normalized: str
    tokens: tuple[str, ...]

    @classmethod
    def from_raw(cls, id: int, raw: str) -> "SentenceRecord":
        normalized = normalize(raw)
        return cls(id=id, raw=raw, normalized=normalized, tokens=tokenize(normalized))


@dataclass(frozen=True)
class Corpus:
    """A named, role-tagged ordered set of sentences.

    Duplicate texts are kept; they are meaningful for uniqueness metrics.
    """

    name: str
    role: str
    records: tuple[SentenceRecord, ...]

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown corpus role {self.role!r}, expected one of {ROLES}")
        for i, rec in enumerate(self.records):
            if rec.id != i:
                raise ValueError(f"record ids must be 0..n-1 in order, found {rec.id} at {i}")

    def __len__(self) -> int:
        return len(self.records)

    def raw_texts(self) -> list[str]:
        return [r.raw for r in self.records]

    def normalized_texts(self) -> list[str]:
        return [r.normalized for r in self.records]

    @classmethod
    def from_texts(cls, name: str, role: str, texts: Iterable[str]) -> "Corpus":
        records = tuple(SentenceRecord.from_raw(i, t) for i, t in enumerate(texts))
        return cls(name=name, role=role, records=records)


@dataclass
class VocabSet:
    """Term occurrence counts over a corpus."""

    terms: Mapping[str, int] = field(default_factory=Counter)

    def __contains__(self, term: str) -> bool:
        return term in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def term_set(self) -> set[str]:
        return set(self.terms)

    def total_count(self) -> int:
        return sum(self.terms.values())


def load_corpus(
    path: str | Path,
    format: str = "lines",
    role: str = "train",
    name: str | None = None,
    csv_column: str | None = None,
) -> Corpus:
    """Load a corpus from a one-sentence-per-line file or a CSV column.

    Blank lines (or blank cells) are skipped; empty sentences would break
    length-normalized metrics downstream. An input that yields no records
    raises EmptyCorpusError.
    """
    path = Path(path)
    if name is None:
        name = path.stem
    if format == "lines":
        texts = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    elif format == "csv":
        if not csv_column:
            raise CorpusError("csv format requires a text column name")
        texts = []
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or csv_column not in reader.fieldnames:
                raise CorpusError(f"csv column {csv_column!r} not found in {path}")
            for row in reader:
                cell = row.get(csv_column)
                if cell is None:
                    raise CorpusError(f"malformed csv row in {path}: {row}")
                if cell.strip():
                    texts.append(cell)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    if not texts:
        raise EmptyCorpusError(f"no sentences found in {path}")
    return Corpus.from_texts(name, role, texts)


def split_corpus(
    corpus: Corpus,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[Corpus, Corpus, Corpus]:
    """Deterministic shuffle-and-slice split into (train, validation, test).

    The validation and test parts get floor(n * ratio) records each and the
    remainder goes to train, so sizes are reproducible from n alone.
    """
    r_train, r_valid, r_test = ratios
    if min(ratios) <= 0:
        raise ValueError("split ratios must be positive")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
    n = len(corpus)
    if n < 3:
        raise CorpusError(f"corpus too small to split: {n} records")

    n_valid = int(n * r_valid)
    n_test = int(n * r_test)
    n_train = n - n_valid - n_test

    indices = list(range(n))
    random.Random(seed).shuffle(indices)

    def part(idx: Sequence[int], role: str, suffix: str) -> Corpus:
        records = tuple(
            SentenceRecord(id=i, raw=corpus.records[j].raw,
                           normalized=corpus.records[j].normalized,
                           tokens=corpus.records[j].tokens)
            for i, j in enumerate(idx)
        )
        return Corpus(name=f"{corpus.name}-{suffix}", role=role, records=records)

    return (
        part(indices[:n_train], "train", "train"),
        part(indices[n_train:n_train + n_valid], "validation", "validation"),
        part(indices[n_train + n_valid:], "test", "test"),
    )


def vocabulary(corpus: Corpus) -> VocabSet:
    """Occurrence counts over all tokens of all records."""
    counts: Counter[str] = Counter()
    for rec in corpus.records:
        counts.update(rec.tokens)
    return VocabSet(terms=counts)
