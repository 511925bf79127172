"""Characterization report assembly and serialization.

The report is one row per corpus. The train and test rows are baselines:
the train row carries raw distinct-sentence/term counts and the train-vs-test
semantic scores; the test row carries its vocabulary gain over train and its
syntactic scores against train. Generated rows compare semantics against the
test split and syntax against the train split. NA cells mirror that layout
(train plausibility, train syntactic, test semantic).
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from . import __version__
from .core import Corpus, SentenceRecord, vocabulary
from .fluency import (
    NGramModel,
    RemoteProofreader,
    grammar_score_rows,
    plausibility_rows,
    train_ngram_lm,
)
from .quantity import UniquenessResult, unique_fraction, uniqueness_curve, vocab_gain
from .semantic import (
    EmbeddingCache,
    FeatureHashBackend,
    RemoteEmbeddingBackend,
    SetSimilarityScores,
    embed_corpus,
    max_cosine_rows,
)
from .syntactic import max_synsim_rows


class ConfigError(Exception):
    """Contradictory or incomplete run configuration."""


@dataclass
class RunConfig:
    """Effective configuration of a characterization run, echoed into output."""

    train: str
    test: str
    generated: tuple[str, ...]
    out_dir: str = "out"
    input_format: str = "lines"
    csv_column: str | None = None
    embedding: str = "builtin"
    embed_endpoint: str | None = None
    embed_dim: int = 256
    embed_seed: int = 0
    embed_batch_size: int = 64
    proofreader: str = "none"
    proofreader_endpoint: str | None = None
    language: str = "en-US"
    lm_order: int = 3
    lm_add_k: float = 0.1
    sample_g: int | None = None
    sample_seed: int = 0
    checkpoints: tuple[int, ...] | None = None
    cache_dir: str | None = None

    def validate(self) -> None:
        for path in (self.train, self.test, *self.generated):
            if not Path(path).exists():
                raise ConfigError(f"input file does not exist: {path}")
        if self.embedding not in ("builtin", "remote"):
            raise ConfigError(f"unknown embedding backend {self.embedding!r}")
        if self.embedding == "remote" and not self.embed_endpoint:
            raise ConfigError("remote embedding requires an endpoint")
        if self.embedding == "builtin" and self.embed_endpoint:
            raise ConfigError("--embed-endpoint contradicts the builtin embedding backend")
        if self.proofreader not in ("none", "remote"):
            raise ConfigError(f"unknown proofreader backend {self.proofreader!r}")
        if self.proofreader == "remote" and not self.proofreader_endpoint:
            raise ConfigError("remote proofreader requires an endpoint")
        if self.input_format not in ("lines", "csv"):
            raise ConfigError(f"unknown input format {self.input_format!r}")
        if self.input_format == "csv" and not self.csv_column:
            raise ConfigError("csv input requires a text column name")
        if self.lm_order < 1 or self.lm_add_k < 0:
            raise ConfigError("language model needs order >= 1 and add_k >= 0")
        if self.sample_g is not None and self.sample_g < 1:
            raise ConfigError("sample size must be positive")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


@dataclass(frozen=True)
class CharacterizationRow:
    corpus_name: str
    unique: float | int
    vocab: int
    grammar: float | None
    plausibility: float | None
    semantic: SetSimilarityScores | None
    syntactic: SetSimilarityScores | None


@dataclass
class PerSentenceScores:
    """Per-sentence metric dump for a generated corpus (stats-command food)."""

    corpus_name: str
    sentence_ids: list[int]
    grammar: list[float] | None
    plausibility: list[float]
    semantic_max: list[float]
    syntactic_max: list[float]


@dataclass
class CharacterizationResult:
    rows: list[CharacterizationRow]
    details: list[PerSentenceScores] = field(default_factory=list)
    curves: dict[str, list[UniquenessResult]] = field(default_factory=dict)


def resolve_cache(config: RunConfig) -> EmbeddingCache | None:
    """Embedding cache location: explicit dir, then the CORPUS_SCOPE_CACHE
    environment variable, then (remote backends only) under the out dir."""
    if config.cache_dir:
        return EmbeddingCache(config.cache_dir)
    env = os.environ.get("CORPUS_SCOPE_CACHE")
    if env:
        return EmbeddingCache(env)
    if config.embedding == "remote":
        return EmbeddingCache(Path(config.out_dir) / "embed-cache")
    return None


def make_embedding_backend(config: RunConfig):
    if config.embedding == "remote":
        return RemoteEmbeddingBackend(config.embed_endpoint, batch_size=config.embed_batch_size)
    return FeatureHashBackend(dim=config.embed_dim, seed=config.embed_seed)


def make_proofreader(config: RunConfig) -> RemoteProofreader | None:
    if config.proofreader == "remote":
        return RemoteProofreader(config.proofreader_endpoint, language=config.language)
    return None


def sample_corpus(corpus: Corpus, n: int, seed: int) -> tuple[Corpus, list[int]]:
    """Uniform sample without replacement, kept in generation order.

    Returns the sampled corpus (re-indexed) plus the original sentence ids.
    """
    if n >= len(corpus):
        return corpus, list(range(len(corpus)))
    picked = sorted(random.Random(seed).sample(range(len(corpus)), n))
    records = tuple(
        SentenceRecord(id=i, raw=corpus.records[j].raw,
                       normalized=corpus.records[j].normalized,
                       tokens=corpus.records[j].tokens)
        for i, j in enumerate(picked)
    )
    return Corpus(name=corpus.name, role=corpus.role, records=records), picked


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def characterize_corpora(
    train: Corpus,
    test: Corpus,
    generated_corpora: list[Corpus],
    config: RunConfig,
    embedding_backend=None,
    proofreader=None,
    lm: NGramModel | None = None,
) -> CharacterizationResult:
    """Compute every report row plus per-sentence dumps and uniqueness curves.

    Backends default from the config; pass explicit objects to override.
    Sampling (when configured) applies to the per-sentence metrics of the
    generated corpora; uniqueness and vocabulary gain always see the full
    corpus because both depend on the number of sampling attempts n.
    """
    backend = embedding_backend if embedding_backend is not None else make_embedding_backend(config)
    if proofreader is None:
        proofreader = make_proofreader(config)
    if lm is None:
        lm = train_ngram_lm(train, order=config.lm_order, add_k=config.lm_add_k)
    cache = resolve_cache(config)

    train_emb = embed_corpus(backend, train, cache)
    test_emb = embed_corpus(backend, test, cache)

    train_row = CharacterizationRow(
        corpus_name=train.name,
        unique=len(set(train.normalized_texts())),
        vocab=len(vocabulary(train)),
        grammar=_mean(grammar_score_rows(train, proofreader)) if proofreader else None,
        plausibility=None,
        semantic=SetSimilarityScores.from_precision_recall(
            _mean(max_cosine_rows(train_emb, test_emb)),
            _mean(max_cosine_rows(test_emb, train_emb)),
        ),
        syntactic=None,
    )
    test_row = CharacterizationRow(
        corpus_name=test.name,
        unique=len(set(test.normalized_texts())),
        vocab=vocab_gain(test, train).new_terms,
        grammar=_mean(grammar_score_rows(test, proofreader)) if proofreader else None,
        plausibility=_mean(plausibility_rows(test, lm)),
        semantic=None,
        syntactic=SetSimilarityScores.from_precision_recall(
            _mean(max_synsim_rows(test, train)),
            _mean(max_synsim_rows(train, test)),
        ),
    )

    result = CharacterizationResult(rows=[train_row, test_row])
    for gen in generated_corpora:
        if config.sample_g is not None:
            gen_eval, original_ids = sample_corpus(gen, config.sample_g, config.sample_seed)
        else:
            gen_eval, original_ids = gen, list(range(len(gen)))

        gen_emb = embed_corpus(backend, gen_eval, cache)
        sem_rows = [float(x) for x in max_cosine_rows(gen_emb, test_emb)]
        sem_recall = _mean(max_cosine_rows(test_emb, gen_emb))
        syn_rows = max_synsim_rows(gen_eval, train)
        syn_recall = _mean(max_synsim_rows(train, gen_eval))
        grammar_rows = grammar_score_rows(gen_eval, proofreader) if proofreader else None
        plaus_rows = plausibility_rows(gen_eval, lm)

        result.rows.append(CharacterizationRow(
            corpus_name=gen.name,
            unique=unique_fraction(gen, train).fraction,
            vocab=vocab_gain(gen, train).new_terms,
            grammar=_mean(grammar_rows) if grammar_rows is not None else None,
            plausibility=_mean(plaus_rows),
            semantic=SetSimilarityScores.from_precision_recall(_mean(sem_rows), sem_recall),
            syntactic=SetSimilarityScores.from_precision_recall(_mean(syn_rows), syn_recall),
        ))
        result.details.append(PerSentenceScores(
            corpus_name=gen.name,
            sentence_ids=original_ids,
            grammar=grammar_rows,
            plausibility=plaus_rows,
            semantic_max=sem_rows,
            syntactic_max=syn_rows,
        ))
        if config.checkpoints:
            result.curves[gen.name] = uniqueness_curve(gen, train, list(config.checkpoints))
    return result


def assemble_report(
    train: Corpus,
    test: Corpus,
    generated_corpora: list[Corpus],
    config: RunConfig,
    embedding_backend=None,
    proofreader=None,
    lm: NGramModel | None = None,
) -> list[CharacterizationRow]:
    """The Table-1-shaped rows: train and test baselines, then generated corpora."""
    return characterize_corpora(train, test, generated_corpora, config,
                                embedding_backend, proofreader, lm).rows


def _scores_dict(scores: SetSimilarityScores | None) -> dict | None:
    if scores is None:
        return None
    return {"p": scores.precision, "r": scores.recall, "f1": scores.f1}


def report_to_dict(rows: list[CharacterizationRow], config: RunConfig | None = None) -> dict:
    return {
        "rows": [
            {
                "corpus": r.corpus_name,
                "unique": r.unique,
                "vocab": r.vocab,
                "grammar": r.grammar,
                "plausibility": r.plausibility,
                "semantic": _scores_dict(r.semantic),
                "syntactic": _scores_dict(r.syntactic),
            }
            for r in rows
        ],
        "config": config.to_dict() if config is not None else {},
        "tool_version": __version__,
    }


def _fmt(value: float | int | None) -> str:
    if value is None:
        return "NA"
    if isinstance(value, int):
        return str(value)
    return f"{value:.4f}"


def _row_cells(row: CharacterizationRow) -> list[str]:
    cells = [row.corpus_name, _fmt(row.unique), _fmt(row.vocab),
             _fmt(row.grammar), _fmt(row.plausibility)]
    for scores in (row.semantic, row.syntactic):
        if scores is None:
            cells += ["NA", "NA", "NA"]
        else:
            cells += [_fmt(scores.precision), _fmt(scores.recall), _fmt(scores.f1)]
    return cells


_HEADER = ["Corpus", "Unique", "Vocab", "Grammar", "Plausibility",
           "Semantic P", "Semantic R", "Semantic F1",
           "Syntactic P", "Syntactic R", "Syntactic F1"]


def render_markdown(rows: list[CharacterizationRow]) -> str:
    lines = ["| " + " | ".join(_HEADER) + " |",
             "|" + "---|" * len(_HEADER)]
    for row in rows:
        lines.append("| " + " | ".join(_row_cells(row)) + " |")
    return "\n".join(lines) + "\n"


def render_csv(rows: list[CharacterizationRow]) -> str:
    header = ["corpus", "unique", "vocab", "grammar", "plausibility",
              "semantic_precision", "semantic_recall", "semantic_f1",
              "syntactic_precision", "syntactic_recall", "syntactic_f1"]
    lines = [",".join(header)]
    for row in rows:
        cells = ["" if c == "NA" else c for c in _row_cells(row)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_report(
    rows: list[CharacterizationRow],
    format: str,
    path: str | Path,
    config: RunConfig | None = None,
) -> None:
    """Serialize rows as json (full precision + config echo), markdown or csv."""
    path = Path(path)
    if format == "json":
        text = json.dumps(report_to_dict(rows, config), indent=2) + "\n"
    elif format == "markdown":
        text = render_markdown(rows)
    elif format == "csv":
        text = render_csv(rows)
    else:
        raise ValueError(f"unknown report format {format!r}")
    path.write_text(text, encoding="utf-8")


def write_per_sentence_scores(detail: PerSentenceScores, path: str | Path) -> None:
    """CSV dump of the per-sentence scores behind a generated row."""
    lines = ["sentence_id,grammar,plausibility,semantic_max,syntactic_max"]
    for i, sid in enumerate(detail.sentence_ids):
        grammar = repr(detail.grammar[i]) if detail.grammar is not None else ""
        lines.append(f"{sid},{grammar},{repr(detail.plausibility[i])},"
                     f"{repr(detail.semantic_max[i])},{repr(detail.syntactic_max[i])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_uniqueness_curve(curve: list[UniquenessResult], path: str | Path) -> None:
    lines = ["n,unique_count,fraction"]
    for point in curve:
        lines.append(f"{point.n},{point.unique_count},{repr(point.fraction)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
