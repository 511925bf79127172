"""Grammar-error density and n-gram perplexity scoring.

Grammar checking delegates to a LanguageTool-compatible HTTP service and
normalizes the match count by the token length of the sentence. Plausibility
is true perplexity under an add-k-smoothed n-gram model trained on the train
split; any object with the same `perplexity` method can stand in for it.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .core import Corpus, EmptyCorpusError, SentenceRecord

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

DEFAULT_LM_ORDER = 3
DEFAULT_LM_ADD_K = 0.1
DEFAULT_LANGUAGE = "en-US"
DEFAULT_PROOFREADER_WORKERS = 4


class ScoringError(Exception):
    """A per-sentence metric failed; carries the offending sentence id."""

    def __init__(self, message: str, sentence_id: int | None = None):
        super().__init__(message)
        self.sentence_id = sentence_id


class UnsmoothedZeroError(ScoringError):
    """An unseen n-gram has zero probability because add_k is 0."""


class ProofreaderError(ScoringError):
    """The proofreading service could not produce an error count."""


@dataclass(frozen=True)
class GrammarScore:
    errors: int
    length: int
    score: float


@dataclass(frozen=True)
class PlausibilityScore:
    perplexity: float


class ProofreaderBackend(Protocol):
    def check(self, text: str) -> int: ...


class LanguageModelBackend(Protocol):
    def perplexity(self, sentence: SentenceRecord) -> PlausibilityScore: ...


def check_remote(
    text: str,
    endpoint: str,
    language: str = DEFAULT_LANGUAGE,
    attempts: int = 3,
    timeout: float = 30.0,
    backoff: float = 0.2,
) -> int:
    """Number of matches a LanguageTool v2 check API reports for the text.

    Network failures and 5xx responses are retried up to `attempts` times;
    4xx responses and malformed bodies fail immediately.
    """
    url = f"{endpoint.rstrip('/')}/v2/check"
    last_error = "no attempt made"
    for attempt in range(attempts):
        if attempt:
            time.sleep(backoff * attempt)
        try:
            resp = requests.post(url, data={"text": text, "language": language}, timeout=timeout)
        except requests.RequestException as exc:
            last_error = f"request failed: {exc}"
            continue
        if resp.status_code >= 500:
            last_error = f"server returned HTTP {resp.status_code}"
            continue
        if resp.status_code != 200:
            raise ProofreaderError(f"proofreader returned HTTP {resp.status_code}")
        try:
            matches = resp.json()["matches"]
            return len(matches)
        except (ValueError, KeyError, TypeError) as exc:
            raise ProofreaderError(f"malformed proofreader response: {exc}") from exc
    raise ProofreaderError(f"proofreader unreachable after {attempts} attempts: {last_error}")


class RemoteProofreader:
    """LanguageTool-v2 HTTP backend; checks the raw sentence text."""

    def __init__(self, endpoint: str, language: str = DEFAULT_LANGUAGE,
                 attempts: int = 3, timeout: float = 30.0, backoff: float = 0.2):
        self.endpoint = endpoint
        self.language = language
        self.attempts = attempts
        self.timeout = timeout
        self.backoff = backoff

    def check(self, text: str) -> int:
        return check_remote(text, self.endpoint, self.language,
                            attempts=self.attempts, timeout=self.timeout, backoff=self.backoff)


def grammar_score(sentence: SentenceRecord, proofreader: ProofreaderBackend) -> GrammarScore:
    """Proofreader error count on the raw text over the normalized token count.

    The raw sentence goes to the backend because punctuation and casing are
    exactly what a grammar checker needs to see.
    """
    length = len(sentence.tokens)
    if length == 0:
        raise ScoringError("cannot grammar-score an empty sentence", sentence.id)
    errors = proofreader.check(sentence.raw)
    return GrammarScore(errors=errors, length=length, score=errors / length)


def grammar_score_rows(
    corpus: Corpus,
    proofreader: ProofreaderBackend,
    max_workers: int = DEFAULT_PROOFREADER_WORKERS,
) -> list[float]:
    """Per-sentence grammar scores, with bounded concurrent checks.

    Results are order-restored by sentence id; a failure on any sentence
    aborts with that sentence's id attached.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("grammar scoring requires a non-empty corpus")

    def score_one(record: SentenceRecord) -> float:
        try:
            return grammar_score(record, proofreader).score
        except ScoringError:
            raise
        except Exception as exc:
            raise ScoringError(f"grammar backend failed on sentence {record.id}: {exc}",
                               record.id) from exc

    if max_workers <= 1 or len(corpus) == 1:
        return [score_one(r) for r in corpus.records]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(score_one, corpus.records))


def corpus_grammar(
    corpus: Corpus,
    proofreader: ProofreaderBackend,
    max_workers: int = DEFAULT_PROOFREADER_WORKERS,
) -> float:
    """Mean per-sentence grammar score over the corpus."""
    scores = grammar_score_rows(corpus, proofreader, max_workers)
    return math.fsum(scores) / len(scores)


@dataclass
class NGramModel:
    """Add-k-smoothed n-gram model over padded term sequences.

    Sentences are padded with (order - 1) BOS markers and one EOS. Terms
    seen once in training stay in the vocabulary; unknown terms at scoring
    time map to UNK. Conditional probabilities use add-k over the full
    vocabulary, so every context's distribution sums to 1.
    """

    order: int
    add_k: float
    counts: dict[tuple[str, ...], Counter] = field(default_factory=dict)
    context_totals: dict[tuple[str, ...], int] = field(default_factory=dict)
    vocab: set[str] = field(default_factory=set)

    def probability(self, context: tuple[str, ...], term: str) -> float:
        term_counts = self.counts.get(context)
        count = term_counts[term] if term_counts is not None else 0
        total = self.context_totals.get(context, 0)
        denom = total + self.add_k * len(self.vocab)
        if denom == 0.0 or count + self.add_k == 0.0:
            raise UnsmoothedZeroError(
                f"zero probability for {term!r} after context {context!r} with add_k=0")
        return (count + self.add_k) / denom

    def _map_term(self, term: str) -> str:
        return term if term in self.vocab else UNK

    def perplexity(self, sentence: SentenceRecord) -> PlausibilityScore:
        """exp of the mean negative log probability over tokens plus EOS."""
        if len(sentence.tokens) == 0:
            raise ScoringError("cannot score an empty sentence", sentence.id)
        padded = [BOS] * (self.order - 1) + [self._map_term(t) for t in sentence.tokens] + [EOS]
        log_sum = 0.0
        events = len(sentence.tokens) + 1
        for i in range(self.order - 1, len(padded)):
            context = tuple(padded[i - self.order + 1:i])
            p = self.probability(context, padded[i])
            if p <= 0.0:
                raise UnsmoothedZeroError(
                    f"zero probability for {padded[i]!r} after context {context!r}")
            log_sum += math.log(p)
        return PlausibilityScore(perplexity=math.exp(-log_sum / events))


def perplexity(model: LanguageModelBackend, sentence: SentenceRecord) -> PlausibilityScore:
    """Perplexity of one sentence under a language model backend."""
    return model.perplexity(sentence)


def train_ngram_lm(train: Corpus, order: int = DEFAULT_LM_ORDER,
                   add_k: float = DEFAULT_LM_ADD_K) -> NGramModel:
    """Count n-grams of the train corpus into a scoring model."""
    if order < 1:
        raise ValueError("n-gram order must be >= 1")
    if add_k < 0:
        raise ValueError("add_k must be >= 0")
    if len(train) == 0:
        raise EmptyCorpusError("cannot train a language model on an empty corpus")

    model = NGramModel(order=order, add_k=add_k)
    model.vocab.update((BOS, EOS, UNK))
    for rec in train.records:
        model.vocab.update(rec.tokens)
        padded = [BOS] * (order - 1) + list(rec.tokens) + [EOS]
        for i in range(order - 1, len(padded)):
            context = tuple(padded[i - order + 1:i])
            bucket = model.counts.get(context)
            if bucket is None:
                bucket = model.counts[context] = Counter()
            bucket[padded[i]] += 1
            model.context_totals[context] = model.context_totals.get(context, 0) + 1
    return model


def plausibility_rows(corpus: Corpus, backend: LanguageModelBackend) -> list[float]:
    """Per-sentence perplexity under the given language model."""
    if len(corpus) == 0:
        raise EmptyCorpusError("plausibility scoring requires a non-empty corpus")
    values = []
    for rec in corpus.records:
        try:
            values.append(backend.perplexity(rec).perplexity)
        except ScoringError:
            raise
        except Exception as exc:
            raise ScoringError(f"plausibility backend failed on sentence {rec.id}: {exc}",
                               rec.id) from exc
    return values


def corpus_plausibility(corpus: Corpus, backend: LanguageModelBackend) -> float:
    """Mean per-sentence perplexity over the corpus."""
    values = plausibility_rows(corpus, backend)
    return math.fsum(values) / len(values)
