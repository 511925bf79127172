"""Corpus characterization toolkit for automatically generated sentence sets."""

__version__ = "0.1.0"

from .core import Corpus, SentenceRecord, VocabSet, load_corpus, normalize, split_corpus, tokenize, vocabulary
from .fluency import NGramModel, corpus_grammar, corpus_plausibility, grammar_score, perplexity, train_ngram_lm
from .quantity import unique_count, unique_fraction, uniqueness_curve, vocab_gain
from .semantic import FeatureHashBackend, RemoteEmbeddingBackend, SetSimilarityScores, cosine, semantic_set_scores
from .syntactic import syn_sim, syntactic_set_scores, word_edit_distance
from .tradeoff import compute_tradeoff, density_grid, filter_upper_right
from .stats import likert_top2, load_ratings, mann_whitney_u, spearman, welch_t_test
from .report import RunConfig, assemble_report, write_report

__all__ = [
    "Corpus", "SentenceRecord", "VocabSet", "load_corpus", "normalize",
    "split_corpus", "tokenize", "vocabulary",
    "NGramModel", "corpus_grammar", "corpus_plausibility", "grammar_score",
    "perplexity", "train_ngram_lm",
    "unique_count", "unique_fraction", "uniqueness_curve", "vocab_gain",
    "FeatureHashBackend", "RemoteEmbeddingBackend", "SetSimilarityScores",
    "cosine", "semantic_set_scores",
    "syn_sim", "syntactic_set_scores", "word_edit_distance",
    "compute_tradeoff", "density_grid", "filter_upper_right",
    "likert_top2", "load_ratings", "mann_whitney_u", "spearman", "welch_t_test",
    "RunConfig", "assemble_report", "write_report",
]
