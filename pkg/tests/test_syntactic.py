import math
import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus_scope.core import Corpus, SentenceRecord
from corpus_scope.semantic import EmptyEmbeddingSetError
from corpus_scope.syntactic import (
    min_novelty_rows,
    syn_sim,
    syntactic_set_scores,
    word_edit_distance,
)


def brute_force_distance(a, b):
    """Plain recursive Levenshtein, the reference for the DP."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[0] == b[0] else 1
    return min(
        brute_force_distance(a[1:], b) + 1,
        brute_force_distance(a, b[1:]) + 1,
        brute_force_distance(a[1:], b[1:]) + cost,
    )


def record(tokens):
    text = " ".join(tokens)
    return SentenceRecord.from_raw(0, text)


def all_sequences(alphabet, max_len):
    seqs = [()]
    for length in range(1, max_len + 1):
        seqs.extend(product(alphabet, repeat=length))
    return seqs


class TestWordEditDistance:
    def test_identical(self):
        assert word_edit_distance(["a", "b"], ["a", "b"]).distance == 0

    def test_substitution(self):
        assert word_edit_distance(["a", "b", "c"], ["a", "b", "d"]).distance == 1

    def test_disjoint(self):
        assert word_edit_distance(["a", "b"], ["c", "d", "e"]).distance == 3

    def test_empty_cases(self):
        assert word_edit_distance([], []).distance == 0
        assert word_edit_distance([], ["x", "y"]).distance == 2

    def test_exhaustive_against_brute_force(self):
        seqs = all_sequences("abc", 3)
        for a in seqs:
            for b in seqs:
                assert word_edit_distance(a, b).distance == brute_force_distance(a, b), (a, b)

    @given(
        st.lists(st.sampled_from("abcd"), max_size=5),
        st.lists(st.sampled_from("abcd"), max_size=5),
        st.lists(st.sampled_from("abcd"), max_size=5),
    )
    def test_metric_properties(self, a, b, c):
        d_ab = word_edit_distance(a, b).distance
        assert d_ab == word_edit_distance(b, a).distance
        assert d_ab <= max(len(a), len(b))
        assert d_ab >= abs(len(a) - len(b))
        # triangle inequality
        assert d_ab <= word_edit_distance(a, c).distance + word_edit_distance(c, b).distance


class TestSynSim:
    def test_identical(self):
        assert syn_sim(record(["a", "b"]), record(["a", "b"])).value == 1.0

    def test_substitution_case(self):
        assert syn_sim(record(["a", "b", "c"]), record(["a", "b", "d"])).value == 0.75

    def test_maximal_distance(self):
        assert syn_sim(record(["a", "b"]), record(["c", "d", "e"])).value == 0.5

    def test_both_empty(self):
        assert syn_sim(record([]), record([])).value == 1.0

    def test_one_empty(self):
        assert syn_sim(record([]), record(["x", "y"])).value == 0.5

    def test_range_and_identity(self):
        rng = random.Random(7)
        for _ in range(2000):
            a = [f"t{rng.randrange(4)}" for _ in range(rng.randrange(6))]
            b = [f"t{rng.randrange(4)}" for _ in range(rng.randrange(6))]
            value = syn_sim(record(a), record(b)).value
            assert 0.5 <= value <= 1.0
            assert (value == 1.0) == (a == b)


class TestSetScores:
    def test_identical_sets(self):
        g = Corpus.from_texts("g", "generated", ["a b", "c d e"])
        scores = syntactic_set_scores(g, g)
        assert (scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0)

    def test_hand_case(self):
        g = Corpus.from_texts("g", "generated", ["a b"])
        t = Corpus.from_texts("t", "train", ["a b c"])
        scores = syntactic_set_scores(g, t)
        assert scores.precision == 0.75
        assert scores.recall == 0.75
        assert scores.f1 == 0.75

    def test_duality(self):
        rng = random.Random(3)
        for _ in range(30):
            g_texts = [" ".join(f"w{rng.randrange(5)}" for _ in range(rng.randrange(1, 5)))
                       for _ in range(rng.randrange(1, 8))]
            t_texts = [" ".join(f"w{rng.randrange(5)}" for _ in range(rng.randrange(1, 5)))
                       for _ in range(rng.randrange(1, 8))]
            g = Corpus.from_texts("g", "generated", g_texts)
            t = Corpus.from_texts("t", "train", t_texts)
            gt = syntactic_set_scores(g, t)
            tg = syntactic_set_scores(t, g)
            assert gt.precision == tg.recall
            assert gt.recall == tg.precision
            assert min(gt.precision, gt.recall) <= gt.f1 <= max(gt.precision, gt.recall)

    def test_permutation_invariance(self):
        g_texts = ["a b", "c", "d e f"]
        t_texts = ["a b", "x y"]
        base = syntactic_set_scores(Corpus.from_texts("g", "generated", g_texts),
                                    Corpus.from_texts("t", "train", t_texts))
        rng = random.Random(5)
        for _ in range(5):
            rng.shuffle(g_texts)
            rng.shuffle(t_texts)
            shuffled = syntactic_set_scores(Corpus.from_texts("g", "generated", g_texts),
                                            Corpus.from_texts("t", "train", t_texts))
            assert shuffled == base

    def test_empty_set_error(self):
        g = Corpus(name="g", role="generated", records=())
        t = Corpus.from_texts("t", "train", ["a"])
        with pytest.raises(EmptyEmbeddingSetError):
            syntactic_set_scores(g, t)

    def test_pruned_max_matches_exhaustive(self):
        # the length-bound pruning and identity short-circuit must not change results
        rng = random.Random(11)
        for _ in range(20):
            g_texts = [" ".join(f"w{rng.randrange(4)}" for _ in range(rng.randrange(7)))
                       for _ in range(6)]
            t_texts = [" ".join(f"w{rng.randrange(4)}" for _ in range(rng.randrange(7)))
                       for _ in range(6)]
            g = Corpus.from_texts("g", "generated", g_texts)
            t = Corpus.from_texts("t", "train", t_texts)
            got = syntactic_set_scores(g, t).precision
            expected = math.fsum(
                max(syn_sim(gr, tr).value for tr in t.records) for gr in g.records
            ) / len(g.records)
            assert got == expected


class TestMinNoveltyRows:
    def test_verbatim_copy_is_zero(self):
        g = Corpus.from_texts("g", "generated", ["a b c"])
        t = Corpus.from_texts("t", "train", ["a b c", "x"])
        assert min_novelty_rows(g, t) == [0.0]

    def test_hand_case_one_third(self):
        g = Corpus.from_texts("g", "generated", ["a b"])
        t = Corpus.from_texts("t", "train", ["a b c"])
        assert min_novelty_rows(g, t) == [1 / 3]

    def test_matches_exhaustive(self):
        rng = random.Random(13)
        for _ in range(20):
            g_texts = [" ".join(f"w{rng.randrange(4)}" for _ in range(rng.randrange(6)))
                       for _ in range(5)]
            t_texts = [" ".join(f"w{rng.randrange(4)}" for _ in range(1, rng.randrange(1, 6)))
                       for _ in range(5)]
            g = Corpus.from_texts("g", "generated", g_texts)
            t = Corpus.from_texts("t", "train", t_texts)
            got = min_novelty_rows(g, t)
            for row, gr in zip(got, g.records):
                candidates = []
                for tr in t.records:
                    max_len = max(len(gr.tokens), len(tr.tokens))
                    if max_len == 0:
                        candidates.append(0.0)
                    else:
                        candidates.append(
                            word_edit_distance(gr.tokens, tr.tokens).distance / max_len)
                assert row == min(candidates)
