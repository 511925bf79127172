"""Acceptance gate: one test per criterion, one printed line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the pass/fail lines.
Every expected value is either forced arithmetic, an independent brute-force
oracle computed inside the test, or the frozen golden fixture.
"""

import json
import math
import os
import random
import shutil
import subprocess
import sys
from itertools import combinations, product
from pathlib import Path

import numpy as np
import pytest

from corpus_scope.core import Corpus, load_corpus
from corpus_scope.fluency import ProofreaderError, check_remote, train_ngram_lm
from corpus_scope.quantity import unique_fraction, uniqueness_curve, vocab_gain
from corpus_scope.semantic import FeatureHashBackend, embed_remote, semantic_set_scores
from corpus_scope.stats import mann_whitney_u, spearman, welch_t_test
from corpus_scope.syntactic import syn_sim, word_edit_distance
from corpus_scope.tradeoff import TradeoffPoint, compute_tradeoff, density_grid

GOLDEN = Path(__file__).parent / "fixtures" / "golden"


def passed(line):
    print(f"[PASS] {line}")


def brute_force_distance(a, b):
    """Recursive brute-force Levenshtein, independent of the two-row DP."""
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


def test_edit_distance_oracle():
    seqs = [()]
    for length in range(1, 5):
        seqs.extend(product("abc", repeat=length))
    assert len(seqs) == 121 and len(seqs) ** 2 == 14641
    mismatches = 0
    for a in seqs:
        for b in seqs:
            if word_edit_distance(a, b).distance != brute_force_distance(a, b):
                mismatches += 1
    assert mismatches == 0
    passed("edit-distance DP equals recursive brute force on all 14,641 pairs")


def test_syn_sim_range_and_identity():
    record = lambda tokens: Corpus.from_texts("c", "train", [" ".join(tokens) or ""]).records[0]
    rng = random.Random(101)
    for _ in range(10_000):
        a = [f"t{rng.randrange(4)}" for _ in range(rng.randrange(6))]
        b = [f"t{rng.randrange(4)}" for _ in range(rng.randrange(6))]
        value = syn_sim(record(a), record(b)).value
        assert 0.5 <= value <= 1.0
        assert (value == 1.0) == (a == b)
    assert syn_sim(record(["a", "b", "c"]), record(["a", "b", "d"])).value == 0.75
    assert syn_sim(record(["a", "b"]), record(["c", "d", "e"])).value == 0.5
    passed("SynSim in [0.5, 1] on 10,000 random pairs; 1 iff equal; hand cases 0.75 and 0.5")


def test_set_score_duality_and_bounds():
    rng = random.Random(202)
    backend = FeatureHashBackend()
    for _ in range(200):
        g_texts = [" ".join(f"w{rng.randrange(10)}" for _ in range(rng.randrange(1, 6)))
                   for _ in range(rng.randrange(1, 21))]
        t_texts = [" ".join(f"w{rng.randrange(10)}" for _ in range(rng.randrange(1, 6)))
                   for _ in range(rng.randrange(1, 21))]
        g = Corpus.from_texts("g", "generated", g_texts)
        t = Corpus.from_texts("t", "test", t_texts)
        gt = semantic_set_scores(g, t, backend)
        tg = semantic_set_scores(t, g, backend)
        assert gt.precision == tg.recall  # bit-for-bit duality
        assert gt.recall == tg.precision
        assert min(gt.precision, gt.recall) <= gt.f1 <= max(gt.precision, gt.recall)
    g = Corpus.from_texts("g", "generated", ["one two", "three four five"])
    self_scores = semantic_set_scores(g, g, backend)
    assert (self_scores.precision, self_scores.recall, self_scores.f1) == (1.0, 1.0, 1.0)
    passed("set-score duality bit-for-bit on 200 random pairs; F1 bounds; G==T gives exact 1.0")


def test_uniqueness_semantics():
    # 6 generated sentences: one duplicate pair (A, A), one train-colliding
    # sentence that itself appears twice (B, B with B in train), two unique.
    # Non-unique: A, A (intra duplicates), B, B (duplicates AND train hits) -> U = 2.
    generated = Corpus.from_texts("g", "generated", [
        "the phone is great",       # A
        "The phone is GREAT!",      # A (same normalized form)
        "battery died fast",        # B, collides with train
        "battery died fast",        # B again
        "camera works well",        # unique
        "screen looks sharp",       # unique
    ])
    train = Corpus.from_texts("t", "train", ["battery died fast", "other sentence"])
    result = unique_fraction(generated, train)
    assert result.unique_count == 2 and result.n == 6
    assert result.fraction == 2 / 6
    curve = uniqueness_curve(generated, train, [3, 6])
    assert curve[-1] == result
    passed("uniqueness fixture gives Unique = 2/6 exactly; curve at full n equals fraction")


def test_vocab_baseline_behavior():
    train = Corpus.from_texts("t", "train", ["alpha beta gamma", "delta"])
    subset = Corpus.from_texts("g", "generated", ["beta alpha", "gamma gamma delta"])
    assert vocab_gain(subset, train).new_terms == 0
    disjoint = Corpus.from_texts("g", "generated", ["zeta eta", "theta"])
    gain = vocab_gain(disjoint, train)
    assert gain.new_terms == 3 == len({"zeta", "eta", "theta"})
    passed("vocab gain: generated within train vocabulary gives 0; disjoint gives |terms(G)|")


def test_ngram_language_model():
    rng = random.Random(303)
    sentences = [" ".join(f"w{rng.randrange(12)}" for _ in range(rng.randrange(2, 8)))
                 for _ in range(50)]
    model = train_ngram_lm(Corpus.from_texts("t", "train", sentences), order=3, add_k=0.1)
    for context in model.counts:
        total = math.fsum(model.probability(context, term) for term in model.vocab)
        assert abs(total - 1.0) < 1e-9

    single = Corpus.from_texts("t", "train", ["a b"])
    unsmoothed = train_ngram_lm(single, order=2, add_k=0.0)
    assert unsmoothed.perplexity(single.records[0]).perplexity == 1.0

    pair = Corpus.from_texts("t", "train", ["a b", "a c"])
    model2 = train_ngram_lm(pair, order=2, add_k=0.0)
    value = model2.perplexity(pair.records[0]).perplexity
    assert abs(value - 2 ** (1 / 3)) < 1e-12
    passed("n-gram LM: conditionals sum to 1 within 1e-9; unsmoothed ppl 1.0; 2^(1/3) case")


def enumerate_mwu_p(a, b):
    pooled = sorted(a + b)
    assert len(set(pooled)) == len(pooled)
    rank_of = {v: i + 1 for i, v in enumerate(pooled)}
    n_a = len(a)
    u_obs = sum(rank_of[v] for v in a) - n_a * (n_a + 1) / 2
    le = ge = total = 0
    for subset in combinations(range(1, len(pooled) + 1), n_a):
        u = sum(subset) - n_a * (n_a + 1) / 2
        total += 1
        le += u <= u_obs
        ge += u >= u_obs
    return min(1.0, 2 * min(le, ge) / total)


def welch_statistic(a, b):
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    return (ma - mb) / math.sqrt(va / na + vb / nb)


def permutation_p(a, b, draws, seed):
    t_obs = abs(welch_statistic(a, b))
    pooled = list(a) + list(b)
    rng = random.Random(seed)
    hits = 0
    for _ in range(draws):
        rng.shuffle(pooled)
        t = welch_statistic(pooled[:len(a)], pooled[len(a):])
        if abs(t) >= t_obs:
            hits += 1
    return hits / draws


def test_stats_oracles():
    oracle = enumerate_mwu_p([1.0, 2.0], [3.0, 4.0])
    result = mann_whitney_u([1.0, 2.0], [3.0, 4.0])
    assert oracle == 1 / 3
    assert result.p_two_sided == oracle

    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]).statistic == 0.8

    equal = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert equal.statistic == 0.0 and equal.p_two_sided == 1.0

    rng = random.Random(404)
    worst = 0.0
    for case in range(20):
        na, nb = rng.randint(6, 12), rng.randint(6, 12)
        shift = rng.choice([0.0, 0.5, 1.0])
        a = [rng.gauss(0.0, 1.0) for _ in range(na)]
        b = [rng.gauss(shift, 1.0) for _ in range(nb)]
        p_welch = welch_t_test(a, b).p_two_sided
        p_perm = permutation_p(a, b, draws=10_000, seed=1000 + case)
        worst = max(worst, abs(p_welch - p_perm))
        assert abs(p_welch - p_perm) <= 0.05
    passed(f"stats oracles: exact MWU 1/3, Spearman 0.8, Welch t=0/p=1, "
           f"permutation agreement within 0.05 (worst {worst:.4f})")


def test_tradeoff_conservation():
    rng = random.Random(505)
    points = [TradeoffPoint(i, rng.random(), rng.random()) for i in range(300)]
    for _ in range(50):
        grid = density_grid(points, rng.randint(1, 15), rng.randint(1, 15))
        assert grid.total() == len(points)

    train = Corpus.from_texts("t", "train", ["exact copy here", "filler words"])
    test = Corpus.from_texts("s", "test", ["target sentence text", "noise"])
    generated = Corpus.from_texts("g", "generated",
                                  ["exact copy here", "target sentence text"])
    computed = compute_tradeoff(generated, test, train, FeatureHashBackend())
    assert computed[0].syn_novelty == 0.0
    assert computed[1].sem_to_test == 1.0
    passed("trade-off: grid mass conserved over 50 bin configs; novelty 0 / semantic 1 anchors")


def test_golden_pipeline_byte_identical(tmp_path):
    expected_json = (GOLDEN / "report.json").read_bytes()
    expected_md = (GOLDEN / "report.md").read_bytes()
    outputs = []
    for threads in ("1", "4"):
        workdir = tmp_path / f"threads{threads}"
        workdir.mkdir()
        for name in ("train.txt", "test.txt", "generated.txt"):
            shutil.copy(GOLDEN / name, workdir / name)
        env = dict(os.environ,
                   OPENBLAS_NUM_THREADS=threads, OMP_NUM_THREADS=threads,
                   MKL_NUM_THREADS=threads)
        subprocess.run(
            [sys.executable, "-m", "corpus_scope.cli", "characterize",
             "--train", "train.txt", "--test", "test.txt",
             "--generated", "generated.txt", "--out", "out"],
            cwd=workdir, env=env, check=True, capture_output=True)
        outputs.append(((workdir / "out" / "report.json").read_bytes(),
                        (workdir / "out" / "report.md").read_bytes()))
    for got_json, got_md in outputs:
        assert got_json == expected_json
        assert got_md == expected_md
    passed("golden pipeline: report bytes identical across runs and thread counts")


def test_remote_client_conformance(stub_server_factory):
    def embed_handler(method, path, body, headers):
        if method == "GET" and path == "/health":
            return 200, {"status": "ok", "id": "stub/3", "dim": 3}
        sentences = json.loads(body)["sentences"]
        return 200, {"dim": 3, "embeddings": [[float(s), 0.0, 0.0] for s in sentences]}

    embed_server = stub_server_factory(embed_handler)
    sentences = [str(i) for i in range(130)]
    vectors = embed_remote(sentences, embed_server.url, batch_size=64)
    assert len(embed_server.requests) == 3
    assert np.array_equal(vectors[:, 0], np.arange(130, dtype=float))

    count_server = stub_server_factory(lambda m, p, b, h: (200, {"matches": [{}, {}]}))
    assert check_remote("two problems", count_server.url) == 2

    failing_server = stub_server_factory(lambda m, p, b, h: (500, {"error": "down"}))
    with pytest.raises(ProofreaderError):
        check_remote("text", failing_server.url, attempts=3, backoff=0.0)
    assert len(failing_server.requests) == 3
    passed("remote clients: order kept across 3 batches; match counts; error after 3 retries")
