"""Significance tests and Likert-rating analysis.

The test statistics are computed directly (midranks, Welch statistic, exact
Mann-Whitney enumeration) so results are reproducible to the bit; only the
distribution tail functions come from scipy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from scipy.stats import norm as _norm
from scipy.stats import t as _student_t

EXACT_MWU_LIMIT = 12  # pooled size up to which tie-free U is enumerated exactly

RATING_COLUMNS = ("grammar", "make_sense", "domain_rel", "general")
RATINGS_HEADER = ("sentence_id", "rater_id") + RATING_COLUMNS


class StatsError(Exception):
    """Invalid sample for a statistical test or malformed ratings data."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_two_sided: float
    method: str

    def as_dict(self) -> dict:
        return {"method": self.method, "statistic": self.statistic,
                "p_two_sided": self.p_two_sided}


@dataclass(frozen=True)
class HumanRatingRow:
    sentence_id: str
    rater_id: str
    grammar: int
    make_sense: int
    domain_rel: int
    general: int


def _check_sample(name: str, values: list[float], min_len: int) -> None:
    if len(values) < min_len:
        raise StatsError(f"sample {name} needs at least {min_len} values, got {len(values)}")
    for v in values:
        if not math.isfinite(v):
            raise StatsError(f"sample {name} contains a non-finite value: {v}")


def midranks(values: list[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their rank range."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _variance(values: list[float], mean: float) -> float:
    return math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)


def welch_t_test(a: list[float], b: list[float], pooled: bool = False) -> TestResult:
    """Unpaired two-sample t-test, Welch by default, two-sided p.

    Both samples constant at the same value gives p = 1 by convention; both
    constant at different values gives an infinite statistic and p = 0.
    """
    _check_sample("a", a, 2)
    _check_sample("b", b, 2)
    na, nb = len(a), len(b)
    ma = math.fsum(a) / na
    mb = math.fsum(b) / nb
    va = _variance(a, ma)
    vb = _variance(b, mb)
    if va == 0.0 and vb == 0.0:
        if ma == mb:
            return TestResult(statistic=0.0, p_two_sided=1.0,
                              method="pooled_t" if pooled else "welch_t")
        inf_t = math.inf if ma > mb else -math.inf
        return TestResult(statistic=inf_t, p_two_sided=0.0,
                          method="pooled_t" if pooled else "welch_t")
    if pooled:
        sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        se = math.sqrt(sp2 * (1 / na + 1 / nb))
        df = na + nb - 2
        method = "pooled_t"
    else:
        sea, seb = va / na, vb / nb
        se = math.sqrt(sea + seb)
        df = (sea + seb) ** 2 / (sea ** 2 / (na - 1) + seb ** 2 / (nb - 1))
        method = "welch_t"
    t = (ma - mb) / se
    p = 2.0 * float(_student_t.sf(abs(t), df))
    return TestResult(statistic=t, p_two_sided=min(1.0, p), method=method)


def _u_statistic_from_ranks(ranks_a: list[float], n_b: int) -> float:
    n_a = len(ranks_a)
    return math.fsum(ranks_a) - n_a * (n_a + 1) / 2  # = n_a*n_b - U_b


def _exact_mwu_p(a: list[float], b: list[float], u_a: float) -> float:
    """Two-sided p by enumerating all rank assignments (tie-free samples)."""
    n_a, n_b = len(a), len(b)
    n = n_a + n_b
    le = ge = total = 0
    base = n_a * (n_a + 1) / 2
    for subset in combinations(range(1, n + 1), n_a):
        u = sum(subset) - base
        total += 1
        if u <= u_a:
            le += 1
        if u >= u_a:
            ge += 1
    return min(1.0, 2 * min(le, ge) / total)


def mann_whitney_u(a: list[float], b: list[float]) -> TestResult:
    """Mann-Whitney U with midrank ties; the statistic is U of the first sample.

    Exact enumeration when the pooled sample is small and tie-free, otherwise
    the normal approximation with tie and continuity corrections.
    """
    _check_sample("a", a, 1)
    _check_sample("b", b, 1)
    n_a, n_b = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    u_a = _u_statistic_from_ranks(ranks[:n_a], n_b)

    has_ties = len(set(pooled)) != len(pooled)
    if not has_ties and n_a + n_b <= EXACT_MWU_LIMIT:
        return TestResult(statistic=u_a, p_two_sided=_exact_mwu_p(a, b, u_a),
                          method="mann_whitney_exact")

    n = n_a + n_b
    mean_u = n_a * n_b / 2
    tie_term = 0.0
    for v in set(pooled):
        t = pooled.count(v)
        tie_term += t ** 3 - t
    var_u = n_a * n_b / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0.0:
        return TestResult(statistic=u_a, p_two_sided=1.0, method="mann_whitney_normal")
    z = max(0.0, abs(u_a - mean_u) - 0.5) / math.sqrt(var_u)
    p = min(1.0, 2.0 * float(_norm.sf(z)))
    return TestResult(statistic=u_a, p_two_sided=p, method="mann_whitney_normal")


def spearman(a: list[float], b: list[float]) -> TestResult:
    """Spearman rank correlation: Pearson over midranks, t-approximate p."""
    _check_sample("a", a, 3)
    _check_sample("b", b, 3)
    if len(a) != len(b):
        raise StatsError(f"spearman requires equal lengths, got {len(a)} and {len(b)}")
    n = len(a)
    ra = midranks(list(a))
    rb = midranks(list(b))
    mean_rank = (n + 1) / 2
    da = [r - mean_rank for r in ra]
    db = [r - mean_rank for r in rb]
    ssa = math.fsum(x * x for x in da)
    ssb = math.fsum(x * x for x in db)
    if ssa == 0.0 or ssb == 0.0:
        raise StatsError("spearman undefined when a sample has zero rank variance")
    rho = math.fsum(x * y for x, y in zip(da, db)) / math.sqrt(ssa * ssb)
    if abs(rho) >= 1.0:
        return TestResult(statistic=rho, p_two_sided=0.0, method="spearman_rho_t")
    t = rho * math.sqrt((n - 2) / (1 - rho * rho))
    p = min(1.0, 2.0 * float(_student_t.sf(abs(t), n - 2)))
    return TestResult(statistic=rho, p_two_sided=p, method="spearman_rho_t")


def likert_top2(ratings: list[int]) -> float:
    """Percentage of ratings equal to 4 or 5 on the 1..5 scale."""
    if not ratings:
        raise StatsError("likert_top2 requires at least one rating")
    for r in ratings:
        if not 1 <= r <= 5:
            raise StatsError(f"rating out of 1..5 range: {r}")
    return 100.0 * sum(1 for r in ratings if r >= 4) / len(ratings)


def load_ratings(path: str | Path) -> list[HumanRatingRow]:
    """Read and validate the human-ratings CSV.

    Expected header: sentence_id,rater_id,grammar,make_sense,domain_rel,general
    with every rating an integer in 1..5.
    """
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RATINGS_HEADER if reader.fieldnames is None or c not in reader.fieldnames]
        if missing:
            raise StatsError(f"ratings file missing columns: {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            values = {}
            for col in RATING_COLUMNS:
                try:
                    v = int(row[col])
                except (TypeError, ValueError):
                    raise StatsError(f"line {lineno}: rating {col}={row[col]!r} is not an integer")
                if not 1 <= v <= 5:
                    raise StatsError(f"line {lineno}: rating {col}={v} outside 1..5")
                values[col] = v
            rows.append(HumanRatingRow(sentence_id=row["sentence_id"],
                                       rater_id=row["rater_id"], **values))
    return rows
