"""Per-sentence semantic-similarity vs syntactic-novelty coordinates.

Each generated sentence gets (best cosine to the test set, normalized edit
distance to the closest train sentence). Sentences in the upper right are
semantically on-domain yet syntactically new; novelty 0 flags verbatim
train copies.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Corpus
from .semantic import EmbeddingBackend, EmbeddingCache, embed_corpus, max_cosine_rows
from .syntactic import min_novelty_rows


@dataclass(frozen=True)
class TradeoffPoint:
    sentence_id: int
    sem_to_test: float
    syn_novelty: float


@dataclass(frozen=True)
class DensityGrid:
    x_edges: tuple[float, ...]
    y_edges: tuple[float, ...]
    counts: tuple[tuple[int, ...], ...]

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


def compute_tradeoff(
    generated: Corpus,
    test: Corpus,
    train: Corpus,
    backend: EmbeddingBackend,
    cache: EmbeddingCache | None = None,
    axis_aggregation: str = "max",
) -> list[TradeoffPoint]:
    """One (semantic, novelty) point per generated sentence.

    axis_aggregation switches the semantic axis between the best match in
    the test set (default, consistent with Precision) and the worst match.
    The syntactic axis is always the distance to the closest train sentence.
    """
    if len(generated) == 0 or len(test) == 0 or len(train) == 0:
        raise ValueError("tradeoff computation requires non-empty corpora")
    if axis_aggregation not in ("max", "min"):
        raise ValueError(f"axis_aggregation must be 'max' or 'min', got {axis_aggregation!r}")

    g_emb = embed_corpus(backend, generated, cache)
    t_emb = embed_corpus(backend, test, cache)
    if axis_aggregation == "max":
        sem = max_cosine_rows(g_emb, t_emb)
    else:
        # min over cosines = -(max over negated targets); +0.0 drops -0.0
        sem = -max_cosine_rows(g_emb, -t_emb) + 0.0

    novelty = min_novelty_rows(generated, train)
    return [
        TradeoffPoint(sentence_id=rec.id, sem_to_test=float(s), syn_novelty=nd)
        for rec, s, nd in zip(generated.records, sem, novelty)
    ]


def filter_upper_right(points: list[TradeoffPoint], theta_sem: float,
                       theta_syn: float) -> list[int]:
    """Ids of points at or above both thresholds, ascending."""
    return sorted(p.sentence_id for p in points
                  if p.sem_to_test >= theta_sem and p.syn_novelty >= theta_syn)


def density_grid(points: list[TradeoffPoint], x_bins: int, y_bins: int) -> DensityGrid:
    """2-D histogram over the data range with uniform bins.

    Bins are left-inclusive with a right-inclusive top bin, so every point
    lands in exactly one cell and the counts sum to the point count.
    """
    if not points:
        raise ValueError("density_grid requires at least one point")
    if x_bins < 1 or y_bins < 1:
        raise ValueError("bin counts must be >= 1")
    xs = np.array([p.sem_to_test for p in points], dtype=np.float64)
    ys = np.array([p.syn_novelty for p in points], dtype=np.float64)
    counts, x_edges, y_edges = np.histogram2d(xs, ys, bins=(x_bins, y_bins))
    return DensityGrid(
        x_edges=tuple(float(e) for e in x_edges),
        y_edges=tuple(float(e) for e in y_edges),
        counts=tuple(tuple(int(c) for c in row) for row in counts),
    )


def write_points_csv(points: list[TradeoffPoint], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sentence_id", "sem_to_test", "syn_novelty"])
        for p in points:
            writer.writerow([p.sentence_id, repr(p.sem_to_test), repr(p.syn_novelty)])


def write_grid_csv(grid: DensityGrid, path: str | Path) -> None:
    """One row per cell: the cell's lower-left (x_edge, y_edge) and its count."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_edge", "y_edge", "count"])
        for i, row in enumerate(grid.counts):
            for j, count in enumerate(row):
                writer.writerow([repr(grid.x_edges[i]), repr(grid.y_edges[j]), count])


def write_filtered_ids(ids: list[int], path: str | Path) -> None:
    Path(path).write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")
