"""Command-line surface: split, characterize, tradeoff, human-stats.

Exit codes: 0 on success, 1 on usage errors (bad flags, missing files,
contradictory backends), 2 on runtime failures during computation or I/O.
A config file of flat `key = value` lines (keys named after the long flags)
can pre-fill any characterize option; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from pathlib import Path

from .core import Corpus, load_corpus, split_corpus
from .report import (
    ConfigError,
    RunConfig,
    characterize_corpora,
    make_embedding_backend,
    resolve_cache,
    write_per_sentence_scores,
    write_report,
    write_uniqueness_curve,
)
from .stats import RATING_COLUMNS, StatsError, likert_top2, load_ratings, mann_whitney_u, spearman
from .tradeoff import (
    compute_tradeoff,
    density_grid,
    filter_upper_right,
    write_filtered_ids,
    write_grid_csv,
    write_points_csv,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise UsageError(message)


def _parse_floats(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"{what} must be numeric, got {text!r}")


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}")


def read_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` file mirroring the long flag names."""
    if not Path(path).exists():
        raise UsageError(f"config file does not exist: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"config line {lineno} is not `key = value`: {line!r}")
        values[key.strip()] = value.strip()
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="corpus-scope",
                     description="Characterize generated sentence corpora against their train/test splits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_split = sub.add_parser("split", help="deterministically split a corpus into train/validation/test")
    p_split.add_argument("--input", required=True)
    p_split.add_argument("--ratios", default="0.8,0.1,0.1")
    p_split.add_argument("--seed", type=int, default=0)
    p_split.add_argument("--out", required=True)
    p_split.add_argument("--format", choices=["lines", "csv"], default="lines")
    p_split.add_argument("--csv-column")
    p_split.set_defaults(func=cmd_split)

    p_char = sub.add_parser("characterize", help="build the full characterization report")
    p_char.add_argument("--train")
    p_char.add_argument("--test")
    p_char.add_argument("--generated", help="comma-separated list of generated corpus files")
    p_char.add_argument("--config", help="flat key=value config file; flags override")
    p_char.add_argument("--out")
    p_char.add_argument("--format", choices=["lines", "csv"])
    p_char.add_argument("--csv-column")
    p_char.add_argument("--embedding", choices=["builtin", "remote"])
    p_char.add_argument("--embed-endpoint")
    p_char.add_argument("--embed-dim", type=int)
    p_char.add_argument("--embed-seed", type=int)
    p_char.add_argument("--proofreader-endpoint")
    p_char.add_argument("--language")
    p_char.add_argument("--lm-order", type=int)
    p_char.add_argument("--lm-addk", type=float)
    p_char.add_argument("--sample-g", type=int)
    p_char.add_argument("--sample-seed", type=int)
    p_char.add_argument("--checkpoints")
    p_char.add_argument("--cache-dir")
    p_char.set_defaults(func=cmd_characterize)

    p_trade = sub.add_parser("tradeoff", help="per-sentence semantic/syntactic trade-off points")
    p_trade.add_argument("--train", required=True)
    p_trade.add_argument("--test", required=True)
    p_trade.add_argument("--generated", required=True)
    p_trade.add_argument("--out", required=True, help="points CSV path")
    p_trade.add_argument("--grid", help="XxY bin counts for the density grid")
    p_trade.add_argument("--grid-out")
    p_trade.add_argument("--filter", help="SEM,SYN thresholds for upper-right filtering")
    p_trade.add_argument("--filtered-out")
    p_trade.add_argument("--axis-aggregation", choices=["max", "min"], default="max")
    p_trade.add_argument("--embedding", choices=["builtin", "remote"], default="builtin")
    p_trade.add_argument("--embed-endpoint")
    p_trade.set_defaults(func=cmd_tradeoff)

    p_human = sub.add_parser("human-stats", help="Likert top-2 table and significance tests")
    p_human.add_argument("--ratings", required=True)
    p_human.add_argument("--metric-scores", required=True,
                         help="CSV with header sentence_id,group,score")
    p_human.add_argument("--out", required=True)
    p_human.add_argument("--per-sentence-mean", action="store_true",
                         help="average ratings per sentence before analysis")
    p_human.set_defaults(func=cmd_human_stats)
    return parser


def _require_files(*paths: str) -> None:
    for path in paths:
        if not Path(path).exists():
            raise UsageError(f"input file does not exist: {path}")


def cmd_split(args) -> None:
    _require_files(args.input)
    ratios = _parse_floats(args.ratios, 3, "--ratios")
    if args.format == "csv" and not args.csv_column:
        raise UsageError("--format csv requires --csv-column")
    corpus = load_corpus(args.input, format=args.format, role="train",
                         csv_column=args.csv_column)
    train, valid, test = split_corpus(corpus, ratios, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for part, filename in ((train, "train.txt"), (valid, "validation.txt"), (test, "test.txt")):
        (out / filename).write_text(
            "".join(r.raw + "\n" for r in part.records), encoding="utf-8")
    print(f"wrote {len(train)}/{len(valid)}/{len(test)} sentences to {out}")


def _build_run_config(args) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}

    def pick(flag: str, cli_value, default, convert=lambda x: x):
        if cli_value is not None:
            return cli_value
        if flag in file_values:
            return convert(file_values[flag])
        return default

    try:
        train = pick("train", args.train, None)
        test = pick("test", args.test, None)
        generated = pick("generated", args.generated, None)
        out_dir = pick("out", args.out, "out")
        config = RunConfig(
            train=train or "",
            test=test or "",
            generated=tuple((generated or "").split(",")) if generated else (),
            out_dir=out_dir,
            input_format=pick("format", args.format, "lines"),
            csv_column=pick("csv-column", args.csv_column, None),
            embedding=pick("embedding", args.embedding, "builtin"),
            embed_endpoint=pick("embed-endpoint", args.embed_endpoint, None),
            embed_dim=pick("embed-dim", args.embed_dim, 256, int),
            embed_seed=pick("embed-seed", args.embed_seed, 0, int),
            proofreader="remote" if pick("proofreader-endpoint", args.proofreader_endpoint, None) else "none",
            proofreader_endpoint=pick("proofreader-endpoint", args.proofreader_endpoint, None),
            language=pick("language", args.language, "en-US"),
            lm_order=pick("lm-order", args.lm_order, 3, int),
            lm_add_k=pick("lm-addk", args.lm_addk, 0.1, float),
            sample_g=pick("sample-g", args.sample_g, None, int),
            sample_seed=pick("sample-seed", args.sample_seed, 0, int),
            checkpoints=pick("checkpoints", _parse_ints(args.checkpoints, "--checkpoints") if args.checkpoints else None,
                             None, lambda v: _parse_ints(v, "checkpoints")),
            cache_dir=pick("cache-dir", args.cache_dir, None),
        )
    except ValueError as exc:
        raise UsageError(f"bad config value: {exc}")
    if not config.train or not config.test or not config.generated:
        raise UsageError("characterize requires --train, --test and --generated (flags or config file)")
    try:
        config.validate()
    except ConfigError as exc:
        raise UsageError(str(exc))
    return config


def cmd_characterize(args) -> None:
    config = _build_run_config(args)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    load = lambda path, role: load_corpus(path, format=config.input_format, role=role,
                                          csv_column=config.csv_column)
    train = load(config.train, "train")
    test = load(config.test, "test")
    generated = [load(path, "generated") for path in config.generated]

    result = characterize_corpora(train, test, generated, config)
    write_report(result.rows, "json", out / "report.json", config)
    write_report(result.rows, "markdown", out / "report.md", config)
    write_report(result.rows, "csv", out / "report.csv", config)
    for detail in result.details:
        write_per_sentence_scores(detail, out / f"scores_{detail.corpus_name}.csv")
    for name, curve in result.curves.items():
        write_uniqueness_curve(curve, out / f"unique_curve_{name}.csv")
    print(f"report written to {out / 'report.json'}")


def cmd_tradeoff(args) -> None:
    _require_files(args.train, args.test, args.generated)
    if args.embedding == "remote" and not args.embed_endpoint:
        raise UsageError("--embedding remote requires --embed-endpoint")
    if args.embedding == "builtin" and args.embed_endpoint:
        raise UsageError("--embed-endpoint contradicts --embedding builtin")
    if args.grid and not args.grid_out:
        raise UsageError("--grid requires --grid-out")
    if args.filter and not args.filtered_out:
        raise UsageError("--filter requires --filtered-out")

    config = RunConfig(train=args.train, test=args.test, generated=(args.generated,),
                       embedding=args.embedding, embed_endpoint=args.embed_endpoint,
                       out_dir=str(Path(args.out).parent))
    backend = make_embedding_backend(config)
    cache = resolve_cache(config)
    train = load_corpus(args.train, role="train")
    test = load_corpus(args.test, role="test")
    generated = load_corpus(args.generated, role="generated")

    points = compute_tradeoff(generated, test, train, backend, cache,
                              axis_aggregation=args.axis_aggregation)
    write_points_csv(points, args.out)
    if args.grid:
        x_text, sep, y_text = args.grid.partition("x")
        if not sep:
            raise UsageError(f"--grid must look like 40x40, got {args.grid!r}")
        try:
            grid = density_grid(points, int(x_text), int(y_text))
        except ValueError as exc:
            raise UsageError(str(exc))
        write_grid_csv(grid, args.grid_out)
    if args.filter:
        theta_sem, theta_syn = _parse_floats(args.filter, 2, "--filter")
        write_filtered_ids(filter_upper_right(points, theta_sem, theta_syn), args.filtered_out)
    print(f"{len(points)} points written to {args.out}")


def _load_metric_scores(path: str) -> dict[str, tuple[str, float]]:
    import csv as _csv

    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        needed = ("sentence_id", "group", "score")
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in needed):
            raise StatsError(f"metric scores file must have columns {','.join(needed)}")
        out = {}
        for row in reader:
            out[row["sentence_id"]] = (row["group"], float(row["score"]))
    if not out:
        raise StatsError(f"no metric scores found in {path}")
    return out


def cmd_human_stats(args) -> None:
    _require_files(args.ratings, args.metric_scores)
    ratings = load_ratings(args.ratings)
    scores = _load_metric_scores(args.metric_scores)
    missing = sorted({r.sentence_id for r in ratings} - set(scores))
    if missing:
        raise StatsError(f"ratings reference sentences missing from metric scores: {missing[:5]}")

    groups = sorted({group for group, _ in scores.values()})
    if args.per_sentence_mean:
        # collapse each sentence to its mean rating per dimension
        by_sentence: dict[str, list] = {}
        for r in ratings:
            by_sentence.setdefault(r.sentence_id, []).append(r)
        samples = {
            dim: {
                g: [sum(getattr(r, dim) for r in rows) / len(rows)
                    for sid, rows in sorted(by_sentence.items()) if scores[sid][0] == g]
                for g in groups
            }
            for dim in RATING_COLUMNS
        }
        top2 = {
            g: {dim: 100.0 * sum(1 for v in samples[dim][g] if v >= 4) / len(samples[dim][g])
                for dim in RATING_COLUMNS}
            for g in groups if samples[RATING_COLUMNS[0]][g]
        }
        general_pairs = [(sum(r.general for r in rows) / len(rows), scores[sid][1])
                         for sid, rows in sorted(by_sentence.items())]
    else:
        samples = {
            dim: {g: [getattr(r, dim) for r in ratings if scores[r.sentence_id][0] == g]
                  for g in groups}
            for dim in RATING_COLUMNS
        }
        top2 = {
            g: {dim: likert_top2(samples[dim][g]) for dim in RATING_COLUMNS}
            for g in groups if samples[RATING_COLUMNS[0]][g]
        }
        general_pairs = [(r.general, scores[r.sentence_id][1]) for r in ratings]

    mwu = {}
    for dim in RATING_COLUMNS:
        per_pair = {}
        for g1, g2 in combinations(groups, 2):
            a, b = samples[dim][g1], samples[dim][g2]
            if a and b:
                per_pair[f"{g1} vs {g2}"] = mann_whitney_u(a, b).as_dict()
        mwu[dim] = per_pair

    general = [float(v) for v, _ in general_pairs]
    metric = [float(s) for _, s in general_pairs]
    output = {
        "mode": "per-sentence-mean" if args.per_sentence_mean else "per-rating",
        "top2": top2,
        "mann_whitney": mwu,
        "spearman_general_vs_score": spearman(general, metric).as_dict(),
    }
    Path(args.out).write_text(json.dumps(output, indent=2) + "\n", encoding="utf-8")
    print(f"stats written to {args.out}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        args.func(args)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
