"""Command-line interface: fit, score, grid, experiment, generate, and bench.

Reports are CSV; each report-writing command also renders a matplotlib figure
next to its output unless --no-figures is given. All commands are deterministic
given their options and seed, and write outputs atomically (no partial files
on error). The default seed can be overridden with the KOD_SEED environment
variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .datasets import DATASETS, load_csv, make_dataset, write_csv
from .errors import InvalidInputError, KodError
from .ioutil import atomic_write_text
from .metrics import mcc, precision_at_n
from .model import KodConfig, KodModel, ScoreReport, fit


def _default_seed() -> int:
    try:
        return int(os.environ.get("KOD_SEED", "0"))
    except ValueError:
        return 0


def _add_common_fit_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", default="rbf:auto",
                        help="kernel: rbf:auto, rbf:<sigma> or linear (default rbf:auto)")
    parser.add_argument("--retention", type=float, default=0.99,
                        help="retained share of the eigenvalue total (default 0.99)")
    parser.add_argument("--families", default="one,two,basis,random",
                        help="comma list from {one,two,basis,random} (default all)")
    parser.add_argument("--random-count", type=int, default=1000,
                        help="number of random directions (default 1000)")
    parser.add_argument("--two-point-cap", type=int, default=5000,
                        help="maximum number of pair directions (default 5000)")
    parser.add_argument("--standardize", action="store_true",
                        help="column-standardize (median/MAD) before the kernel")


def _add_io_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="root seed (default: KOD_SEED env var, else 0)")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip rendering figures next to CSV output")


def _config_from_args(args) -> KodConfig:
    return KodConfig(
        kernel=args.kernel,
        retention=args.retention,
        families=args.families,
        random_count=args.random_count,
        two_point_cap=args.two_point_cap,
        seed=args.seed if args.seed is not None else _default_seed(),
        standardize=args.standardize,
    )


def _report_columns(report: ScoreReport) -> tuple[list[str], np.ndarray]:
    fams = list(report.raw)
    norm_fams = list(report.normalized)
    cols = (["index"]
            + [f"outl_{f}" for f in fams]
            + [f"norm_{f}" for f in norm_fams]
            + ["ko", "lo", "flagged"])
    parts = ([np.arange(report.size, dtype=float)]
             + [report.raw[f] for f in fams]
             + [report.normalized[f] for f in norm_fams]
             + [report.ko, report.lo, report.flagged.astype(float)])
    return cols, np.column_stack(parts)


def _write_report(path, report: ScoreReport) -> None:
    cols, table = _report_columns(report)
    write_csv(path, table, columns=cols)


def _summary_payload(model: KodModel, report: ScoreReport) -> dict:
    return {
        "kernel": model.kernel.family,
        "sigma": model.kernel.sigma,
        "n": model.n,
        "p": model.p,
        "rank": model.rank_full,
        "q": model.q,
        "denominator_floor": model.denom_floor,
        "cutoff": model.cutoff,
        "train_ko_median": model.train_ko_median,
        "flagged": int(report.flagged.sum()),
        "family_sizes": model.family_sizes,
        "seed": model.seed,
        "timings_seconds": report.timings,
    }


def _print_summary(summary: dict) -> None:
    sigma = summary["sigma"]
    sigma_text = f"{sigma:.6g}" if sigma is not None else "-"
    print(f"kernel={summary['kernel']} sigma={sigma_text} n={summary['n']} p={summary['p']}")
    print(f"rank={summary['rank']} q={summary['q']} "
          f"floor={summary['denominator_floor']:.6g} cutoff={summary['cutoff']:.6g}")
    sizes = " ".join(f"{k}={v}" for k, v in summary["family_sizes"].items())
    print(f"directions: {sizes}")
    print(f"flagged {summary['flagged']} of {summary['n']} training points")
    if summary.get("timings_seconds"):
        stages = " ".join(f"{k}={v:.3f}s" for k, v in summary["timings_seconds"].items())
        print(f"timings: {stages}")


def _figure_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def cmd_fit(args) -> int:
    X, _ = load_csv(args.input, header=args.header, label_column=args.label_column)
    config = _config_from_args(args)
    model, report = fit(X, config)
    model.save(args.model)
    _write_report(args.report, report)
    summary = _summary_payload(model, report)
    summary_path = args.summary or str(Path(args.report).with_suffix("")) + "_summary.json"
    atomic_write_text(summary_path, json.dumps(summary, indent=2) + "\n")
    if not args.no_figures:
        from . import plots
        plots.score_panels(report, _figure_path(args.report), title="training scores")
    _print_summary(summary)
    print(f"model -> {args.model}")
    print(f"report -> {args.report}")
    return 0


def cmd_score(args) -> int:
    model = KodModel.load(args.model)
    X, _ = load_csv(args.input, header=args.header, label_column=args.label_column)
    report = model.score(X)
    _write_report(args.report, report)
    if not args.no_figures:
        from . import plots
        plots.score_panels(report, _figure_path(args.report), title="out-of-sample scores")
    print(f"scored {report.size} points; flagged {int(report.flagged.sum())} "
          f"(cutoff {report.cutoff:.6g})")
    print(f"report -> {args.report}")
    return 0


def cmd_grid(args) -> int:
    model = KodModel.load(args.model)
    if model.p != 2:
        raise InvalidInputError(
            f"grid scoring needs a model trained on 2-D input, got p={model.p}")
    if args.bounds is not None:
        xmin, xmax, ymin, ymax = args.bounds
    else:
        lo, hi = model.train_raw_bounds()
        margin = 0.1 * (hi - lo)
        xmin, xmax = lo[0] - margin[0], hi[0] + margin[0]
        ymin, ymax = lo[1] - margin[1], hi[1] + margin[1]
    if not (xmin < xmax and ymin < ymax):
        raise InvalidInputError("grid bounds must satisfy min < max on both axes")
    if len(args.resolution) == 1:
        nx = ny = args.resolution[0]
    elif len(args.resolution) == 2:
        nx, ny = args.resolution
    else:
        raise InvalidInputError("--resolution takes one or two integers")
    if nx < 2 or ny < 2:
        raise InvalidInputError("grid resolution must be at least 2 per axis")

    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    report = model.score(points)
    below = report.ko < model.train_ko_median

    fams = list(report.raw)
    norm_fams = list(report.normalized)
    cols = (["x", "y"]
            + [f"outl_{f}" for f in fams]
            + [f"norm_{f}" for f in norm_fams]
            + ["ko", "below_median"])
    table = np.column_stack(
        [points[:, 0], points[:, 1]]
        + [report.raw[f] for f in fams]
        + [report.normalized[f] for f in norm_fams]
        + [report.ko, below.astype(float)])
    write_csv(args.output, table, columns=cols)
    if not args.no_figures:
        from . import plots
        layers = {f: report.normalized[f].reshape(ny, nx) for f in norm_fams}
        layers["combined"] = report.ko.reshape(ny, nx)
        thresholds = {f: 1.0 for f in norm_fams}
        thresholds["combined"] = model.train_ko_median
        plots.grid_heatmaps(xs, ys, layers, thresholds, _figure_path(args.output))
    print(f"scored {nx} x {ny} grid; {int(below.sum())} cells below the training median")
    print(f"grid -> {args.output}")
    return 0


def cmd_experiment(args) -> int:
    contaminations = [float(c) for c in args.contamination.split(",") if c.strip()]
    if not contaminations:
        raise InvalidInputError("no contamination levels given")
    if args.replications < 1:
        raise InvalidInputError("replications must be at least 1")
    base_seed = args.seed if args.seed is not None else _default_seed()
    rows = []
    for level_idx, cont in enumerate(contaminations):
        pn_values, mcc_values = [], []
        started = time.perf_counter()
        for rep in range(args.replications):
            seed = base_seed + 1000 * level_idx + rep
            X, labels = make_dataset(args.dataset, args.n, cont, seed=seed)
            config = KodConfig(
                kernel=args.kernel,
                retention=args.retention,
                families=args.families,
                random_count=args.random_count,
                two_point_cap=args.two_point_cap,
                seed=seed,
                standardize=args.standardize,
            )
            _, report = fit(X, config)
            pn_values.append(precision_at_n(report.ko, labels))
            mcc_values.append(mcc(report.flagged, labels))
        elapsed = time.perf_counter() - started
        rows.append({
            "contamination": cont,
            "p_at_n": float(np.mean(pn_values)),
            "mcc": float(np.mean(mcc_values)),
            "seconds": elapsed,
        })
        print(f"{args.dataset} @ {cont:.0%}: mean P@N={rows[-1]['p_at_n']:.3f} "
              f"mean MCC={rows[-1]['mcc']:.3f} ({elapsed:.1f}s)")

    lines = ["dataset,contamination,n,replications,p_at_n,mcc"]
    for row in rows:
        lines.append(f"{args.dataset},{row['contamination']!r},{args.n},"
                     f"{args.replications},{row['p_at_n']!r},{row['mcc']!r}")
    atomic_write_text(args.output, "\n".join(lines) + "\n")
    if not args.no_figures:
        from . import plots
        plots.metric_curves(rows, _figure_path(args.output), title=args.dataset)
    print(f"metrics -> {args.output}")
    return 0


def cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    X, labels = make_dataset(args.dataset, args.n, args.contamination, seed=seed)
    write_csv(args.output, X, columns=["x", "y"], labels=labels)
    if not args.no_figures:
        from . import plots
        plots.dataset_scatter(X, labels, _figure_path(args.output), title=args.dataset)
    print(f"{args.dataset}: {X.shape[0]} points, {int(labels.sum())} outliers")
    print(f"data -> {args.output}")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise InvalidInputError("no sizes given")
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng(seed)
    stage_names: list[str] = []
    lines = []
    results = []
    for n in sizes:
        X = rng.standard_normal((n, args.p))
        started = time.perf_counter()
        _, report = fit(X, KodConfig(seed=seed))
        total = time.perf_counter() - started
        timings = dict(report.timings or {})
        timings["total"] = total
        if not stage_names:
            stage_names = list(timings)
            lines.append("n,p," + ",".join(stage_names))
        lines.append(f"{n},{args.p}," + ",".join(repr(timings[s]) for s in stage_names))
        results.append((n, total))
        stages = " ".join(f"{k}={v:.3f}s" for k, v in timings.items())
        print(f"n={n} p={args.p}: {stages}")
    if args.output:
        atomic_write_text(args.output, "\n".join(lines) + "\n")
        print(f"timings -> {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kod",
        description="Kernel outlyingness detection: fit, score, flag, and benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model on a CSV file and score its rows")
    p_fit.add_argument("--input", required=True, help="input CSV file")
    p_fit.add_argument("--model", required=True, help="output model file (JSON)")
    p_fit.add_argument("--report", required=True, help="output per-point report CSV")
    p_fit.add_argument("--summary", default=None,
                       help="output run-summary JSON (default <report>_summary.json)")
    p_fit.add_argument("--header", default="auto", type=_header_arg,
                       help="input has a header row: auto, yes or no (default auto)")
    p_fit.add_argument("--label-column", default=None,
                       help="name or index of a label column to exclude from the features")
    _add_common_fit_options(p_fit)
    _add_io_options(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_score = sub.add_parser("score", help="score new rows against a saved model")
    p_score.add_argument("--model", required=True, help="model file from 'fit'")
    p_score.add_argument("--input", required=True, help="input CSV file")
    p_score.add_argument("--report", required=True, help="output per-point report CSV")
    p_score.add_argument("--header", default="auto", type=_header_arg)
    p_score.add_argument("--label-column", default=None)
    _add_io_options(p_score)
    p_score.set_defaults(func=cmd_score)

    p_grid = sub.add_parser("grid", help="score a regular 2-D lattice for heatmaps")
    p_grid.add_argument("--model", required=True, help="model file trained on 2-D input")
    p_grid.add_argument("--output", required=True, help="output grid CSV")
    p_grid.add_argument("--bounds", type=float, nargs=4, default=None,
                        metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                        help="grid bounds (default: training box plus 10%% margin)")
    p_grid.add_argument("--resolution", type=int, nargs="+", default=[100],
                        help="cells per axis, one or two integers (default 100)")
    _add_io_options(p_grid)
    p_grid.set_defaults(func=cmd_grid)

    p_exp = sub.add_parser("experiment",
                           help="generate/fit/evaluate replications of a benchmark dataset")
    p_exp.add_argument("--dataset", required=True, choices=DATASETS)
    p_exp.add_argument("--contamination", default="0.05,0.1,0.2",
                       help="comma list of contamination levels (default 0.05,0.1,0.2)")
    p_exp.add_argument("--replications", type=int, default=10)
    p_exp.add_argument("--n", type=int, default=1000, help="points per replication")
    p_exp.add_argument("--output", required=True, help="output metrics CSV")
    _add_common_fit_options(p_exp)
    _add_io_options(p_exp)
    p_exp.set_defaults(func=cmd_experiment)

    p_gen = sub.add_parser("generate", help="write a synthetic benchmark dataset as CSV")
    p_gen.add_argument("--dataset", required=True, choices=DATASETS)
    p_gen.add_argument("--n", type=int, default=1000)
    p_gen.add_argument("--contamination", type=float, default=0.2)
    p_gen.add_argument("--output", required=True, help="output CSV (x, y, label)")
    _add_io_options(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser("bench", help="report wall-clock time per pipeline stage")
    p_bench.add_argument("--sizes", default="250,500,1000",
                         help="comma list of sample sizes (default 250,500,1000)")
    p_bench.add_argument("--p", type=int, default=10, help="data dimension (default 10)")
    p_bench.add_argument("--output", default=None, help="optional timings CSV")
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.set_defaults(func=cmd_bench, no_figures=True)

    return parser


def _header_arg(text: str):
    value = str(text).strip().lower()
    if value in ("auto",):
        return "auto"
    if value in ("yes", "true", "1"):
        return True
    if value in ("no", "false", "0"):
        return False
    raise argparse.ArgumentTypeError("expected auto, yes or no")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
