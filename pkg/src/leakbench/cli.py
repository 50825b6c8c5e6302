"""Command-line interface.

Subcommands: stats, split, score, eval, run, report. Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical error. ``--json`` switches any
subcommand to one JSON record per output line.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import harness
from .errors import LeakbenchError, NumericalError
from .evaluation import dump_curve, run_protocols
from .graph import parse_edge_list, stats
from .indices import dump_scores
from .predictors import PREDICTOR_NAMES, get_predictor
from .split import export_split, nested_split

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leakbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[], help="print graph statistics")
    p.add_argument("edgelist")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("split", help="produce a nested train/validation/test split")
    p.add_argument("edgelist")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="directory for split files and manifest")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("score", help="score node pairs with one predictor")
    p.add_argument("edgelist")
    p.add_argument("--predictor", required=True, choices=PREDICTOR_NAMES)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--pairs", required=True, help="file of node-label pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="run both split protocols and print the loss ratio")
    p.add_argument("edgelist")
    p.add_argument("--predictor", required=True, choices=PREDICTOR_NAMES)
    p.add_argument("--grid", help="a,b,c or start:stop:step (default: predictor grid)")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--negatives", type=int, help="negative sample size (default: test size)")
    p.add_argument("--no-retrain", action="store_true",
                   help="map the validation choice without refitting on train+validation")
    p.add_argument("--out", help="directory for curve dumps (default: $LEAKBENCH_OUTPUT_DIR)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="execute an experiment matrix from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, help="override config worker count")
    p.add_argument("--verbose", action="store_true",
                   help="log each finished run on the diagnostic stream")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("report", help="re-aggregate a records.csv into report files")
    p.add_argument("--records", required=True)
    p.add_argument("--out", help="output directory (default: $LEAKBENCH_OUTPUT_DIR)")
    p.add_argument("--json", action="store_true")

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (LeakbenchError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _dispatch(args) -> int:
    return {
        "stats": _cmd_stats,
        "split": _cmd_split,
        "score": _cmd_score,
        "eval": _cmd_eval,
        "run": _cmd_run,
        "report": _cmd_report,
    }[args.command](args)


def _load_graph(path):
    with open(path, "rb") as fh:
        g = parse_edge_list(fh)
    if g.dropped_duplicate_edges or g.dropped_self_loops:
        print(
            f"warning: dropped {g.dropped_duplicate_edges} duplicate edge(s) "
            f"and {g.dropped_self_loops} self-loop(s)",
            file=sys.stderr,
        )
    return g


def _cmd_stats(args) -> int:
    s = stats(_load_graph(args.edgelist))
    if args.json:
        print(json.dumps({"n": s.n, "m": s.m, "mean_degree": s.mean_degree,
                          "density": s.density}))
    else:
        print(f"N={s.n} M={s.m} k={s.mean_degree:.2f} r={s.density:.4f}")
    return EXIT_OK


def _cmd_split(args) -> int:
    g = _load_graph(args.edgelist)
    bundle = nested_split(g, args.rho, args.seed)
    manifest = {
        "rho": bundle.rho,
        "seed": bundle.seed,
        "nodes": g.n,
        "edges": g.m,
        "sizes": bundle.sizes,
    }
    if args.out:
        manifest = export_split(bundle, args.out)
    if args.json:
        print(json.dumps(manifest, sort_keys=True))
    else:
        sizes = bundle.sizes
        print(
            f"rho={bundle.rho} seed={bundle.seed} train={sizes['train']} "
            f"validation={sizes['validation']} test={sizes['test']}"
        )
    return EXIT_OK


def _cmd_score(args) -> int:
    g = _load_graph(args.edgelist)
    pairs = _read_label_pairs(args.pairs, g)
    predictor = get_predictor(args.predictor)
    result = predictor.score(g, args.param, pairs, seed=args.seed)
    if args.json:
        for (u, v), score in zip(result.pairs, result.scores):
            print(json.dumps({"u": g.labels[u], "v": g.labels[v], "score": score}))
    else:
        dump_scores(result, sys.stdout, labels=g.labels)
    return EXIT_OK


def _read_label_pairs(path, g):
    index = {label: i for i, label in enumerate(g.labels)}
    pairs = []
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(("#", "%")):
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise LeakbenchError(f"{path}:{line_no}: expected two node labels")
            try:
                pairs.append((index[tokens[0]], index[tokens[1]]))
            except KeyError as exc:
                raise LeakbenchError(f"{path}:{line_no}: unknown node label {exc}") from exc
    if not pairs:
        raise LeakbenchError(f"{path}: no pairs found")
    return pairs


def _cmd_eval(args) -> int:
    g = _load_graph(args.edgelist)
    predictor = get_predictor(args.predictor)
    grid = predictor.make_grid(parse_grid_spec(args.grid)) if args.grid else None
    bundle = nested_split(g, args.rho, args.seed)
    negatives = None
    if args.negatives:
        from .split import sample_nonexistent_pairs

        negatives = sample_nonexistent_pairs(g, args.negatives, args.seed)
    result = run_protocols(bundle, predictor, grid, negatives, retrain=not args.no_retrain)

    out_dir = args.out or os.environ.get("LEAKBENCH_OUTPUT_DIR")
    if out_dir:
        _dump_eval(result, Path(out_dir), args)
    payload = {
        "predictor": args.predictor,
        "rho": args.rho,
        "seed": args.seed,
        "lambda_star": result.lambda_star,
        "auc_star": result.auc_star,
        "lambda_prime": result.lambda_prime,
        "auc_prime": result.auc_prime,
        "loss_ratio": result.loss_ratio,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                       for k, v in payload.items()))
    return EXIT_OK


def _dump_eval(result, out_dir: Path, args) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "test_curve.txt", "w") as fh:
        dump_curve(result.test_curve, fh)
    with open(out_dir / "validation_curve.txt", "w") as fh:
        dump_curve(result.validation_curve, fh)
    manifest = {
        "edgelist": args.edgelist,
        "predictor": args.predictor,
        "rho": args.rho,
        "seed": args.seed,
        "grid": list(result.grid.values),
        "retrain": not args.no_retrain,
        "auc_mode": "auto",
        "negatives": args.negatives or "test-size",
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def parse_grid_spec(spec: str) -> list[float]:
    """Parse "a,b,c" or inclusive "start:stop:step" grid notation."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be start:stop:step, got {spec!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid range {spec!r}")
        values = []
        k = 0
        while True:
            value = start + k * step
            if value > stop + 1e-9 * max(1.0, abs(stop)):
                break
            values.append(round(value, 12))
            k += 1
        return values
    values = [float(x) for x in spec.split(",") if x.strip()]
    if not values:
        raise ValueError(f"empty grid spec {spec!r}")
    return values


def _cmd_run(args) -> int:
    if args.verbose:
        logging.getLogger("leakbench").setLevel(logging.INFO)
    config = harness.load_config(args.config)
    if args.jobs:
        config = dataclasses.replace(config, jobs=args.jobs)
    records = harness.run_matrix(config)
    aggregates = harness.aggregate(records)
    written = harness.emit_reports(aggregates, config.output_dir, records=records, config=config)
    summary = {
        "records": len(records),
        "failed": aggregates.n_failed,
        "grand_mean_loss_ratio": aggregates.grand_mean,
        "output_dir": config.output_dir,
        "files": [str(p) for p in written],
    }
    if args.json:
        print(json.dumps(summary))
    else:
        print(
            f"records={summary['records']} failed={summary['failed']} "
            f"grand_mean_loss_ratio={aggregates.grand_mean:.4f} out={config.output_dir}"
        )
    return EXIT_OK


def _cmd_report(args) -> int:
    records = harness.read_records_csv(args.records)
    aggregates = harness.aggregate(records)
    out_dir = args.out or os.environ.get("LEAKBENCH_OUTPUT_DIR") or "leakbench-out"
    written = harness.emit_reports(aggregates, out_dir, records=records)
    if args.json:
        print(json.dumps({"records": len(records), "output_dir": str(out_dir),
                          "files": [str(p) for p in written]}))
    else:
        print(f"records={len(records)} out={out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
