"""Experiment matrix driver, aggregation, and report emission.

One run record per (network, predictor, rho, seed) cell. Aggregation is
two-stage throughout: per-network means over runs first, then per-category
means over networks, then unweighted means over categories for marginals, so
small categories are not drowned out by large ones.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import mean
from typing import Iterable

from .errors import ConfigError
from .evaluation import AUC_SAMPLE_SIZE, MAX_EXACT_COMPARISONS, run_protocols
from .graph import Graph, parse_edge_list
from .predictors import PREDICTOR_NAMES, get_predictor
from .split import nested_split, sample_nonexistent_pairs

__all__ = [
    "DatasetSpec",
    "PredictorSpec",
    "ExperimentConfig",
    "RunRecord",
    "Aggregates",
    "load_config",
    "config_hash",
    "run_matrix",
    "aggregate",
    "emit_reports",
    "write_records_csv",
    "read_records_csv",
]

logger = logging.getLogger("leakbench")

DEFAULT_RHOS = (0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
DEFAULT_SEED_COUNT = 10


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    name: str
    category: str


@dataclass(frozen=True)
class PredictorSpec:
    name: str
    grid: tuple[float, ...] | None = None
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    predictors: tuple[PredictorSpec, ...]
    rhos: tuple[float, ...] = DEFAULT_RHOS
    seeds: tuple[int, ...] = tuple(range(DEFAULT_SEED_COUNT))
    negatives_per_positive: float = 1.0
    auc_max_exact_comparisons: int = MAX_EXACT_COMPARISONS
    auc_sample_size: int = AUC_SAMPLE_SIZE
    three_set_retrain: bool = True
    output_dir: str = "leakbench-out"
    jobs: int = 1


@dataclass
class RunRecord:
    """Outcome of one (network, predictor, rho, seed) experiment."""

    network: str
    category: str
    predictor: str
    rho: float
    seed: int
    lambda_star: float = float("nan")
    auc_star: float = float("nan")
    lambda_prime: float = float("nan")
    auc_prime: float = float("nan")
    loss_ratio: float = float("nan")
    wall_time: float = 0.0
    status: str = "ok"
    error: str = ""


_CONFIG_KEYS = {
    "datasets",
    "predictors",
    "rhos",
    "seeds",
    "negatives_per_positive",
    "auc",
    "three_set_retrain",
    "output_dir",
    "jobs",
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a JSON experiment configuration.

    Dataset paths are resolved relative to the config file. ``seeds`` may be
    an integer n (meaning seeds 0..n-1) or an explicit list.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    base = path.parent
    datasets = []
    for entry in _require(raw, "datasets", list):
        try:
            spec = DatasetSpec(
                path=str((base / entry["path"]).resolve()),
                name=str(entry["name"]),
                category=str(entry["category"]),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"dataset entries need path/name/category: {entry!r}") from exc
        datasets.append(spec)
    if not datasets:
        raise ConfigError("config lists no datasets")

    predictors = []
    for entry in _require(raw, "predictors", list):
        if isinstance(entry, str):
            entry = {"name": entry}
        name = entry.get("name")
        if name not in PREDICTOR_NAMES:
            raise ConfigError(f"unknown predictor in config: {name!r}")
        grid = entry.get("grid")
        options = entry.get("options", {})
        try:
            pred = get_predictor(name, **options)
            if grid is not None:
                grid = tuple(float(v) for v in grid)
                pred.make_grid(grid)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad predictor entry {entry!r}: {exc}") from exc
        predictors.append(PredictorSpec(name=name, grid=grid, options=dict(options)))
    if not predictors:
        raise ConfigError("config lists no predictors")

    rhos = tuple(float(r) for r in raw.get("rhos", DEFAULT_RHOS))
    if any(not 0.0 < r < 1.0 for r in rhos):
        raise ConfigError("every rho must be in (0, 1)")

    seeds = raw.get("seeds", DEFAULT_SEED_COUNT)
    if isinstance(seeds, int):
        seeds = tuple(range(seeds))
    else:
        seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ConfigError("config lists no seeds")

    auc = raw.get("auc", {})
    if not isinstance(auc, dict) or set(auc) - {"max_exact_comparisons", "sample_size"}:
        raise ConfigError("auc section takes max_exact_comparisons and sample_size")

    output_dir = raw.get("output_dir") or os.environ.get(
        "LEAKBENCH_OUTPUT_DIR", "leakbench-out"
    )

    return ExperimentConfig(
        datasets=tuple(datasets),
        predictors=tuple(predictors),
        rhos=rhos,
        seeds=seeds,
        negatives_per_positive=float(raw.get("negatives_per_positive", 1.0)),
        auc_max_exact_comparisons=int(auc.get("max_exact_comparisons", MAX_EXACT_COMPARISONS)),
        auc_sample_size=int(auc.get("sample_size", AUC_SAMPLE_SIZE)),
        three_set_retrain=bool(raw.get("three_set_retrain", True)),
        output_dir=str(output_dir),
        jobs=int(raw.get("jobs", 1)),
    )


def _require(raw, key, kind):
    value = raw.get(key)
    if not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} must be a {kind.__name__}")
    return value


def config_to_dict(config: ExperimentConfig) -> dict:
    out = asdict(config)
    out["datasets"] = [asdict(d) for d in config.datasets]
    out["predictors"] = [asdict(p) for p in config.predictors]
    return out


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


# ----------------------------------------------------------------------
# Matrix execution
# ----------------------------------------------------------------------


def run_matrix(config: ExperimentConfig) -> list[RunRecord]:
    """Run every (dataset, predictor, rho, seed) cell of the config.

    All dataset files are parsed up front (an unreadable one aborts before
    any run); per-cell failures are captured in their record and never stop
    the matrix. The record list is deterministic for a fixed config.
    """
    graphs: dict[str, Graph] = {}
    for spec in config.datasets:
        try:
            with open(spec.path, "rb") as fh:
                graphs[spec.path] = parse_edge_list(fh)
        except Exception as exc:
            raise ConfigError(f"cannot load dataset {spec.name} ({spec.path}): {exc}") from exc

    tasks = [
        (dataset, pspec, rho, seed)
        for dataset in config.datasets
        for pspec in config.predictors
        for rho in config.rhos
        for seed in config.seeds
    ]
    records = []
    if config.jobs > 1:
        args = [
            (dataset, pspec, rho, seed, _cell_settings(config))
            for dataset, pspec, rho, seed in tasks
        ]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for record in pool.map(_run_cell_from_path, args, chunksize=1):
                records.append(record)
                _log_record(record)
    else:
        for dataset, pspec, rho, seed in tasks:
            record = _run_cell(graphs[dataset.path], dataset, pspec, rho, seed,
                               _cell_settings(config))
            records.append(record)
            _log_record(record)
    n_failed = sum(r.status != "ok" for r in records)
    if n_failed:
        logger.warning("%d of %d runs failed", n_failed, len(records))
    return records


def _log_record(record: RunRecord) -> None:
    if record.status == "ok":
        logger.info(
            "%s %s rho=%g seed=%d loss_ratio=%.4f (%.1fs)",
            record.network, record.predictor, record.rho, record.seed,
            record.loss_ratio, record.wall_time,
        )
    else:
        logger.info(
            "%s %s rho=%g seed=%d FAILED: %s",
            record.network, record.predictor, record.rho, record.seed, record.error,
        )


def _cell_settings(config: ExperimentConfig) -> dict:
    return dict(
        negatives_per_positive=config.negatives_per_positive,
        max_exact_comparisons=config.auc_max_exact_comparisons,
        sample_size=config.auc_sample_size,
        retrain=config.three_set_retrain,
    )


@functools.lru_cache(maxsize=8)
def _load_graph_cached(path: str) -> Graph:
    with open(path, "rb") as fh:
        return parse_edge_list(fh)


def _run_cell_from_path(args) -> RunRecord:
    dataset, pspec, rho, seed, settings = args
    return _run_cell(_load_graph_cached(dataset.path), dataset, pspec, rho, seed, settings)


def _run_cell(g: Graph, dataset: DatasetSpec, pspec: PredictorSpec,
              rho: float, seed: int, settings: dict) -> RunRecord:
    record = RunRecord(
        network=dataset.name, category=dataset.category,
        predictor=pspec.name, rho=rho, seed=seed,
    )
    start = time.perf_counter()
    try:
        predictor = get_predictor(pspec.name, **pspec.options)
        grid = predictor.make_grid(pspec.grid) if pspec.grid else predictor.default_grid()
        bundle = nested_split(g, rho, seed)
        n_negatives = max(1, round(settings["negatives_per_positive"] * len(bundle.test)))
        negatives = sample_nonexistent_pairs(g, n_negatives, seed)
        result = run_protocols(
            bundle, predictor, grid, negatives,
            retrain=settings["retrain"],
            max_exact_comparisons=settings["max_exact_comparisons"],
            sample_size=settings["sample_size"],
        )
        record.lambda_star = result.lambda_star
        record.auc_star = result.auc_star
        record.lambda_prime = result.lambda_prime
        record.auc_prime = result.auc_prime
        record.loss_ratio = result.loss_ratio
    except Exception as exc:  # isolate the cell; the matrix keeps going
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
    record.wall_time = time.perf_counter() - start
    return record


# ----------------------------------------------------------------------
# Aggregation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CellStat:
    mean: float
    std: float
    networks: int


@dataclass(frozen=True)
class Aggregates:
    """Two-stage means of Loss Ratio and AUC over an experiment matrix."""

    predictors: tuple[str, ...]
    categories: tuple[str, ...]
    cells: dict
    algo_avg: dict
    net_avg: dict
    grand_mean: float
    rhos: tuple[float, ...]
    loss_by_rho: dict
    auc_by_rho: dict
    n_records: int
    n_failed: int


def aggregate(records: Iterable[RunRecord]) -> Aggregates:
    """Aggregate run records into table cells, marginals, and rho curves.

    Pooling order: runs -> per-network mean -> per-category mean (cell) ->
    unweighted mean over cells (marginals, grand mean). Failed records are
    excluded from every mean and only counted.
    """
    records = list(records)
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        raise ValueError("no successful records to aggregate")
    # keep labels seen only on failed records so reports can warn about them
    predictors = _stable_unique(r.predictor for r in records)
    categories = _stable_unique(r.category for r in records)
    rhos = tuple(sorted({r.rho for r in ok}))

    # network-level loss means, keyed by (predictor, category, network)
    per_network: dict[tuple, list[float]] = {}
    for r in ok:
        per_network.setdefault((r.predictor, r.category, r.network), []).append(r.loss_ratio)
    network_means = {key: mean(vals) for key, vals in per_network.items()}

    cells = {}
    for pred in predictors:
        for cat in categories:
            values = [v for (p, c, _), v in network_means.items() if p == pred and c == cat]
            if values:
                spread = (mean([(v - mean(values)) ** 2 for v in values])) ** 0.5
                cells[(pred, cat)] = CellStat(mean(values), spread, len(values))

    algo_avg = {
        pred: mean(values)
        for pred in predictors
        if (values := [cells[(pred, cat)].mean for cat in categories if (pred, cat) in cells])
    }
    net_avg = {
        cat: mean(values)
        for cat in categories
        if (values := [cells[(pred, cat)].mean for pred in predictors if (pred, cat) in cells])
    }
    grand_mean = mean(stat.mean for stat in cells.values())

    loss_by_rho = {}
    auc_by_rho = {}
    for pred in predictors:
        for rho in rhos:
            subset = [r for r in ok if r.predictor == pred and r.rho == rho]
            if not subset:
                continue
            loss_by_rho[(pred, rho)] = _two_stage(subset, "loss_ratio")
            auc_by_rho[(pred, rho)] = (
                _two_stage(subset, "auc_star"),
                _two_stage(subset, "auc_prime"),
            )

    return Aggregates(
        predictors=predictors,
        categories=categories,
        cells=cells,
        algo_avg=algo_avg,
        net_avg=net_avg,
        grand_mean=grand_mean,
        rhos=rhos,
        loss_by_rho=loss_by_rho,
        auc_by_rho=auc_by_rho,
        n_records=len(records),
        n_failed=len(records) - len(ok),
    )


def _two_stage(records: list[RunRecord], attr: str) -> float:
    by_network: dict[tuple, list[float]] = {}
    for r in records:
        by_network.setdefault((r.category, r.network), []).append(getattr(r, attr))
    by_category: dict[str, list[float]] = {}
    for (cat, _), vals in by_network.items():
        by_category.setdefault(cat, []).append(mean(vals))
    return mean(mean(vals) for vals in by_category.values())


def _stable_unique(items) -> tuple:
    seen: dict = {}
    for item in items:
        seen.setdefault(item, None)
    return tuple(seen)


# ----------------------------------------------------------------------
# Report emission
# ----------------------------------------------------------------------

RECORD_FIELDS = [
    "network", "category", "predictor", "rho", "seed",
    "lambda_star", "auc_star", "lambda_prime", "auc_prime", "loss_ratio",
    "wall_time", "status", "error",
]


def write_records_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([getattr(r, f) for f in RECORD_FIELDS])


def read_records_csv(path: str | Path) -> list[RunRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(RunRecord(
                network=row["network"],
                category=row["category"],
                predictor=row["predictor"],
                rho=float(row["rho"]),
                seed=int(row["seed"]),
                lambda_star=float(row["lambda_star"]),
                auc_star=float(row["auc_star"]),
                lambda_prime=float(row["lambda_prime"]),
                auc_prime=float(row["auc_prime"]),
                loss_ratio=float(row["loss_ratio"]),
                wall_time=float(row["wall_time"]),
                status=row["status"],
                error=row["error"],
            ))
    return records


def emit_reports(
    aggregates: Aggregates,
    out_dir: str | Path,
    records: Iterable[RunRecord] | None = None,
    config: ExperimentConfig | None = None,
) -> list[Path]:
    """Write the loss table (CSV + Markdown), curve CSVs, and a manifest.

    Emission is deterministic: the same aggregates produce byte-identical
    files. Categories without any successful record are omitted with a
    warning.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    present = [cat for cat in aggregates.categories if cat in aggregates.net_avg]
    dropped = set(aggregates.categories) - set(present)
    if dropped:
        logger.warning("omitting categories with no successful records: %s", sorted(dropped))
    predictors = [p for p in aggregates.predictors if p in aggregates.algo_avg]

    path = out / "loss_table.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor", *present, "Algo Avg."])
        for pred in predictors:
            writer.writerow([pred, *[_pct(aggregates.cells.get((pred, cat))) for cat in present],
                             f"{100 * aggregates.algo_avg[pred]:.2f}"])
        writer.writerow(["Net Avg.", *[f"{100 * aggregates.net_avg[cat]:.2f}" for cat in present],
                         f"{100 * aggregates.grand_mean:.2f}"])
    written.append(path)

    path = out / "loss_table.md"
    with open(path, "w") as fh:
        fh.write("| predictor | " + " | ".join(present) + " | Algo Avg. |\n")
        fh.write("|" + " --- |" * (len(present) + 2) + "\n")
        for pred in predictors:
            cells = [_pct(aggregates.cells.get((pred, cat)), suffix="%") for cat in present]
            fh.write(f"| {pred} | " + " | ".join(cells)
                     + f" | {100 * aggregates.algo_avg[pred]:.2f}% |\n")
        nets = [f"{100 * aggregates.net_avg[cat]:.2f}%" for cat in present]
        fh.write("| Net Avg. | " + " | ".join(nets)
                 + f" | {100 * aggregates.grand_mean:.2f}% |\n")
        if config is not None:
            fh.write(f"\nconfig hash: `{config_hash(config)}`\n")
    written.append(path)

    path = out / "cells.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor", "category", "mean_loss_ratio", "std", "networks"])
        for pred in predictors:
            for cat in present:
                stat = aggregates.cells.get((pred, cat))
                if stat:
                    writer.writerow([pred, cat, stat.mean, stat.std, stat.networks])
    written.append(path)

    path = out / "rho_curves.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor", "rho", "mean_loss_ratio"])
        for pred in predictors:
            for rho in aggregates.rhos:
                if (pred, rho) in aggregates.loss_by_rho:
                    writer.writerow([pred, rho, aggregates.loss_by_rho[(pred, rho)]])
    written.append(path)

    path = out / "auc_vs_rho.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor", "rho", "auc_two_set", "auc_three_set"])
        for pred in predictors:
            for rho in aggregates.rhos:
                if (pred, rho) in aggregates.auc_by_rho:
                    two, three = aggregates.auc_by_rho[(pred, rho)]
                    writer.writerow([pred, rho, two, three])
    written.append(path)

    if records is not None:
        path = out / "records.csv"
        write_records_csv(records, path)
        written.append(path)

    manifest = {
        "n_records": aggregates.n_records,
        "n_failed": aggregates.n_failed,
        "predictors": list(aggregates.predictors),
        "categories": list(aggregates.categories),
        "rhos": list(aggregates.rhos),
    }
    if config is not None:
        manifest["config"] = config_to_dict(config)
        manifest["config_hash"] = config_hash(config)
        manifest["seeds"] = list(config.seeds)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


def _pct(stat: CellStat | None, suffix: str = "") -> str:
    if stat is None:
        return ""
    return f"{100 * stat.mean:.2f}{suffix}"
