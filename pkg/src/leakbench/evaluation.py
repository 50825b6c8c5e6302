"""AUC computation, hyperparameter sweeps under both protocols, Loss Ratio.

The two-set protocol trains on the combined train+validation edges and picks
the grid value with the best test-set AUC; selection feedback from the test
set is exactly the leakage being measured. The three-set protocol trains on
the train edges alone, selects on the validation set, then retrains on
train+validation at the selected value and scores the shared test set once.
Because stochastic predictors reuse the per-grid-point derived seed, that
mapped point always lies on the two-set curve, so the two-set optimum can
never be below it and the Loss Ratio is the fraction of reported performance
attributable to tuning on the test set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import LeakbenchError, NumericalError
from .graph import Graph
from .indices import HyperGrid
from .predictors import Predictor
from .seeding import STREAM_AUC, STREAM_TRAINING, derive_seed, substream
from .split import SplitBundle, sample_nonexistent_pairs, training_graph

__all__ = [
    "AUCResult",
    "ScoreGrid",
    "ProtocolResult",
    "auc",
    "sweep",
    "two_set_eval",
    "three_set_eval",
    "run_protocols",
    "loss_ratio",
    "dump_curve",
]

MAX_EXACT_COMPARISONS = 10_000_000
AUC_SAMPLE_SIZE = 100_000


@dataclass(frozen=True)
class AUCResult:
    """Probability that a positive outranks a negative, ties worth 0.5."""

    value: float
    positives: int
    negatives: int
    mode: str
    sample_size: int | None = None


@dataclass(frozen=True)
class ScoreGrid:
    """AUC at every grid value for one (training graph, pair set) curve."""

    predictor_id: str
    values: tuple[float, ...]
    aucs: tuple[float, ...]

    def best(self) -> tuple[float, float]:
        """(value, auc) of the curve maximum; ties go to the smallest value."""
        idx = int(np.argmax(self.aucs))
        return self.values[idx], self.aucs[idx]

    def best_index(self) -> int:
        return int(np.argmax(self.aucs))


@dataclass(frozen=True)
class ProtocolResult:
    """Outcome of both protocols on one split, plus the Loss Ratio."""

    lambda_star: float
    auc_star: float
    lambda_prime: float
    auc_prime: float
    loss_ratio: float
    grid: HyperGrid
    test_curve: ScoreGrid | None = None
    validation_curve: ScoreGrid | None = None


def auc(
    pos_scores,
    neg_scores,
    mode: str = "auto",
    max_exact_comparisons: int = MAX_EXACT_COMPARISONS,
    sample_size: int = AUC_SAMPLE_SIZE,
    seed: int = 0,
) -> AUCResult:
    """AUC of positive scores against negative scores.

    Exact mode ranks all positive x negative comparisons through a single
    sort with average ranks on ties; sampled mode draws ``sample_size``
    seeded independent comparisons. ``auto`` picks exact when the comparison
    count is at most ``max_exact_comparisons``.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("both score lists must be non-empty")

    if mode == "auto":
        mode = "exact" if len(pos) * len(neg) <= max_exact_comparisons else "sampled"
    if mode == "exact":
        value = _exact_auc(pos, neg)
        return AUCResult(value, len(pos), len(neg), "exact")
    if mode == "sampled":
        rng = substream(seed, STREAM_AUC)
        i = rng.integers(0, len(pos), size=sample_size)
        j = rng.integers(0, len(neg), size=sample_size)
        wins = np.count_nonzero(pos[i] > neg[j])
        ties = np.count_nonzero(pos[i] == neg[j])
        value = (wins + 0.5 * ties) / sample_size
        return AUCResult(value, len(pos), len(neg), "sampled", sample_size)
    raise ValueError(f"unknown AUC mode: {mode}")


def _exact_auc(pos: np.ndarray, neg: np.ndarray) -> float:
    merged = np.concatenate((neg, pos))
    order = np.argsort(merged, kind="mergesort")
    sorted_vals = merged[order]
    new_group = np.concatenate(([True], sorted_vals[1:] != sorted_vals[:-1]))
    group_id = np.cumsum(new_group) - 1
    counts = np.bincount(group_id)
    firsts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    avg_rank = firsts + (counts + 1) / 2.0  # 1-based average rank per tie group
    ranks = np.empty(len(merged))
    ranks[order] = avg_rank[group_id]
    p = len(pos)
    q = len(neg)
    u_stat = ranks[q:].sum() - p * (p + 1) / 2.0
    return float(u_stat / (p * q))


def sweep(
    train_graph: Graph,
    positives,
    negatives,
    predictor: Predictor,
    grid: HyperGrid,
    seed: int = 0,
    auc_mode: str = "auto",
    max_exact_comparisons: int = MAX_EXACT_COMPARISONS,
    sample_size: int = AUC_SAMPLE_SIZE,
) -> ScoreGrid:
    """AUC of ``predictor`` at every grid value for a fixed pair set.

    Positives must be absent from the training graph. Stochastic predictors
    retrain per grid point with a seed derived from (seed, point index), so
    the curve is reproducible and shared across protocols.
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    negatives = np.asarray(negatives, dtype=np.int64).reshape(-1, 2)
    _check_disjoint_from_training(train_graph, positives)
    pairs = np.concatenate((positives, negatives))
    aucs = []
    for index, value in enumerate(grid.values):
        scores = _point_scores(train_graph, predictor, grid, index, pairs, seed)
        result = auc(
            scores[: len(positives)],
            scores[len(positives) :],
            mode=auc_mode,
            max_exact_comparisons=max_exact_comparisons,
            sample_size=sample_size,
            seed=derive_seed(seed, STREAM_AUC, index),
        )
        aucs.append(result.value)
    return ScoreGrid(predictor.name, grid.values, tuple(aucs))


def _point_scores(train_graph, predictor, grid, index, pairs, seed) -> np.ndarray:
    value = grid.values[index]
    point_seed = derive_seed(seed, STREAM_TRAINING, index)
    try:
        return predictor.score(train_graph, value, pairs, seed=point_seed).scores
    except (ValueError, LeakbenchError) as exc:
        raise type(exc)(f"{predictor.name} at grid value {value}: {exc}") from exc


def _check_disjoint_from_training(train_graph: Graph, positives: np.ndarray) -> None:
    if positives.size == 0:
        raise ValueError("positives must be non-empty")
    lo = np.minimum(positives[:, 0], positives[:, 1])
    hi = np.maximum(positives[:, 0], positives[:, 1])
    keys = lo * train_graph.n + hi
    edge_keys = train_graph.edge_keys()
    if edge_keys.size:
        pos = np.clip(np.searchsorted(edge_keys, keys), 0, edge_keys.size - 1)
        if np.any(edge_keys[pos] == keys):
            raise ValueError("positives must be disjoint from training edges")


def two_set_eval(
    bundle: SplitBundle,
    predictor: Predictor,
    grid: HyperGrid | None = None,
    negatives=None,
    **auc_options,
) -> tuple[float, float]:
    """Train on train+validation, tune directly on the test set.

    Returns the grid value with the highest test AUC and that AUC. This is
    the protocol whose selection step feeds on the held-out edges.
    """
    grid, negatives = _protocol_inputs(bundle, predictor, grid, negatives)
    curve = sweep(
        training_graph(bundle.graph, bundle.train_full),
        bundle.test,
        negatives,
        predictor,
        grid,
        seed=bundle.seed,
        **auc_options,
    )
    return curve.best()


def three_set_eval(
    bundle: SplitBundle,
    predictor: Predictor,
    grid: HyperGrid | None = None,
    negatives=None,
    retrain: bool = True,
    **auc_options,
) -> tuple[float, float]:
    """Tune on the validation set, then score the test set once.

    With ``retrain`` (default) the model is refit on train+validation at the
    selected value before scoring the test positives, which places the
    reported point on the same test curve the two-set protocol maximizes.
    """
    grid, negatives = _protocol_inputs(bundle, predictor, grid, negatives)
    validation_curve = sweep(
        training_graph(bundle.graph, bundle.train),
        bundle.validation,
        negatives,
        predictor,
        grid,
        seed=bundle.seed,
        **auc_options,
    )
    prime_index = validation_curve.best_index()
    auc_prime = _mapped_test_auc(
        bundle, predictor, grid, prime_index, negatives, retrain, auc_options
    )
    return grid.values[prime_index], auc_prime


def _protocol_inputs(bundle, predictor, grid, negatives):
    if grid is None:
        grid = predictor.default_grid()
    if negatives is None:
        negatives = sample_nonexistent_pairs(bundle.graph, len(bundle.test), bundle.seed)
    return grid, np.asarray(negatives, dtype=np.int64).reshape(-1, 2)


def _mapped_test_auc(bundle, predictor, grid, prime_index, negatives, retrain, auc_options):
    """Test AUC at the validation-selected grid point."""
    g = bundle.graph
    kept = bundle.train_full if retrain else bundle.train
    graph = training_graph(g, kept)
    pairs = np.concatenate((bundle.test, negatives))
    scores = _point_scores(graph, predictor, grid, prime_index, pairs, bundle.seed)
    return auc(
        scores[: len(bundle.test)],
        scores[len(bundle.test) :],
        mode=auc_options.get("auc_mode", "auto"),
        max_exact_comparisons=auc_options.get("max_exact_comparisons", MAX_EXACT_COMPARISONS),
        sample_size=auc_options.get("sample_size", AUC_SAMPLE_SIZE),
        seed=derive_seed(bundle.seed, STREAM_AUC, prime_index),
    ).value


def run_protocols(
    bundle: SplitBundle,
    predictor: Predictor,
    grid: HyperGrid | None = None,
    negatives=None,
    retrain: bool = True,
    auc_mode: str = "auto",
    max_exact_comparisons: int = MAX_EXACT_COMPARISONS,
    sample_size: int = AUC_SAMPLE_SIZE,
) -> ProtocolResult:
    """Both protocols on one split bundle, sharing the test curve.

    The same negative sample (drawn from non-edges of the full graph) is
    reused for every grid point of both protocols, so AUC differences come
    from the split strategy alone.
    """
    if grid is None:
        grid = predictor.default_grid()
    g = bundle.graph
    if negatives is None:
        negatives = sample_nonexistent_pairs(g, len(bundle.test), bundle.seed)
    negatives = np.asarray(negatives, dtype=np.int64).reshape(-1, 2)
    auc_options = dict(
        auc_mode=auc_mode,
        max_exact_comparisons=max_exact_comparisons,
        sample_size=sample_size,
    )

    graph_full_train = training_graph(g, bundle.train_full)
    test_curve = sweep(
        graph_full_train, bundle.test, negatives, predictor, grid,
        seed=bundle.seed, **auc_options,
    )
    lambda_star, auc_star = test_curve.best()

    graph_train = training_graph(g, bundle.train)
    validation_curve = sweep(
        graph_train, bundle.validation, negatives, predictor, grid,
        seed=bundle.seed, **auc_options,
    )
    prime_index = validation_curve.best_index()
    lambda_prime = grid.values[prime_index]

    if retrain:
        # Identical computation to the test curve at prime_index (same
        # training edges, same derived seed), so read it off the curve.
        auc_prime = test_curve.aucs[prime_index]
    else:
        auc_prime = _mapped_test_auc(
            bundle, predictor, grid, prime_index, negatives, False,
            dict(auc_mode=auc_mode, max_exact_comparisons=max_exact_comparisons,
                 sample_size=sample_size),
        )

    return ProtocolResult(
        lambda_star=lambda_star,
        auc_star=auc_star,
        lambda_prime=lambda_prime,
        auc_prime=auc_prime,
        loss_ratio=loss_ratio(auc_star, auc_prime),
        grid=grid,
        test_curve=test_curve,
        validation_curve=validation_curve,
    )


def loss_ratio(auc_star: float, auc_prime: float) -> float:
    """Fraction of the tuned-on-test AUC lost under clean tuning.

    |auc_star - auc_prime| / auc_star, clamped to [0, 1].
    """
    if auc_star <= 0:
        raise NumericalError("loss ratio undefined for non-positive reference AUC")
    value = abs(auc_star - auc_prime) / auc_star
    return min(max(value, 0.0), 1.0)


def dump_curve(curve: ScoreGrid, fh: IO[str]) -> None:
    """Write one "lambda auc" line per grid point."""
    for value, score in zip(curve.values, curve.aucs):
        fh.write(f"{value:.12g} {score:.12g}\n")
