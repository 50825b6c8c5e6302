"""Uniform predictor registry.

Every predictor exposes score(graph, value, pairs, seed) where ``value`` is
the single tunable swept by the evaluation protocols. For the path-series
indices whose raw decay must stay below 1/lambda_max, grid values are
expressed as spectral fractions in (0, 1) so one grid is admissible on every
network; the deep-walk predictor sweeps the embedding dimension and treats
the remaining knobs as fixed configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import deepwalk as dw
from . import indices as ix
from .graph import Graph
from .indices import HyperGrid, PairScores
from .seeding import STREAM_SGD, STREAM_WALKS, derive_seed

__all__ = ["Predictor", "DeepWalkConfig", "PREDICTOR_NAMES", "get_predictor"]


@dataclass(frozen=True)
class DeepWalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    metric: str = "dot"


@dataclass(frozen=True)
class Predictor:
    """One scoring algorithm plus the contract of its tunable parameter."""

    name: str
    param_name: str
    stochastic: bool
    integer_valued: bool
    default_values: tuple[float, ...]
    _score: Callable
    _check_value: Callable[[float], None]
    options: object = None

    def score(self, g: Graph, value: float, pairs, seed: int = 0) -> PairScores:
        self._check_value(value)
        return self._score(g, value, pairs, seed, self.options)

    def default_grid(self) -> HyperGrid:
        return HyperGrid(self.name, self.default_values)

    def make_grid(self, values) -> HyperGrid:
        values = tuple(float(v) for v in values)
        for v in values:
            self._check_value(v)
        return HyperGrid(self.name, values)


def _check_unit_interval(name):
    def check(v):
        if not 0.0 < v < 1.0:
            raise ValueError(f"{name} must be in (0, 1), got {v}")

    return check


def _check_real(name):
    def check(v):
        if not np.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")

    return check


def _check_integer(name, minimum):
    def check(v):
        if int(v) != v or int(v) < minimum:
            raise ValueError(f"{name} must be an integer >= {minimum}, got {v}")

    return check


def _score_katz(g, value, pairs, seed, options):
    lam = ix.spectral_radius(g)
    beta = value / lam if lam > 0 else value
    result = ix.score_katz(g, beta, pairs)
    return result


def _score_lhn2(g, value, pairs, seed, options):
    return ix.score_lhn2(g, value, pairs)


def _score_lp(g, value, pairs, seed, options):
    return ix.score_lp(g, value, pairs)


def _score_lrw(g, value, pairs, seed, options):
    return ix.score_lrw(g, int(value), pairs)


def _score_srw(g, value, pairs, seed, options):
    return ix.score_srw(g, int(value), pairs)


def _score_rwr(g, value, pairs, seed, options):
    return ix.score_rwr(g, value, pairs)


def _score_tscn(g, value, pairs, seed, options):
    return ix.score_tscn(g, value, pairs)


def _score_tsaa(g, value, pairs, seed, options):
    return ix.score_tsaa(g, value, pairs)


def _score_deepwalk(g, value, pairs, seed, options: DeepWalkConfig):
    corpus = dw.generate_walks(
        g,
        walks_per_node=options.walks_per_node,
        walk_length=options.walk_length,
        seed=derive_seed(seed, STREAM_WALKS),
    )
    emb = dw.train_skipgram(
        corpus,
        dim=int(value),
        window=options.window,
        negatives=options.negatives,
        epochs=options.epochs,
        learning_rate=options.learning_rate,
        seed=derive_seed(seed, STREAM_SGD),
    )
    return dw.score_embedding(emb, pairs, metric=options.metric)


_FRACTIONS = tuple(round(0.05 + 0.1 * i, 2) for i in range(10))

_SPECS = {
    "katz": ("decay fraction of 1/lambda_max", False, False, _FRACTIONS,
             _score_katz, _check_unit_interval("katz decay fraction")),
    "lhn2": ("decay fraction of 1/lambda_max", False, False, _FRACTIONS,
             _score_lhn2, _check_unit_interval("lhn2 decay fraction")),
    "lp": ("three-hop weight", False, False, (0.0, 0.001, 0.005, 0.01, 0.05, 0.1),
           _score_lp, _check_real("lp three-hop weight")),
    "lrw": ("walk steps", False, True, tuple(float(t) for t in range(1, 8)),
            _score_lrw, _check_integer("lrw walk steps", 1)),
    "srw": ("walk steps", False, True, tuple(float(t) for t in range(1, 8)),
            _score_srw, _check_integer("srw walk steps", 1)),
    "rwr": ("continuation probability", False, False, _FRACTIONS,
            _score_rwr, _check_unit_interval("rwr continuation probability")),
    "tscn": ("transfer decay", False, False, _FRACTIONS,
             _score_tscn, _check_unit_interval("tscn transfer decay")),
    "tsaa": ("transfer decay", False, False, _FRACTIONS,
             _score_tsaa, _check_unit_interval("tsaa transfer decay")),
    "deepwalk": ("embedding dimension", True, True, (8.0, 16.0, 32.0, 64.0, 128.0),
                 _score_deepwalk, _check_integer("embedding dimension", 2)),
}

PREDICTOR_NAMES = tuple(_SPECS)


def get_predictor(name: str, **options) -> Predictor:
    """Look up a predictor by name; keyword options configure deepwalk."""
    if name not in _SPECS:
        raise ValueError(
            f"unknown predictor {name!r}; choose from {', '.join(PREDICTOR_NAMES)}"
        )
    param_name, stochastic, integer_valued, default_values, score, check = _SPECS[name]
    if name == "deepwalk":
        opts = DeepWalkConfig(**options)
    else:
        if options:
            raise ValueError(f"predictor {name!r} takes no options")
        opts = None
    return Predictor(
        name=name,
        param_name=param_name,
        stochastic=stochastic,
        integer_valued=integer_valued,
        default_values=default_values,
        _score=score,
        _check_value=check,
        options=opts,
    )
