"""Classical similarity scores for link prediction.

All scorers take an observed (training) graph plus an explicit list of query
pairs and return one score per pair; the full N x N similarity matrix is
never materialized. Internally each scorer propagates per-source vectors in
blocks of dense columns against the sparse adjacency, so cost scales with
the number of distinct query endpoints.

Conventions shared by every scorer: scores are finite and orientation
independent; walk-based transition rows of degree-0 nodes are self-absorbing;
similarity rows of degree-0 nodes are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError
from .graph import Graph

__all__ = [
    "PairScores",
    "HyperGrid",
    "spectral_radius",
    "score_katz",
    "score_lp",
    "score_lhn2",
    "score_lrw",
    "score_srw",
    "score_rwr",
    "score_tscn",
    "score_tsaa",
    "dump_scores",
]

SERIES_TAIL = 1e-10
FIXED_POINT_TOL = 1e-10
_MAX_ITER = 200_000
_BLOCK = 1024

# Guard for 1/ln(k) at k=1; a common neighbor always has degree >= 2, so the
# guarded weight only shows up for nodes that never contribute to a score.
AA_LOG_GUARD = 1e-10


@dataclass(frozen=True, eq=False)
class PairScores:
    """Scores for a fixed list of unordered node pairs."""

    pairs: np.ndarray
    scores: np.ndarray
    predictor_id: str
    hyperparameter: float

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class HyperGrid:
    """Ordered candidate values for one predictor's tunable parameter."""

    predictor_id: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("grid must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("grid values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)


def dump_scores(result: PairScores, fh: IO[str], labels: Sequence[str] | None = None) -> None:
    """Write one "u v score" line per pair, in pair order."""
    for (u, v), s in zip(result.pairs, result.scores):
        if labels is not None:
            u, v = labels[u], labels[v]
        fh.write(f"{u} {v} {s:.12g}\n")


# ----------------------------------------------------------------------
# Shared plumbing
# ----------------------------------------------------------------------


def _check_pairs(g: Graph, pairs) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= g.n:
            raise ValueError("pair endpoint out of range")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValueError("pairs must join two distinct nodes")
    return pairs


def _finalize(predictor_id: str, value: float, pairs: np.ndarray, scores: np.ndarray) -> PairScores:
    if not np.all(np.isfinite(scores)):
        raise NumericalError(f"{predictor_id}: non-finite score produced")
    return PairScores(
        pairs=pairs, scores=scores, predictor_id=predictor_id, hyperparameter=float(value)
    )


def _one_hot(n: int, nodes: np.ndarray) -> np.ndarray:
    out = np.zeros((n, len(nodes)))
    out[nodes, np.arange(len(nodes))] = 1.0
    return out


def _symmetric_gather(g, pairs, column_fn) -> np.ndarray:
    """Scores s[i] = X[hi_i, lo_i] where X columns come from column_fn.

    For orientation-independent indices only one endpoint per pair needs a
    propagated vector; the smaller id is used as the source.
    """
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    sources, col = np.unique(lo, return_inverse=True)
    scores = np.zeros(len(pairs))
    for start in range(0, len(sources), _BLOCK):
        block = sources[start : start + _BLOCK]
        cols = column_fn(block)
        mask = (col >= start) & (col < start + len(block))
        scores[mask] = cols[hi[mask], col[mask] - start]
    return scores


def _directed_gather(g, pairs, column_fn, weight=None) -> np.ndarray:
    """Scores s[i] = w_a*X[b, a] + w_b*X[a, b] over both pair orientations."""
    a = pairs[:, 0]
    b = pairs[:, 1]
    sources, inverse = np.unique(pairs.ravel(), return_inverse=True)
    col_a = inverse[0::2]
    col_b = inverse[1::2]
    scores = np.zeros(len(pairs))
    for start in range(0, len(sources), _BLOCK):
        block = sources[start : start + _BLOCK]
        cols = column_fn(block)
        mask = (col_a >= start) & (col_a < start + len(block))
        term = cols[b[mask], col_a[mask] - start]
        if weight is not None:
            term = term * weight[a[mask]]
        scores[mask] += term
        mask = (col_b >= start) & (col_b < start + len(block))
        term = cols[a[mask], col_b[mask] - start]
        if weight is not None:
            term = term * weight[b[mask]]
        scores[mask] += term
    return scores


def _transition_t(g: Graph) -> sp.csr_matrix:
    """Transpose of the row-stochastic transition matrix (cached).

    Column u holds the step distribution out of u: A[:, u] / k_u, with a
    self-absorbing unit entry for degree-0 nodes.
    """
    if "transition_t" not in g._cache:
        k = g.degrees
        w = np.where(k > 0, 1.0 / np.maximum(k, 1), 0.0)
        pt = g.adjacency().multiply(w[np.newaxis, :]).tocsr()
        if np.any(k == 0):
            pt = (pt + sp.diags((k == 0).astype(np.float64))).tocsr()
        g._cache["transition_t"] = pt
    return g._cache["transition_t"]


def _geometric_series(A: sp.csr_matrix, factor: float, ratio: float, block: np.ndarray,
                      include_identity: bool) -> np.ndarray:
    """Columns of sum_l (factor*A)^l E restricted to ``block`` sources.

    ``ratio`` = factor * lambda_max bounds the per-term L2 contraction, which
    gives a componentwise tail bound for truncation below SERIES_TAIL.
    """
    n = A.shape[0]
    term = _one_hot(n, block)
    acc = term.copy() if include_identity else np.zeros_like(term)
    for _ in range(_MAX_ITER):
        term = factor * (A @ term)
        acc += term
        norm = math.sqrt(float(np.max(np.sum(term * term, axis=0))))
        if ratio <= 0 or norm * ratio / (1.0 - ratio) < SERIES_TAIL:
            return acc
    raise NumericalError("path-series truncation did not converge")


# ----------------------------------------------------------------------
# Spectral radius
# ----------------------------------------------------------------------


def spectral_radius(g: Graph, tol: float = 1e-9) -> float:
    """Largest adjacency eigenvalue by shifted power iteration.

    Iterates on A + I so the dominant eigenvalue is unique even on bipartite
    graphs; the Rayleigh quotient of A is tracked to relative tolerance
    ``tol``. A zero-edge graph returns 0.
    """
    key = ("lambda_max", tol)
    if key in g._cache:
        return g._cache[key]
    if g.m == 0:
        return 0.0
    A = g.adjacency()
    x = np.full(g.n, 1.0 / math.sqrt(g.n))
    prev = math.inf
    estimate = 0.0
    for _ in range(_MAX_ITER):
        y = A @ x
        estimate = float(x @ y)
        z = y + x
        x = z / np.linalg.norm(z)
        if abs(estimate - prev) <= tol * max(1.0, abs(estimate)):
            break
        prev = estimate
    lower = max(2.0 * g.m / g.n, math.sqrt(float(g.degrees.max())))
    value = max(estimate, lower)
    g._cache[key] = value
    return value


# ----------------------------------------------------------------------
# Path-counting indices
# ----------------------------------------------------------------------


def score_katz(g: Graph, beta: float, pairs) -> PairScores:
    """Weighted count of all paths between the endpoints.

    s(u, v) = sum_{l>=1} beta^l (A^l)_{uv}, i.e. [(I - beta*A)^-1 - I]_{uv};
    requires beta < 1/lambda_max for the series to converge.
    """
    pairs = _check_pairs(g, pairs)
    lam = spectral_radius(g)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if lam > 0 and beta * lam >= 1.0:
        raise ValueError(f"beta must be below 1/lambda_max = {1.0 / lam:.6g}")
    A = g.adjacency()
    ratio = beta * lam

    def columns(block):
        return _geometric_series(A, beta, ratio, block, include_identity=False)

    scores = _symmetric_gather(g, pairs, columns)
    return _finalize("katz", beta, pairs, scores)


def score_lp(g: Graph, eps: float, pairs) -> PairScores:
    """Common neighbors plus eps-weighted three-hop path counts.

    s(u, v) = (A^2)_{uv} + eps * (A^3)_{uv}.
    """
    pairs = _check_pairs(g, pairs)
    A = g.adjacency()

    def columns(block):
        y1 = A @ _one_hot(g.n, block)
        y2 = A @ y1
        return y2 + eps * (A @ y2)

    scores = _symmetric_gather(g, pairs, columns)
    return _finalize("lp", eps, pairs, scores)


def score_lhn2(g: Graph, phi: float, pairs) -> PairScores:
    """Degree-normalized path series: neighbors of similar nodes are similar.

    s(u, v) is proportional to [D^-1 (I - (phi/lambda_max) A)^-1 D^-1]_{uv};
    constant prefactors are dropped (AUC only sees the ranking) and pairs
    with a degree-0 endpoint score 0.
    """
    pairs = _check_pairs(g, pairs)
    if not 0.0 < phi < 1.0:
        raise ValueError("phi must be in (0, 1)")
    lam = spectral_radius(g)
    if lam == 0.0:
        return _finalize("lhn2", phi, pairs, np.zeros(len(pairs)))
    A = g.adjacency()
    factor = phi / lam

    def columns(block):
        return _geometric_series(A, factor, phi, block, include_identity=True)

    raw = _symmetric_gather(g, pairs, columns)
    k = g.degrees
    ku = k[pairs[:, 0]]
    kv = k[pairs[:, 1]]
    ok = (ku > 0) & (kv > 0)
    scores = np.zeros(len(pairs))
    scores[ok] = raw[ok] / (ku[ok] * kv[ok])
    return _finalize("lhn2", phi, pairs, scores)


# ----------------------------------------------------------------------
# Random-walk indices
# ----------------------------------------------------------------------


def _walk_weights(g: Graph) -> np.ndarray:
    # Initial-configuration weight of each walk source: k_u / 2M.
    if g.m == 0:
        return np.zeros(g.n)
    return g.degrees / (2.0 * g.m)


def score_lrw(g: Graph, t: int, pairs) -> PairScores:
    """Degree-weighted probability of reaching the other endpoint in t steps.

    s(u, v) = q_u * pi_uv(t) + q_v * pi_vu(t) with q_u = k_u / 2M and pi the
    t-step distribution of a uniform neighbor walk.
    """
    t = _check_steps(t)
    pairs = _check_pairs(g, pairs)
    pt = _transition_t(g)

    def columns(block):
        v = _one_hot(g.n, block)
        for _ in range(t):
            v = pt @ v
        return v

    scores = _directed_gather(g, pairs, columns, weight=_walk_weights(g))
    return _finalize("lrw", t, pairs, scores)


def score_srw(g: Graph, t: int, pairs) -> PairScores:
    """Superposition of the t-step walk index over all lengths 1..t."""
    t = _check_steps(t)
    pairs = _check_pairs(g, pairs)
    pt = _transition_t(g)

    def columns(block):
        v = _one_hot(g.n, block)
        acc = np.zeros_like(v)
        for _ in range(t):
            v = pt @ v
            acc += v
        return acc

    scores = _directed_gather(g, pairs, columns, weight=_walk_weights(g))
    return _finalize("srw", t, pairs, scores)


def _check_steps(t) -> int:
    if int(t) != t or int(t) < 1:
        raise ValueError("step count must be an integer >= 1")
    return int(t)


def score_rwr(g: Graph, c: float, pairs) -> PairScores:
    """Stationary visit probabilities of a walk with restart.

    pi_u solves pi = c * P^T pi + (1-c) e_u, found by fixed-point iteration;
    s(u, v) = pi_uv + pi_vu.
    """
    pairs = _check_pairs(g, pairs)
    if not 0.0 < c < 1.0:
        raise ValueError("continuation probability must be in (0, 1)")
    pt = _transition_t(g)
    cap = max(50, int(10.0 * math.log(1.0 / FIXED_POINT_TOL) / math.log(1.0 / c)) + 1)

    def columns(block):
        e = _one_hot(g.n, block)
        v = e.copy()
        restart = (1.0 - c) * e
        for _ in range(cap):
            v_next = c * (pt @ v) + restart
            residual = float(np.max(np.abs(v_next - v)))
            v = v_next
            if residual < FIXED_POINT_TOL:
                return v
        raise NumericalError(
            f"restart-walk fixed point did not converge within {cap} iterations"
        )

    scores = _directed_gather(g, pairs, columns)
    return _finalize("rwr", c, pairs, scores)


# ----------------------------------------------------------------------
# Similarity-transfer indices
# ----------------------------------------------------------------------


def _ts_matrices(g: Graph, base: str):
    """Base similarity matrix, its row-normalized form, and its max entry."""
    key = ("ts", base)
    if key not in g._cache:
        A = g.adjacency()
        if base == "cn":
            s0 = (A @ A).tocsr()
        else:
            k = g.degrees.astype(np.float64)
            w = np.zeros(g.n)
            w[k >= 2] = 1.0 / np.log(k[k >= 2])
            w[k == 1] = 1.0 / np.log(1.0 + AA_LOG_GUARD)
            s0 = (A.multiply(w[np.newaxis, :]) @ A).tocsr()
        s0.setdiag(0.0)
        s0.eliminate_zeros()
        row_sums = np.asarray(s0.sum(axis=1)).ravel()
        inv = np.where(row_sums > 0, 1.0 / np.where(row_sums > 0, row_sums, 1.0), 0.0)
        s0_norm = s0.multiply(inv[:, np.newaxis]).tocsr()
        s0_max = float(s0.max()) if s0.nnz else 0.0
        g._cache[key] = (s0, s0_norm.T.tocsr(), s0_max)
    return g._cache[key]


def _score_transfer(g: Graph, decay: float, pairs, base: str, predictor_id: str) -> PairScores:
    pairs = _check_pairs(g, pairs)
    if not 0.0 < decay < 1.0:
        raise ValueError("decay must be in (0, 1)")
    s0, s0n_t, s0_max = _ts_matrices(g, base)

    def columns(block):
        # w = sum_j decay^j (S0_norm^T)^j e_u; the transferred score row of u
        # is then S0 w (S0 is symmetric). One-hot columns are substochastic
        # under S0_norm^T, so each term's L1 mass is <= decay^j.
        w = _one_hot(g.n, block)
        acc = w.copy()
        j = 0
        while s0_max * decay ** (j + 1) / (1.0 - decay) >= SERIES_TAIL:
            w = decay * (s0n_t @ w)
            acc += w
            j += 1
            if j > _MAX_ITER:
                raise NumericalError("similarity-transfer series did not converge")
            if not w.any():
                break
        return s0 @ acc

    # Orientation independence: average the two row-oriented transfers.
    scores = 0.5 * _directed_gather(g, pairs, columns)
    return _finalize(predictor_id, decay, pairs, scores)


def score_tscn(g: Graph, decay: float, pairs) -> PairScores:
    """Common-neighbor counts propagated through decayed multi-step transfer.

    S = (I - decay * S0_norm)^-1 S0 with S0 the common-neighbor matrix and
    S0_norm its row-normalized form; s(u, v) = (S_uv + S_vu) / 2 so the
    decay -> 0 limit is exactly the base index.
    """
    return _score_transfer(g, decay, pairs, "cn", "tscn")


def score_tsaa(g: Graph, decay: float, pairs) -> PairScores:
    """Adamic-Adar weights propagated through decayed multi-step transfer.

    Base entry s0(u, v) = sum over shared neighbors z of 1/ln(k_z); transfer
    as in the common-neighbor variant.
    """
    return _score_transfer(g, decay, pairs, "aa", "tsaa")
