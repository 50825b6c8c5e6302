"""Dense reference implementations the sparse code is checked against.

Everything here goes through explicit dense matrices and numpy solvers so it
shares no code path with the package's blockwise sparse iterations.
"""

from __future__ import annotations

import numpy as np

from leakbench import Graph


def dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    if g.m:
        a[g.edge_array[:, 0], g.edge_array[:, 1]] = 1.0
        a += a.T
    return a


def spectral_radius_dense(a: np.ndarray) -> float:
    if not a.any():
        return 0.0
    return float(np.linalg.eigvalsh(a)[-1])


def katz_dense(a: np.ndarray, beta: float) -> np.ndarray:
    n = len(a)
    return np.linalg.inv(np.eye(n) - beta * a) - np.eye(n)


def lp_dense(a: np.ndarray, eps: float) -> np.ndarray:
    return a @ a + eps * (a @ a @ a)


def lhn2_dense(a: np.ndarray, phi: float) -> np.ndarray:
    n = len(a)
    lam = spectral_radius_dense(a)
    if lam == 0.0:
        return np.zeros((n, n))
    k = a.sum(axis=1)
    dinv = np.where(k > 0, 1.0 / np.where(k > 0, k, 1.0), 0.0)
    core = np.linalg.inv(np.eye(n) - (phi / lam) * a)
    return np.diag(dinv) @ core @ np.diag(dinv)


def transition_dense(a: np.ndarray) -> np.ndarray:
    k = a.sum(axis=1)
    p = np.where(k[:, None] > 0, a / np.where(k[:, None] > 0, k[:, None], 1.0), 0.0)
    for z in np.flatnonzero(k == 0):
        p[z, z] = 1.0
    return p


def lrw_dense(g: Graph, t: int) -> np.ndarray:
    """Full score matrix S[u, v] = q_u pi_uv(t) + q_v pi_vu(t)."""
    a = dense_adjacency(g)
    p = transition_dense(a)
    pi = np.linalg.matrix_power(p.T, t)  # pi[:, u] is the walk law from u
    q = a.sum(axis=1) / (2.0 * g.m) if g.m else np.zeros(g.n)
    visits = pi.T  # visits[u, v] = pi_uv(t)
    return q[:, None] * visits + (q[:, None] * visits).T


def srw_dense(g: Graph, t: int) -> np.ndarray:
    a = dense_adjacency(g)
    p = transition_dense(a)
    q = a.sum(axis=1) / (2.0 * g.m) if g.m else np.zeros(g.n)
    acc = np.zeros((g.n, g.n))
    step = np.eye(g.n)
    for _ in range(t):
        step = p.T @ step
        acc += step
    visits = acc.T
    return q[:, None] * visits + (q[:, None] * visits).T


def rwr_dense(g: Graph, c: float) -> np.ndarray:
    a = dense_adjacency(g)
    p = transition_dense(a)
    pi = (1.0 - c) * np.linalg.inv(np.eye(g.n) - c * p.T)
    visits = pi.T  # visits[u, v] = pi_uv
    return visits + visits.T


def cn_dense(a: np.ndarray) -> np.ndarray:
    s0 = a @ a
    np.fill_diagonal(s0, 0.0)
    return s0


def aa_dense(a: np.ndarray, guard: float = 1e-10) -> np.ndarray:
    k = a.sum(axis=1)
    w = np.zeros(len(a))
    w[k >= 2] = 1.0 / np.log(k[k >= 2])
    w[k == 1] = 1.0 / np.log(1.0 + guard)
    s0 = a @ np.diag(w) @ a
    np.fill_diagonal(s0, 0.0)
    return s0


def transfer_dense(a: np.ndarray, decay: float, base: str) -> np.ndarray:
    """Symmetrized (I - decay*S0_norm)^-1 S0 for base "cn" or "aa"."""
    s0 = cn_dense(a) if base == "cn" else aa_dense(a)
    rows = s0.sum(axis=1)
    s0n = np.where(rows[:, None] > 0, s0 / np.where(rows[:, None] > 0, rows[:, None], 1.0), 0.0)
    s = np.linalg.inv(np.eye(len(a)) - decay * s0n) @ s0
    return 0.5 * (s + s.T)


def auc_brute(pos_scores, neg_scores) -> float:
    wins = 0.0
    for p in pos_scores:
        for q in neg_scores:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos_scores) * len(neg_scores))


def all_pairs(n: int) -> np.ndarray:
    iu = np.triu_indices(n, k=1)
    return np.column_stack(iu)
