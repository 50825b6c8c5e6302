"""Small seeded graph generators used across the test suite."""

from __future__ import annotations

import numpy as np

from leakbench import Graph


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p); regenerates until at least one edge exists."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    while True:
        mask = rng.random(len(iu[0])) < p
        if mask.any():
            break
    edges = np.column_stack((iu[0][mask], iu[1][mask]))
    return Graph(n, edges)


def gnm(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with exactly m edges."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    pick = rng.choice(len(iu[0]), size=m, replace=False)
    edges = np.column_stack((iu[0][pick], iu[1][pick]))
    return Graph(n, edges)


def planted_partition(block_size: int, blocks: int, p_in: float, p_out: float, seed: int) -> Graph:
    """Random graph with dense blocks and sparse cross-block edges."""
    n = block_size * blocks
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    same = (iu[0] // block_size) == (iu[1] // block_size)
    prob = np.where(same, p_in, p_out)
    mask = rng.random(len(iu[0])) < prob
    edges = np.column_stack((iu[0][mask], iu[1][mask]))
    return Graph(n, edges)


def complete(n: int) -> Graph:
    iu = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack(iu))


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i + 1) for i in range(leaves)])


def two_cliques(k: int, bridge: bool = False) -> Graph:
    """Two disjoint k-cliques, optionally joined by one edge."""
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    edges += [(u + k, v + k) for u in range(k) for v in range(u + 1, k) if u < v]
    if bridge:
        edges.append((0, k))
    return Graph(2 * k, edges)
