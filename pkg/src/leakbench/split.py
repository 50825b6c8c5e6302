"""Nested edge partitioning shared by the two evaluation protocols.

The edge set is first divided into a hold-out test part and the remainder;
the remainder is then subdivided into train and validation parts. Both
protocols therefore score against the same test edges: the two-set protocol
trains on train+validation, the three-set protocol trains on train and tunes
on validation. Part sizes follow the ratio (1-rho)^2 : (rho-rho^2) : rho.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SamplingError, SplitError
from .graph import Graph, format_edge_list
from .seeding import STREAM_NEGATIVES, STREAM_SHUFFLE, STREAM_VALIDATION, substream

__all__ = [
    "SplitBundle",
    "nested_split",
    "training_graph",
    "sample_nonexistent_pairs",
    "part_sizes",
    "export_split",
]


@dataclass(frozen=True, eq=False)
class SplitBundle:
    """One seeded nested partition of a graph's edges.

    ``train``, ``validation`` and ``test`` are disjoint (k, 2) edge arrays
    whose union is the full edge set. ``train_full`` is the two-set
    protocol's training set (train + validation).
    """

    graph: Graph
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    rho: float
    seed: int

    @property
    def train_full(self) -> np.ndarray:
        return np.concatenate((self.train, self.validation))

    @property
    def sizes(self) -> dict[str, int]:
        return {
            "train": len(self.train),
            "validation": len(self.validation),
            "test": len(self.test),
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, SplitBundle):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.rho == other.rho
            and self.seed == other.seed
            and np.array_equal(self.train, other.train)
            and np.array_equal(self.validation, other.validation)
            and np.array_equal(self.test, other.test)
        )


def part_sizes(m: int, rho: float) -> tuple[int, int, int]:
    """(train, validation, test) sizes for ``m`` edges at ratio ``rho``.

    Test and validation sizes are rounded from rho*m and (rho-rho^2)*m;
    the rounding residue lands in the training part.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    n_test = round(rho * m)
    n_val = round((rho - rho * rho) * m)
    n_train = m - n_test - n_val
    return n_train, n_val, n_test


def nested_split(g: Graph, rho: float, seed: int) -> SplitBundle:
    """Seeded nested partition of ``g``'s edges.

    A seeded shuffle assigns the first round(rho*M) edges to the test part;
    a second seeded draw splits the remainder into validation and train.
    Identical (graph, rho, seed) always produce an identical bundle.

    Raises
    ------
    SplitError
        If any of the three parts would be empty.
    """
    n_train, n_val, n_test = part_sizes(g.m, rho)
    if min(n_train, n_val, n_test) < 1:
        raise SplitError(
            f"split {n_train}/{n_val}/{n_test} of {g.m} edges at rho={rho} "
            "leaves an empty part"
        )

    edges = g.edge_array
    perm = substream(seed, STREAM_SHUFFLE).permutation(g.m)
    test = edges[perm[:n_test]]
    rest = edges[perm[n_test:]]

    perm2 = substream(seed, STREAM_VALIDATION).permutation(len(rest))
    validation = rest[perm2[:n_val]]
    train = rest[perm2[n_val:]]

    return SplitBundle(
        graph=g,
        train=train,
        validation=validation,
        test=test,
        rho=float(rho),
        seed=int(seed),
    )


def training_graph(g: Graph, kept: np.ndarray) -> Graph:
    """Graph over the same node set containing only the ``kept`` edges.

    Node count and labels are preserved; nodes whose edges were all removed
    stay in place with degree 0.
    """
    kept = np.asarray(kept, dtype=np.int64).reshape(-1, 2)
    if kept.size:
        lo = np.minimum(kept[:, 0], kept[:, 1])
        hi = np.maximum(kept[:, 0], kept[:, 1])
        keys = lo * g.n + hi
        pos = np.searchsorted(g.edge_keys(), keys)
        pos = np.clip(pos, 0, len(g.edge_keys()) - 1)
        if not np.all(g.edge_keys()[pos] == keys):
            raise ValueError("kept edges must be a subset of the graph's edges")
    return Graph(g.n, kept, g.labels)


def sample_nonexistent_pairs(g: Graph, count: int, seed: int) -> np.ndarray:
    """Uniform seeded sample of ``count`` node pairs absent from the graph.

    Pairs are drawn without replacement from the non-edges of the full edge
    set, never from a reduced training graph: held-out edges are positives,
    not negatives.

    Raises
    ------
    SamplingError
        If fewer than ``count`` non-edges exist.
    """
    if count < 1:
        raise ValueError("count must be positive")
    total_pairs = g.n * (g.n - 1) // 2
    total_non = total_pairs - g.m
    if count > total_non:
        raise SamplingError(
            f"requested {count} non-edges but only {total_non} exist"
        )

    rng = substream(seed, STREAM_NEGATIVES)
    if 4 * count >= total_non:
        return _sample_by_enumeration(g, count, rng)
    return _sample_by_rejection(g, count, rng)


def _sample_by_enumeration(g: Graph, count: int, rng: np.random.Generator) -> np.ndarray:
    chunks = []
    for u in range(g.n):
        candidates = np.arange(u + 1, g.n, dtype=np.int64)
        nb = g.neighbors(u)
        non = np.setdiff1d(candidates, nb, assume_unique=True)
        if non.size:
            chunks.append(np.column_stack((np.full(non.size, u, dtype=np.int64), non)))
    all_non = np.concatenate(chunks)
    pick = rng.choice(len(all_non), size=count, replace=False)
    return all_non[np.sort(pick)]

def _sample_by_rejection(g: Graph, count: int, rng: np.random.Generator) -> np.ndarray:
    edge_keys = g.edge_keys()
    taken: list[np.ndarray] = []
    taken_keys = np.empty(0, dtype=np.int64)
    need = count
    while need > 0:
        draw = max(2048, 2 * need)
        u = rng.integers(0, g.n, size=draw)
        v = rng.integers(0, g.n, size=draw)
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        ok = lo != hi
        lo, hi = lo[ok], hi[ok]
        keys = lo * g.n + hi
        # drop existing edges
        pos = np.searchsorted(edge_keys, keys)
        pos = np.clip(pos, 0, len(edge_keys) - 1)
        ok = edge_keys[pos] != keys
        keys, lo, hi = keys[ok], lo[ok], hi[ok]
        # drop pairs already taken and duplicates within the chunk
        ok = ~np.isin(keys, taken_keys)
        keys, lo, hi = keys[ok], lo[ok], hi[ok]
        _, first = np.unique(keys, return_index=True)
        first = np.sort(first)[:need]
        if first.size:
            taken.append(np.column_stack((lo[first], hi[first])))
            taken_keys = np.concatenate((taken_keys, keys[first]))
            need -= first.size
    return np.concatenate(taken)


def export_split(bundle: SplitBundle, out_dir: str | Path) -> dict:
    """Write train/validation/test edge files plus a JSON manifest.

    Returns the manifest dict. Files use the graph's original node labels so
    they can be re-parsed independently.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = bundle.graph
    for name, edges in (
        ("train", bundle.train),
        ("validation", bundle.validation),
        ("test", bundle.test),
    ):
        (out / f"{name}.txt").write_text(format_edge_list(g, edges))
    manifest = {
        "rho": bundle.rho,
        "seed": bundle.seed,
        "nodes": g.n,
        "edges": g.m,
        "sizes": bundle.sizes,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
