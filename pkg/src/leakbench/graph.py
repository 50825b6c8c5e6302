"""Undirected simple graph container and edge-list ingestion.

Graphs are canonical: dense integer node ids, sorted compressed neighbor
lists, no self-loops, no duplicate edges. Original node identifiers from the
source file are kept as labels. All array attributes are read-only; a Graph
never changes after construction and can be shared freely across workers.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EdgeListParseError

__all__ = [
    "Graph",
    "GraphStats",
    "parse_edge_list",
    "stats",
    "common_neighbors",
    "format_edge_list",
]

logger = logging.getLogger("leakbench")

COMMENT_PREFIXES = ("#", "%")


class Graph:
    """Immutable undirected simple graph with CSR adjacency.

    Parameters
    ----------
    n : int
        Number of nodes. Node ids are 0..n-1; isolated nodes are allowed.
    edges : array-like of shape (m, 2)
        Distinct undirected edges as node-id pairs, any orientation.
    labels : sequence of str, optional
        Original identifier per node id. Defaults to the decimal ids.
    """

    __slots__ = (
        "n",
        "m",
        "indptr",
        "indices",
        "degrees",
        "labels",
        "edge_array",
        "dropped_duplicate_edges",
        "dropped_self_loops",
        "_cache",
    )

    def __init__(
        self,
        n: int,
        edges,
        labels: Sequence[str] | None = None,
        dropped_duplicate_edges: int = 0,
        dropped_self_loops: int = 0,
    ):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((hi, lo))
        canon = np.column_stack((lo[order], hi[order]))
        if len(canon) > 1 and np.any(np.all(canon[1:] == canon[:-1], axis=1)):
            raise ValueError("duplicate edges are not allowed")

        self.n = n
        self.m = len(canon)
        self.edge_array = canon

        src = np.concatenate((canon[:, 0], canon[:, 1]))
        dst = np.concatenate((canon[:, 1], canon[:, 0]))
        self.degrees = np.bincount(src, minlength=n)
        self.indptr = np.concatenate(([0], np.cumsum(self.degrees)))
        adj_order = np.lexsort((dst, src))
        self.indices = dst[adj_order]

        if labels is None:
            labels = [str(i) for i in range(n)]
        elif len(labels) != n:
            raise ValueError("labels length must equal node count")
        self.labels = tuple(str(x) for x in labels)

        self.dropped_duplicate_edges = int(dropped_duplicate_edges)
        self.dropped_self_loops = int(dropped_self_loops)
        self._cache = {}

        for arr in (self.edge_array, self.degrees, self.indptr, self.indices):
            arr.flags.writeable = False

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of ``u`` (read-only view)."""
        self.check_node(u)
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        self.check_node(u)
        self.check_node(v)
        row = self.indices[self.indptr[u] : self.indptr[u + 1]]
        pos = np.searchsorted(row, v)
        return pos < len(row) and row[pos] == v

    def check_node(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise ValueError(f"node id {u} out of range [0, {self.n})")

    def edge_keys(self) -> np.ndarray:
        """Sorted scalar keys lo*n+hi for fast edge-membership tests."""
        key = "edge_keys"
        if key not in self._cache:
            keys = self.edge_array[:, 0] * self.n + self.edge_array[:, 1]
            self._cache[key] = np.sort(keys)
        return self._cache[key]

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as a scipy CSR matrix (cached)."""
        if "adjacency" not in self._cache:
            src = np.concatenate((self.edge_array[:, 0], self.edge_array[:, 1]))
            dst = np.concatenate((self.edge_array[:, 1], self.edge_array[:, 0]))
            data = np.ones(len(src), dtype=np.float64)
            mat = sp.csr_matrix((data, (src, dst)), shape=(self.n, self.n))
            self._cache["adjacency"] = mat
        return self._cache["adjacency"]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and bool(np.array_equal(self.edge_array, other.edge_array))
            and self.labels == other.labels
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GraphStats:
    """Structural summary of a graph."""

    n: int
    m: int
    mean_degree: float
    density: float


def parse_edge_list(source: str | bytes | IO | Iterable[str]) -> Graph:
    """Parse an edge-list text into a canonical Graph.

    One edge per line, two whitespace-separated node tokens; lines starting
    with '#' or '%' are comments; extra trailing columns (weights) are
    ignored. Duplicate edges and self-loops are dropped and counted on the
    returned graph. Node labels are mapped to dense ids in first-seen order.

    Raises
    ------
    EdgeListParseError
        On a line with fewer than two tokens, or when no edges remain.
    """
    lines = _as_lines(source)

    ids: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    dropped_dup = 0
    dropped_loops = 0

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise EdgeListParseError(
                f"expected two node tokens, got {len(tokens)}", line_no
            )
        a = ids.setdefault(tokens[0], len(ids))
        b = ids.setdefault(tokens[1], len(ids))
        if a == b:
            dropped_loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            dropped_dup += 1
            continue
        seen.add(key)
        edges.append(key)

    if not edges:
        raise EdgeListParseError("no edges found in input")
    if dropped_dup or dropped_loops:
        logger.warning(
            "dropped %d duplicate edge(s) and %d self-loop(s) while parsing",
            dropped_dup,
            dropped_loops,
        )

    labels = list(ids)
    return Graph(
        len(labels),
        np.array(edges, dtype=np.int64),
        labels,
        dropped_duplicate_edges=dropped_dup,
        dropped_self_loops=dropped_loops,
    )


def _as_lines(source) -> Iterable[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8")).readlines()
    if isinstance(source, str):
        return io.StringIO(source).readlines()
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data).readlines()
    return source


def stats(g: Graph) -> GraphStats:
    """Node/edge counts, mean degree 2M/N, and density 2M/(N(N-1))."""
    mean_degree = 2.0 * g.m / g.n if g.n > 0 else 0.0
    density = 2.0 * g.m / (g.n * (g.n - 1)) if g.n > 1 else 0.0
    return GraphStats(n=g.n, m=g.m, mean_degree=mean_degree, density=density)


def common_neighbors(g: Graph, u: int, v: int) -> int:
    """Number of shared neighbors of ``u`` and ``v``."""
    nu = g.neighbors(u)
    nv = g.neighbors(v)
    return int(np.intersect1d(nu, nv, assume_unique=True).size)


def format_edge_list(g: Graph, edges: np.ndarray | None = None) -> str:
    """Render edges (default: all of ``g``) as label-pair lines."""
    if edges is None:
        edges = g.edge_array
    lines = [f"{g.labels[u]} {g.labels[v]}" for u, v in np.asarray(edges)]
    return "\n".join(lines) + ("\n" if lines else "")
