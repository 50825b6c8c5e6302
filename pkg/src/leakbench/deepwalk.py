"""Desk-scale DeepWalk: truncated random walks plus skip-gram training.

Node sequences from uniform random walks are treated as sentences; a
skip-gram model with negative sampling is fit by per-pair stochastic
gradient descent with a linearly decaying learning rate. The update loop is
a compiled kernel fed with pre-drawn negatives, single-threaded and
bit-deterministic for a fixed seed and configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from numba import njit
from scipy.special import expit

from .graph import Graph
from .indices import PairScores, _finalize
from .seeding import STREAM_SGD, STREAM_WALKS, substream

__all__ = [
    "WalkCorpus",
    "Embeddings",
    "generate_walks",
    "train_skipgram",
    "score_embedding",
    "skipgram_pair_loss",
    "skipgram_pair_gradients",
    "dump_embeddings",
]

# Exponent flattening the unigram noise distribution, as in standard
# skip-gram negative sampling.
NOISE_EXPONENT = 0.75

_MIN_LEARNING_RATE_FRACTION = 1e-4


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Random-walk node sequences over a fixed node universe."""

    walks: list
    n_nodes: int
    walks_per_node: int
    walk_length: int
    seed: int

    def __len__(self) -> int:
        return len(self.walks)


@dataclass(frozen=True, eq=False)
class Embeddings:
    """Input and context vector tables produced by skip-gram training."""

    dim: int
    vectors: np.ndarray
    context_vectors: np.ndarray
    epoch_losses: tuple[float, ...] = ()


def generate_walks(g: Graph, walks_per_node: int, walk_length: int, seed: int) -> WalkCorpus:
    """Seeded uniform-neighbor walks, ``walks_per_node`` from each node.

    Walk starts are limited to non-isolated nodes (a walk from a degree-0
    node would stop immediately); start order is reshuffled every pass.
    """
    if walks_per_node < 1 or walk_length < 1:
        raise ValueError("walks_per_node and walk_length must be >= 1")
    rng = substream(seed, STREAM_WALKS)
    starts = np.flatnonzero(g.degrees > 0).astype(np.int64)
    walks: list[np.ndarray] = []
    for _ in range(walks_per_node):
        order = rng.permutation(starts)
        if order.size == 0:
            continue
        steps = np.empty((order.size, walk_length), dtype=np.int64)
        steps[:, 0] = order
        cur = order
        for pos in range(1, walk_length):
            offsets = rng.integers(0, g.degrees[cur])
            cur = g.indices[g.indptr[cur] + offsets]
            steps[:, pos] = cur
        walks.extend(steps)
    return WalkCorpus(
        walks=walks,
        n_nodes=g.n,
        walks_per_node=walks_per_node,
        walk_length=walk_length,
        seed=int(seed),
    )


# ----------------------------------------------------------------------
# Skip-gram objective
# ----------------------------------------------------------------------


def skipgram_pair_loss(center: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """Negative-sampling loss of one (center, context) pair.

    loss = -log sigma(x.y) - sum_k log sigma(-x.n_k), written with
    logaddexp for stability.
    """
    pos = np.logaddexp(0.0, -float(center @ context))
    neg = np.logaddexp(0.0, negatives @ center).sum()
    return float(pos + neg)


def skipgram_pair_gradients(center: np.ndarray, context: np.ndarray, negatives: np.ndarray):
    """Gradients of the pair loss w.r.t. center, context, and negatives."""
    s_pos = expit(float(center @ context))
    s_neg = expit(negatives @ center)
    g_center = (s_pos - 1.0) * context + s_neg @ negatives
    g_context = (s_pos - 1.0) * center
    g_negatives = s_neg[:, None] * center[None, :]
    return g_center, g_context, g_negatives


def train_skipgram(
    corpus: WalkCorpus,
    dim: int,
    window: int = 5,
    negatives: int = 5,
    epochs: int = 5,
    learning_rate: float = 0.025,
    seed: int = 0,
) -> Embeddings:
    """Fit skip-gram embeddings on a walk corpus.

    Pairs are every (center, context) combination within ``window`` of each
    other inside a walk, visited in corpus order with one gradient step per
    pair; negatives come from the corpus unigram distribution raised to
    0.75, and the learning rate decays linearly over the total update count.
    ``epochs=0`` returns the untouched initialization.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if window < 1 or negatives < 1:
        raise ValueError("window and negatives must be >= 1")
    if not corpus.walks:
        raise ValueError("cannot train on an empty walk corpus")

    n = corpus.n_nodes
    rng = substream(seed, STREAM_SGD)
    vectors = (rng.random((n, dim)) - 0.5) / dim
    context_vectors = np.zeros((n, dim))

    tokens = np.concatenate(corpus.walks)
    counts = np.bincount(tokens, minlength=n).astype(np.float64)
    noise = counts**NOISE_EXPONENT
    noise_cdf = np.cumsum(noise / noise.sum())

    pairs_per_epoch = sum(
        2 * max(len(w) - off, 0) for w in corpus.walks for off in range(1, window + 1)
    )
    if pairs_per_epoch == 0 or epochs == 0:
        return Embeddings(dim=dim, vectors=vectors, context_vectors=context_vectors)
    total_updates = pairs_per_epoch * epochs

    done = 0
    epoch_losses = []
    for _ in range(epochs):
        epoch_loss = 0.0
        for centers, contexts in _pair_blocks(corpus.walks, window):
            neg = np.searchsorted(noise_cdf, rng.random((len(centers), negatives)))
            epoch_loss += _sgd_block(
                vectors,
                context_vectors,
                centers,
                contexts,
                neg,
                learning_rate,
                _MIN_LEARNING_RATE_FRACTION,
                done,
                total_updates,
            )
            done += len(centers)
        epoch_losses.append(epoch_loss / pairs_per_epoch)

    return Embeddings(
        dim=dim,
        vectors=vectors,
        context_vectors=context_vectors,
        epoch_losses=tuple(epoch_losses),
    )


def _pair_blocks(walks, window, walks_per_block: int = 1024):
    """Yield (center, context) id arrays for blocks of walks, in order."""
    for lo in range(0, len(walks), walks_per_block):
        chunk = walks[lo : lo + walks_per_block]
        cs, xs = [], []
        for walk in chunk:
            for off in range(1, window + 1):
                if len(walk) <= off:
                    continue
                left = walk[:-off]
                right = walk[off:]
                cs.append(left)
                xs.append(right)
                cs.append(right)
                xs.append(left)
        if cs:
            yield np.concatenate(cs), np.concatenate(xs)


@njit(cache=True)
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _softplus(x):
    # log(1 + e^x) without overflow
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True)
def _sgd_block(vectors, context_vectors, centers, contexts, negatives,
               lr0, min_lr_fraction, done, total_updates):
    """Sequential per-pair updates; returns the summed pre-update loss."""
    d = vectors.shape[1]
    k = negatives.shape[1]
    grad_center = np.empty(d)
    loss = 0.0
    for i in range(len(centers)):
        frac = 1.0 - (done + i) / total_updates
        if frac < min_lr_fraction:
            frac = min_lr_fraction
        lr = lr0 * frac
        c = centers[i]
        t = contexts[i]
        for j in range(d):
            grad_center[j] = 0.0

        dot = 0.0
        for j in range(d):
            dot += vectors[c, j] * context_vectors[t, j]
        loss += _softplus(-dot)
        g = _sigmoid(dot) - 1.0
        for j in range(d):
            grad_center[j] += g * context_vectors[t, j]
            context_vectors[t, j] -= lr * g * vectors[c, j]

        for kk in range(k):
            nn = negatives[i, kk]
            dot = 0.0
            for j in range(d):
                dot += vectors[c, j] * context_vectors[nn, j]
            loss += _softplus(dot)
            g = _sigmoid(dot)
            for j in range(d):
                grad_center[j] += g * context_vectors[nn, j]
                context_vectors[nn, j] -= lr * g * vectors[c, j]

        for j in range(d):
            vectors[c, j] -= lr * grad_center[j]
    return loss


# ----------------------------------------------------------------------
# Scoring and export
# ----------------------------------------------------------------------


def score_embedding(emb: Embeddings, pairs, metric: str = "dot") -> PairScores:
    """Pair scores from input-vector similarity (dot by default)."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= len(emb.vectors)):
        raise ValueError("pair endpoint out of range")
    a = emb.vectors[pairs[:, 0]]
    b = emb.vectors[pairs[:, 1]]
    scores = np.einsum("bd,bd->b", a, b)
    if metric == "cosine":
        norms = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        scores = np.where(norms > 0, scores / np.where(norms > 0, norms, 1.0), 0.0)
    elif metric != "dot":
        raise ValueError(f"unknown similarity metric: {metric}")
    return _finalize("deepwalk", float(emb.dim), pairs, scores)


def dump_embeddings(emb: Embeddings, labels: Sequence[str], fh: IO[str]) -> None:
    """Write "N d" then one "label v1 ... vd" line per node."""
    n = len(emb.vectors)
    fh.write(f"{n} {emb.dim}\n")
    for i in range(n):
        coords = " ".join(f"{x:.8g}" for x in emb.vectors[i])
        fh.write(f"{labels[i]} {coords}\n")
