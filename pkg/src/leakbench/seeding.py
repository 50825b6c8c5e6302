"""Deterministic sub-stream derivation.

One integer seed drives one experiment run. Every random decision inside a
run (edge shuffle, validation draw, negative sampling, per-grid-point model
training, sampled AUC) pulls from its own fixed, named sub-stream of that
seed, so any result is reproducible from (inputs, seed) alone and the
streams never alias each other.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "derive_seed"]

# Stream labels. Values are part of the reproducibility contract: changing
# them changes every seeded output.
STREAM_SHUFFLE = 0
STREAM_VALIDATION = 1
STREAM_NEGATIVES = 2
STREAM_TRAINING = 3
STREAM_AUC = 4
STREAM_WALKS = 5
STREAM_SGD = 6

_MASK64 = (1 << 64) - 1


def substream(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Generator for the (stream, index) sub-stream of ``seed``."""
    entropy = [int(seed) & _MASK64, int(stream), int(index)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, stream: int, index: int = 0) -> int:
    """Integer seed for the (stream, index) sub-stream of ``seed``.

    Used when a sub-computation takes a plain integer seed of its own.
    """
    entropy = [int(seed) & _MASK64, int(stream), int(index)]
    state = np.random.SeedSequence(entropy).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
