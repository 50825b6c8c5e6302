"""Shared fixtures: toy graphs and optional real-network corpus discovery."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

import netgen

# Real networks the corpus-level tests can use, with their domain category.
# Files are expected as <corpus dir>/<name>.txt edge lists; see
# scripts/fetch_corpus.py and README for how to obtain them.
CORPUS_NETWORKS = {
    "moreno-highschool": "Soc",
    "arenas-jazz": "Soc",
    "GD06-theory": "Info",
    "email-enron-only": "Info",
    "mammalia-voles-plj-trapping-27": "Ani",
    "aves-weaver-social": "Ani",
    "81-ISCAS89-s1208": "Tech",
    "maayan-pdzbase": "Bio",
    "bio-celegans": "Bio",
    "urban-brasilia": "Trans",
    "euroroad": "Trans",
    "opsahl-powergrid": "Trans",
}


def corpus_dir() -> Path:
    default = Path(__file__).resolve().parent.parent / "data" / "corpus"
    return Path(os.environ.get("LEAKBENCH_CORPUS_DIR", default))


def available_corpus() -> dict[str, Path]:
    base = corpus_dir()
    return {
        name: base / f"{name}.txt"
        for name in CORPUS_NETWORKS
        if (base / f"{name}.txt").is_file()
    }


def require_corpus(minimum: int) -> dict[str, Path]:
    """Return available corpus networks or skip (fail in strict mode)."""
    found = available_corpus()
    if len(found) >= minimum:
        return found
    message = (
        f"needs {minimum} real corpus networks under {corpus_dir()} but found "
        f"{len(found)}; run scripts/fetch_corpus.py on a machine with internet "
        "access (see README) and set LEAKBENCH_CORPUS_DIR if needed"
    )
    if os.environ.get("LEAKBENCH_REQUIRE_CORPUS"):
        pytest.fail(message)
    pytest.skip(message)


@pytest.fixture
def triangle():
    return netgen.complete(3)


@pytest.fixture
def kite():
    # 0-1, 0-2, 1-2, 1-3: a triangle with a tail, used by several examples
    from leakbench import Graph

    return Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3)])
