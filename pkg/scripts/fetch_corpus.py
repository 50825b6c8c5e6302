#!/usr/bin/env python3
"""Fetch the real-network corpus used by the corpus-level tests.

Downloads edge lists from public mirrors (KONECT tarballs, Network
Repository zips), canonicalizes them through the package parser (binarized,
deduplicated, undirected), checks node/edge counts against the expected
values, and writes <out>/<name>.txt plus a ready-to-run datasets.json.

Needs internet access. Mirror URLs rot; entries that fail are reported and
skipped, and you can always drop any whitespace edge list into the corpus
directory by hand under the right file name.

Usage:
    python scripts/fetch_corpus.py [--out data/corpus] [--only name1,name2]
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import tarfile
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from leakbench import parse_edge_list, stats  # noqa: E402
from leakbench.graph import format_edge_list  # noqa: E402

# name -> (category, expected nodes, expected edges, url)
CORPUS = {
    "moreno-highschool": (
        "Soc", 70, 274,
        "http://konect.cc/files/download.tsv.moreno_highschool.tar.bz2",
    ),
    "arenas-jazz": (
        "Soc", 198, 2742,
        "http://konect.cc/files/download.tsv.arenas-jazz.tar.bz2",
    ),
    "email-enron-only": (
        "Info", 143, 623,
        "https://nrvis.com/download/data/ia/ia-enron-only.zip",
    ),
    "GD06-theory": (
        "Info", 101, 190,
        "https://nrvis.com/download/data/misc/GD06-theory.zip",
    ),
    "mammalia-voles-plj-trapping-27": (
        "Ani", 125, 229,
        "https://nrvis.com/download/data/dynamic/mammalia-voles-plj-trapping-27.zip",
    ),
    "aves-weaver-social": (
        "Ani", 445, 1332,
        "https://nrvis.com/download/data/asn/aves-weaver-social.zip",
    ),
    "maayan-pdzbase": (
        "Bio", 212, 242,
        "http://konect.cc/files/download.tsv.maayan-pdzbase.tar.bz2",
    ),
    "bio-celegans": (
        "Bio", 453, 2025,
        "https://nrvis.com/download/data/bio/bio-celegans.zip",
    ),
    "euroroad": (
        "Trans", 1174, 1417,
        "http://konect.cc/files/download.tsv.subelj_euroroad.tar.bz2",
    ),
    "opsahl-powergrid": (
        "Trans", 4941, 6594,
        "http://konect.cc/files/download.tsv.opsahl-powergrid.tar.bz2",
    ),
    # No stable public mirror known for these Table-style corpus entries;
    # place <name>.txt files manually if you have them.
    "81-ISCAS89-s1208": ("Tech", 131, 190, None),
    "urban-brasilia": ("Trans", 179, 230, None),
}


def extract_edge_text(payload: bytes, url: str) -> str:
    """Pull the edge-list text out of a downloaded archive (or raw file)."""
    if url.endswith((".tar.bz2", ".tar.gz")):
        with tarfile.open(fileobj=io.BytesIO(payload)) as tar:
            names = [n for n in tar.getnames() if "/out." in n or n.startswith("out.")]
            if not names:
                raise ValueError("no out.* member in KONECT archive")
            return tar.extractfile(names[0]).read().decode("utf-8", "replace")
    if url.endswith(".zip"):
        with zipfile.ZipFile(io.BytesIO(payload)) as zf:
            names = [n for n in zf.namelist()
                     if n.endswith((".mtx", ".edges", ".txt")) and not n.endswith("readme.txt")]
            if not names:
                raise ValueError("no edge-list member in zip archive")
            return zf.read(names[0]).decode("utf-8", "replace")
    return payload.decode("utf-8", "replace")


def canonicalize(name: str, text: str, expected_n: int, expected_m: int) -> str:
    """Parse, binarize, and sanity-check a raw edge-list text."""
    graph = parse_edge_list(text)
    s = stats(graph)
    if (s.n, s.m) != (expected_n, expected_m):
        print(
            f"  warning: {name} parsed to N={s.n} M={s.m}, expected "
            f"N={expected_n} M={expected_m}; keeping the file, but the "
            "corpus tests may not treat it as this network",
        )
    return format_edge_list(graph)


def fetch(name: str, out_dir: Path) -> bool:
    category, n, m, url = CORPUS[name]
    target = out_dir / f"{name}.txt"
    if target.exists():
        print(f"  {name}: already present")
        return True
    if url is None:
        print(f"  {name}: no known mirror; place {target} manually")
        return False
    try:
        print(f"  {name}: downloading {url}")
        with urllib.request.urlopen(url, timeout=60) as response:
            payload = response.read()
        text = extract_edge_text(payload, url)
        target.write_text(canonicalize(name, text, n, m))
        print(f"  {name}: wrote {target}")
        return True
    except Exception as exc:
        print(f"  {name}: failed ({type(exc).__name__}: {exc})")
        return False


def write_datasets_config(out_dir: Path) -> None:
    datasets = [
        {"path": f"{name}.txt", "name": name, "category": CORPUS[name][0]}
        for name in CORPUS
        if (out_dir / f"{name}.txt").exists()
    ]
    config = {
        "datasets": datasets,
        "predictors": [{"name": p} for p in
                       ("katz", "lhn2", "lp", "lrw", "srw", "rwr", "tscn", "tsaa", "deepwalk")],
        "rhos": [0.1, 0.2, 0.3, 0.4, 0.5],
        "seeds": 10,
        "output_dir": "corpus-report",
    }
    (out_dir / "datasets.json").write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {out_dir / 'datasets.json'} ({len(datasets)} datasets)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/corpus")
    parser.add_argument("--only", help="comma-separated subset of corpus names")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = args.only.split(",") if args.only else list(CORPUS)
    unknown = set(names) - set(CORPUS)
    if unknown:
        parser.error(f"unknown corpus names: {sorted(unknown)}")
    fetched = sum(fetch(name, out_dir) for name in names)
    write_datasets_config(out_dir)
    print(f"{fetched}/{len(names)} networks available under {out_dir}")
    return 0 if fetched else 1


if __name__ == "__main__":
    raise SystemExit(main())
