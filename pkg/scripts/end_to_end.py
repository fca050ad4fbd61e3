"""Run the whole pipeline on a synthetic corpus.

    python3 scripts/end_to_end.py --work /tmp/e2e --seed 7

Every stage goes through the CLI, so this doubles as a smoke test of the
command surface. Prints the wall time of each stage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from chatcorpus.cli import main

RUNS = [
    {"classifier": "knn", "params": {"k": 3}},
    {"classifier": "tree", "params": {"max_depth": 12}},
    {"classifier": "logistic", "params": {"C": 10.0}},
]


def stages(work: Path, seed: int) -> list[tuple[str, list[str]]]:
    synth = work / "synth"
    ing = work / "ingest"
    mis = work / "misinfo"
    raw = [str(synth / "raw" / "server_A.jsonl"), str(synth / "raw" / "server_B.jsonl")]
    return [
        ("synth", ["synth", "--out", str(synth), "--seed", str(seed)]),
        ("ingest", ["ingest", "--input", *raw, "--out", str(ing), "--no-header"]),
        ("metrics", ["metrics", "--input", str(ing), "--out", str(work / "metrics")]),
        ("graph", ["graph", "--input", str(ing), "--out", str(work / "graph"), "--no-header"]),
        ("cascades", ["cascades", "--input", str(ing), "--out", str(work / "cascades"), "--no-header"]),
        ("misinfo score", ["misinfo", "score", "--input", str(ing), "--labeled",
                           str(synth / "labeled_corpus.jsonl"), "--out", str(mis)]),
        ("misinfo merge", ["misinfo", "merge", "--input", str(ing), "--labeled",
                           str(synth / "labeled_corpus.jsonl"), "--candidates", str(mis / "candidates.csv"),
                           "--truth", str(synth / "planted_labels.csv"), "--out", str(mis)]),
        ("misinfo prevalence", ["misinfo", "prevalence", "--input", str(ing), "--labels",
                                str(mis / "labeled_messages.csv"), "--out", str(mis)]),
        ("classify", ["classify", "--input", str(ing), "--labels", str(mis / "labeled_messages.csv"),
                      "--run", str(work / "runs.json"), "--out", str(work / "classify")]),
        ("trends", ["trends", "--input", str(ing), "--out", str(work / "trends"), "--no-header",
                    "--period-a", "2020-03-01:2020-03-10", "--period-b", "2020-03-20:2020-03-30"]),
    ]


def run(work: Path, seed: int = 7, quiet: bool = False) -> dict[str, float]:
    work.mkdir(parents=True, exist_ok=True)
    (work / "runs.json").write_text(json.dumps(RUNS, indent=1) + "\n", encoding="utf-8")
    timings = {}
    for name, argv in stages(work, seed):
        t = time.perf_counter()
        code = main(argv)
        timings[name] = time.perf_counter() - t
        if code != 0:
            raise SystemExit(f"stage {name} failed with exit code {code}")
        if not quiet:
            print(f"  {name:<20s} {timings[name]:6.2f} s", file=sys.stderr)
    return timings


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--work", required=True)
    ap.add_argument("--seed", type=int, default=7)
    a = ap.parse_args()
    t = run(Path(a.work), a.seed)
    print(f"total {sum(t.values()):.2f} s", file=sys.stderr)
