#!/usr/bin/env python3
"""Generate a small synthetic corpus and run every pipeline stage on it.

Usage: python scripts/run_pipeline_demo.py [--workdir DIR]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from make_synthetic_corpus import generate  # noqa: E402

from devbreaks.cli import main as devbreaks  # noqa: E402


def run(workdir: Path) -> None:
    corpus = workdir / "corpus"
    generate(corpus, n_devs=20, n_commits=2000, n_events=4000, seed=11)

    stages = [
        ["ingest", "--org", "demo-org", "--cutoff", "2021-01-01",
         "--commits", str(corpus / "commits.ndjson"),
         "--events", str(corpus / "events.ndjson"),
         "--aliases", str(corpus / "aliases.json"),
         "--out", str(workdir / "ingest")],
        ["core", "--cache", str(workdir / "ingest" / "cache"),
         "--core-method", "cbh", "--out", str(workdir / "core")],
        ["breaks", "--cache", str(workdir / "ingest" / "cache"),
         "--window-months", "3", "--shift-days", "7",
         "--out", str(workdir / "breaks")],
        ["lifecycle", "--cache", str(workdir / "ingest" / "cache"),
         "--breaks", str(workdir / "breaks"), "--gone-days", "365",
         "--out", str(workdir / "lifecycle")],
        ["report", "--cache", str(workdir / "ingest" / "cache"),
         "--traces", str(workdir / "lifecycle"),
         "--out", str(workdir / "report")],
        ["sensitivity", "--cache", str(workdir / "ingest" / "cache"),
         "--out", str(workdir / "sensitivity")],
    ]
    for argv in stages:
        print(f"$ devbreaks {' '.join(argv)}")
        code = devbreaks(argv)
        if code != 0:
            sys.exit(code)

    print("\noutputs:")
    for stage in ("core", "breaks", "lifecycle", "report", "sensitivity"):
        for artifact in sorted((workdir / stage).glob("*.csv")):
            lines = artifact.read_text(encoding="utf-8").count("\n") - 1
            print(f"  {artifact} ({lines} rows)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("demo_run"))
    args = parser.parse_args()
    args.workdir.mkdir(parents=True, exist_ok=True)
    run(args.workdir)


if __name__ == "__main__":
    main()
