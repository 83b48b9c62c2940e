#!/usr/bin/env python3
"""Generate a synthetic organization corpus for pipeline experiments.

Developers get individual commit rhythms; a fraction of them receive a
planted long gap (with or without collaboration events inside it), and a
fraction goes silent well before the cutoff so gone-at-cutoff rows appear
downstream. Output: commits.ndjson, events.ndjson, aliases.json.
"""

from __future__ import annotations

import argparse
import json
import random
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

EVENT_TYPES_ACTIVE = ["issue_comment", "pr_comment", "issue_opened", "issue_closed"]
EVENT_TYPES_PASSIVE = ["mentioned", "assigned"]


def iso(day: date, hour: int) -> str:
    return datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc).isoformat()


def generate(out: Path, n_devs: int, n_commits: int, n_events: int, seed: int) -> None:
    rng = random.Random(seed)
    start = date(2017, 1, 1)
    cutoff = date(2021, 1, 1)
    span = (cutoff - start).days
    repos = [f"org/repo{i}" for i in range(max(2, n_devs // 10))]

    commits = []
    events = []
    commits_per_dev = max(2, n_commits // n_devs)
    events_per_dev = max(1, n_events // n_devs)
    sha = 0

    for i in range(n_devs):
        dev = f"dev{i:03d}@example.org"
        rhythm = rng.randint(2, 14)
        day = start + timedelta(days=rng.randint(0, 60))
        planted_gap = rng.random() < 0.5
        gap_at = rng.randint(commits_per_dev // 3, 2 * commits_per_dev // 3)
        early_quit = rng.random() < 0.15

        dev_days: list[date] = []
        for k in range(commits_per_dev):
            if day >= cutoff:
                break
            dev_days.append(day)
            step = max(1, round(rng.gauss(rhythm, rhythm / 3)))
            if planted_gap and k == gap_at:
                step = rng.randint(120, 500)
            day = day + timedelta(days=step)
            if early_quit and (cutoff - day).days < 450:
                break

        for k, cday in enumerate(dev_days):
            sha += 1
            n_files = rng.randint(1, 4)
            files = [f"src/{dev[:6]}/f{rng.randint(0, 40)}.c" for _ in range(n_files)]
            if rng.random() < 0.1:
                files.append("docs/guide.md")
            commits.append(
                {
                    "repo": rng.choice(repos),
                    "sha": f"{sha:040x}",
                    "author": dev,
                    "authored_at": iso(cday, rng.randint(0, 23)),
                    "files": files,
                    "via_pull_request": rng.random() < 0.3,
                }
            )

        if not dev_days:
            continue
        first, last = dev_days[0], dev_days[-1]
        for _ in range(events_per_dev):
            eday = first + timedelta(days=rng.randint(0, max(1, (last - first).days)))
            etype = rng.choice(
                EVENT_TYPES_ACTIVE if rng.random() < 0.8 else EVENT_TYPES_PASSIVE
            )
            events.append(
                {
                    "repo": rng.choice(repos),
                    "actor": dev,
                    "created_at": iso(eday, rng.randint(0, 23)),
                    "type": etype,
                }
            )

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "commits.ndjson", "w", encoding="utf-8") as fh:
        for c in commits:
            fh.write(json.dumps(c, sort_keys=True) + "\n")
    with open(out / "events.ndjson", "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(json.dumps(e, sort_keys=True) + "\n")
    (out / "aliases.json").write_text("{}\n", encoding="utf-8")
    print(f"wrote {len(commits)} commits, {len(events)} events to {out}")
    print(f"suggested cutoff: {cutoff.isoformat()}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--devs", type=int, default=50)
    parser.add_argument("--commits", type=int, default=10_000)
    parser.add_argument("--events", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args()
    generate(args.out, args.devs, args.commits, args.events, args.seed)


if __name__ == "__main__":
    main()
