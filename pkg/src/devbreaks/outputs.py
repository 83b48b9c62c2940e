"""CSV/JSON artifact writers. Output is byte-deterministic: rows are fully
ordered, floats use repr (shortest round-trip), and line endings are \\n."""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .analytics import (
    DurationStats,
    OrgBreakFrequency,
    PairedTestResult,
    STATES,
    TransitionMatrix,
)
from .coredevs import CoreDevSet
from .lifecycle import LifecycleTrace
from .rhythm import DetectedBreak
from .stats import OddsRatioResult


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def frac_str(value: Fraction | None) -> str | None:
    if value is None:
        return None
    return f"{value.numerator}/{value.denominator}"


def parse_frac(text: str | None) -> Fraction | None:
    if text is None or text == "":
        return None
    return Fraction(text)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def write_core_table(path: Path, rows: Sequence[dict]) -> None:
    """Per-project core-developer table: developer count, truck factor set
    size, commit-based core size, and their overlap."""
    write_csv(
        path,
        ["project", "devs", "tf", "core", "pct_tf_in_core"],
        [
            [r["project"], r["devs"], r["tf"], r["core"], r["pct_tf_in_core"]]
            for r in rows
        ],
    )


def write_core_sets(path: Path, sets: Sequence[CoreDevSet]) -> None:
    write_json(
        path,
        [
            {
                "project": s.project_id,
                "method": s.method,
                "members": list(s.members),
                "coverage": frac_str(s.coverage),
            }
            for s in sorted(sets, key=lambda s: (s.project_id, s.method))
        ],
    )


def write_breaks(path: Path, breaks_by_dev: Mapping[str, Sequence[DetectedBreak]]) -> None:
    rows = []
    for dev in sorted(breaks_by_dev):
        for brk in breaks_by_dev[dev]:
            rows.append(
                [
                    dev,
                    brk.start.isoformat(),
                    brk.end.isoformat(),
                    brk.length_days,
                    brk.threshold,
                    brk.window.start.isoformat(),
                ]
            )
    write_csv(
        path,
        ["developer", "start", "end", "length", "threshold", "window_start"],
        rows,
    )


def write_segments(path: Path, traces: Sequence[LifecycleTrace]) -> None:
    rows = []
    for trace in sorted(traces, key=lambda t: t.developer_key):
        for seg in trace.segments:
            rows.append(
                [
                    trace.developer_key,
                    seg.state.value,
                    seg.start.isoformat(),
                    seg.end.isoformat(),
                    seg.ongoing,
                ]
            )
    write_csv(path, ["developer", "state", "start", "end", "ongoing"], rows)


def write_transitions(path: Path, traces: Sequence[LifecycleTrace]) -> None:
    rows = []
    for trace in sorted(traces, key=lambda t: t.developer_key):
        for tr in trace.transitions:
            rows.append(
                [
                    trace.developer_key,
                    tr.name,
                    tr.from_state.value,
                    tr.to_state.value,
                    tr.at.isoformat(),
                ]
            )
    write_csv(path, ["developer", "name", "from", "to", "at"], rows)


def traces_to_json(traces: Sequence[LifecycleTrace]) -> list[dict]:
    return [
        {
            "developer": t.developer_key,
            "org": t.org_id,
            "first_commit_day": t.first_commit_day.isoformat(),
            "last_commit_day": t.last_commit_day.isoformat(),
            "active_pause_count": t.active_pause_count,
            "segments": [
                {
                    "state": s.state.value,
                    "start": s.start.isoformat(),
                    "end": s.end.isoformat(),
                    "ongoing": s.ongoing,
                }
                for s in t.segments
            ],
        }
        for t in sorted(traces, key=lambda t: t.developer_key)
    ]


def write_frequency(path: Path, rows: Sequence[OrgBreakFrequency]) -> None:
    write_csv(
        path,
        [
            "org",
            "developers",
            "noncoding_devs",
            "noncoding_share",
            "inactive_devs",
            "inactive_share",
            "gone_devs",
            "gone_share",
            "gone_at_cutoff_devs",
            "noncoding_per_year_mean",
            "inactive_per_year_mean",
            "gone_per_year_mean",
        ],
        [
            [
                r.org,
                r.n_devs,
                r.noncoding_devs,
                r.noncoding_share,
                r.inactive_devs,
                r.inactive_share,
                r.gone_devs,
                r.gone_share,
                r.gone_at_cutoff_devs,
                r.noncoding_per_year_mean,
                r.inactive_per_year_mean,
                r.gone_per_year_mean,
            ]
            for r in rows
        ],
    )


def write_durations(path: Path, rows: Sequence[DurationStats]) -> None:
    # sd is the population standard deviation
    write_csv(
        path,
        ["org", "state", "n", "mean_days", "median_days", "sd_days"],
        [
            [r.org, r.state.value, r.n, r.mean_days, r.median_days, r.sd_days]
            for r in rows
        ],
    )


def write_paired_tests(path: Path, rows: Sequence[PairedTestResult]) -> None:
    write_csv(
        path,
        [
            "org",
            "n_pairs",
            "n_effective",
            "w_plus",
            "p_raw",
            "p_adjusted",
            "cliffs_delta",
            "magnitude",
            "applicable",
        ],
        [
            [
                r.org,
                r.n_pairs,
                r.n_effective,
                r.w_statistic,
                r.p_raw,
                r.p_adjusted,
                r.cliffs_delta,
                r.magnitude,
                r.applicable,
            ]
            for r in rows
        ],
    )


def write_odds_ratio(path: Path, result: OddsRatioResult) -> None:
    write_csv(
        path,
        ["n", "odds_ratio", "ci_low", "ci_high", "significant", "corrected", "intercept_or"],
        [
            [
                result.n,
                result.or_value,
                result.ci_low,
                result.ci_high,
                result.significant,
                result.corrected,
                result.intercept_or,
            ]
        ],
    )


def write_matrix_edges(path: Path, matrix: TransitionMatrix) -> None:
    """Plot-ready edge list: one row per (from, to) with its probability."""
    rows = []
    for i, src in enumerate(STATES):
        for j, dst in enumerate(STATES):
            rows.append([src.value, dst.value, matrix.probs[i][j]])
    write_csv(path, ["from", "to", "probability"], rows)


def write_sensitivity(path: Path, rows: Sequence[dict]) -> None:
    write_csv(
        path,
        [
            "window_months",
            "breaks_total",
            "over_window_pauses",
            "devs_history_shorter_than_window",
        ],
        [
            [
                r["window_months"],
                r["breaks_total"],
                r["over_window_pauses"],
                r["devs_history_shorter_than_window"],
            ]
            for r in rows
        ],
    )
