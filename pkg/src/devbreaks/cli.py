"""Command-line pipeline: ingest -> core -> breaks -> lifecycle -> report.

Every subcommand reads the previous stage's artifacts from disk and writes
its own next to a ``run_config.json`` with the fully resolved settings, so
any stage can be rerun standalone and identical inputs produce
byte-identical outputs.

Exit codes: 0 success, 2 input or format failure, 3 internal consistency
violation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from datetime import date
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analytics import (
    assign_contribution_levels,
    break_durations,
    break_frequency,
    gone_odds_ratio,
    paired_duration_samples,
    transition_matrices_by_org,
    wilcoxon_holm_cliffs,
)
from .cache import cache_load, cache_store, load_commits, load_manifest
from .coredevs import commit_based_core, truck_factor
from .dates import parse_utc
from .errors import CacheError, ConsistencyError, IngestError
from .ingest import (
    DEFAULT_DOC_PATTERNS,
    build_timeline,
    load_doc_patterns,
    load_identity_map,
    parse_commit_log,
    parse_events,
)
from .lifecycle import (
    LifecycleConfig,
    LifecycleTrace,
    State,
    StateSegment,
    build_trace,
    derive_transitions,
)
from .model import IdentityMap
from .outputs import (
    frac_str,
    parse_frac,
    traces_to_json,
    write_breaks,
    write_core_sets,
    write_core_table,
    write_csv,
    write_durations,
    write_frequency,
    write_json,
    write_matrix_edges,
    write_odds_ratio,
    write_paired_tests,
    write_segments,
    write_sensitivity,
    write_transitions,
)
from .rhythm import (
    DetectedBreak,
    DetectorConfig,
    Pause,
    Window,
    history_shorter_than_window,
    over_window_pause_count,
    sweep,
)

SWEEP_META = "sweep_meta.json"
TRACES_JSON = "traces.json"


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_config(out: Path, command: str, args: argparse.Namespace) -> None:
    resolved = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func",)
    }
    write_json(
        out / "run_config.json",
        {"tool": "devbreaks", "version": __version__, "command": command, **resolved},
    )


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


# ---------------------------------------------------------------- ingest


def cmd_ingest(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    cutoff = parse_utc(args.cutoff)
    doc_patterns = (
        load_doc_patterns(args.doc_patterns)
        if args.doc_patterns
        else DEFAULT_DOC_PATTERNS
    )
    ids = load_identity_map(args.aliases) if args.aliases else IdentityMap()

    commits = []
    malformed_commits = 0
    for entry in args.commits:
        repo_id = None
        path = entry
        if "=" in entry and args.commit_format == "git_log":
            repo_id, path = entry.split("=", 1)
        elif args.commit_format == "git_log":
            raise IngestError(
                f"git_log input must be given as REPO=PATH, got {entry!r}"
            )
        try:
            with open(path, encoding="utf-8") as fh:
                parsed = parse_commit_log(
                    fh, args.commit_format, repo_id=repo_id, doc_patterns=doc_patterns
                )
        except OSError as exc:
            raise IngestError(f"cannot read commit log {path}: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise IngestError(f"commit log {path} is not UTF-8: {exc}") from exc
        commits.extend(parsed.records)
        malformed_commits += parsed.malformed

    events = []
    malformed_events = 0
    unknown_kinds: dict[str, int] = {}
    for path in args.events:
        try:
            with open(path, encoding="utf-8") as fh:
                parsed = parse_events(fh)
        except OSError as exc:
            raise IngestError(f"cannot read event file {path}: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise IngestError(f"event file {path} is not UTF-8: {exc}") from exc
        events.extend(parsed.events)
        malformed_events += parsed.malformed
        for kind, n in parsed.unknown_kinds.items():
            unknown_kinds[kind] = unknown_kinds.get(kind, 0) + n

    build = build_timeline(commits, events, ids, args.org, cutoff)
    # Persist commits with resolved author keys so later stages agree on
    # developer identity; dedupe the same way build_timeline does.
    resolved_commits = []
    seen: set[tuple[str, str]] = set()
    for c in commits:
        if c.authored_at > cutoff or (c.repo_id, c.sha) in seen:
            continue
        seen.add((c.repo_id, c.sha))
        resolved_commits.append(replace(c, author_key=ids.resolve(c.author_key)))
    cache_store(out / "cache", build.timelines, resolved_commits, args.org, cutoff)
    write_json(
        out / "ingest_report.json",
        {
            "developers": len(build.timelines),
            "commits": len(resolved_commits),
            "events": len(events),
            "malformed_commits": malformed_commits,
            "malformed_events": malformed_events,
            "unknown_event_kinds": dict(sorted(unknown_kinds.items())),
            "unresolved_keys": build.unresolved,
            "dropped_after_cutoff": build.dropped_after_cutoff,
        },
    )
    _write_run_config(out, "ingest", args)
    return 0


# ---------------------------------------------------------------- core


def cmd_core(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    commits = load_commits(args.cache)
    if not commits:
        raise IngestError("cache holds no commits")
    by_project: dict[str, list] = {}
    for c in commits:
        by_project.setdefault(c.repo_id, []).append(c)

    extra = [d for d in (args.tf_extra.split(",") if args.tf_extra else []) if d]
    table_rows = []
    selected_sets = []
    for project in sorted(by_project):
        project_commits = by_project[project]
        cbh = commit_based_core(
            project_commits,
            threshold=Fraction(args.cbh_threshold).limit_denominator(10**6),
            include_doc_only=args.include_doc_commits,
            project_id=project,
        )
        tf = truck_factor(project_commits, extra_members=extra, project_id=project)
        tf_in_core = sum(1 for d in tf.members if d in set(cbh.members))
        table_rows.append(
            {
                "project": project,
                "devs": len({c.author_key for c in project_commits}),
                "tf": len(tf.members),
                "core": len(cbh.members),
                "pct_tf_in_core": (
                    round(100 * tf_in_core / len(tf.members)) if tf.members else 0
                ),
            }
        )
        selected_sets.append(tf if args.method == "tf" else cbh)

    write_core_table(out / "core_table.csv", table_rows)
    write_core_sets(out / "core_sets.json", selected_sets)
    _write_run_config(out, "core", args)
    return 0


# ---------------------------------------------------------------- breaks


def _load_only_filter(path: str | None) -> set[str] | None:
    if path is None:
        return None
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        return {line.strip() for line in text.splitlines() if line.strip()}
    members: set[str] = set()
    if isinstance(payload, list):
        for entry in payload:
            if isinstance(entry, dict):
                members.update(entry.get("members", []))
            elif isinstance(entry, str):
                members.add(entry)
    return members


def cmd_breaks(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    timelines = cache_load(args.cache)
    only = _load_only_filter(args.only)
    cfg = DetectorConfig(window_months=args.window_months, shift_days=args.shift_days)

    breaks_by_dev = {}
    meta_devs = {}
    for dev in sorted(timelines):
        if only is not None and dev not in only:
            continue
        timeline = timelines[dev]
        if len(timeline.commit_days) < 2:
            continue
        result = sweep(timeline, cfg)
        breaks_by_dev[dev] = result.breaks
        meta_devs[dev] = {
            "fallback_threshold": frac_str(result.fallback_threshold),
            "n_windows": result.n_windows,
            "breaks": [
                {
                    "start": b.start.isoformat(),
                    "end": b.end.isoformat(),
                    "threshold": frac_str(b.threshold),
                    "window_start": b.window.start.isoformat(),
                    "window_end": b.window.end.isoformat(),
                }
                for b in result.breaks
            ],
        }

    write_breaks(out / "breaks.csv", breaks_by_dev)
    write_json(
        out / SWEEP_META,
        {
            "window_months": cfg.window_months,
            "shift_days": cfg.shift_days,
            "developers": meta_devs,
        },
    )
    _write_run_config(out, "breaks", args)
    return 0


# ---------------------------------------------------------------- lifecycle


def _load_sweep_meta(path: Path) -> dict:
    meta_path = path / SWEEP_META if path.is_dir() else path
    try:
        return json.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read sweep metadata {meta_path}: {exc}") from exc


def cmd_lifecycle(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    timelines = cache_load(args.cache)
    meta = _load_sweep_meta(Path(args.breaks))
    cfg = LifecycleConfig(gone_after_days=args.gone_days)

    traces = []
    for dev in sorted(meta["developers"]):
        if dev not in timelines:
            raise ConsistencyError(f"breaks refer to unknown developer {dev!r}")
        entry = meta["developers"][dev]
        breaks = [
            DetectedBreak(
                pause=Pause(date.fromisoformat(b["start"]), date.fromisoformat(b["end"])),
                window=Window(
                    date.fromisoformat(b["window_start"]),
                    date.fromisoformat(b["window_end"]),
                ),
                threshold=parse_frac(b["threshold"]),
            )
            for b in entry["breaks"]
        ]
        traces.append(
            build_trace(
                timelines[dev],
                breaks,
                cfg,
                fallback_threshold=parse_frac(entry["fallback_threshold"]),
            )
        )

    write_segments(out / "segments.csv", traces)
    write_transitions(out / "transitions.csv", traces)
    write_json(out / TRACES_JSON, traces_to_json(traces))
    _write_run_config(out, "lifecycle", args)
    return 0


# ---------------------------------------------------------------- report


def _load_traces(path: Path, org_fallback: str) -> list[LifecycleTrace]:
    traces_path = path / TRACES_JSON if path.is_dir() else path
    try:
        payload = json.loads(traces_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read traces {traces_path}: {exc}") from exc
    traces = []
    for obj in payload:
        segments = tuple(
            StateSegment(
                State(s["state"]),
                date.fromisoformat(s["start"]),
                date.fromisoformat(s["end"]),
                bool(s["ongoing"]),
            )
            for s in obj["segments"]
        )
        traces.append(
            LifecycleTrace(
                developer_key=obj["developer"],
                org_id=obj.get("org", org_fallback),
                segments=segments,
                transitions=derive_transitions(segments),
                first_commit_day=date.fromisoformat(obj["first_commit_day"]),
                last_commit_day=date.fromisoformat(obj["last_commit_day"]),
                active_pause_count=int(obj["active_pause_count"]),
            )
        )
    return traces


def _contribution_rows(
    traces: list[LifecycleTrace], cache_dir: str
) -> list[tuple[str, bool]]:
    commits = load_commits(cache_dir)
    totals: dict[str, int] = {}
    per_dev: dict[str, dict[str, int]] = {}
    for c in commits:
        if c.is_doc_only:
            continue
        totals[c.repo_id] = totals.get(c.repo_id, 0) + 1
        per_dev.setdefault(c.author_key, {}).setdefault(c.repo_id, 0)
        per_dev[c.author_key][c.repo_id] += 1

    shares: dict[str, dict[str, Fraction]] = {}
    ever_gone: dict[str, bool] = {}
    for trace in traces:
        dev = trace.developer_key
        repos = per_dev.get(dev)
        if not repos:
            continue
        # A developer's home project is the repo they committed to most.
        project = min(repos, key=lambda r: (-repos[r], r))
        shares.setdefault(project, {})[dev] = Fraction(
            repos[project], totals[project]
        )
        ever_gone[dev] = State.GONE in trace.states_seen()
    levels = assign_contribution_levels(shares)
    return [(levels[dev], ever_gone[dev]) for dev in sorted(levels)]


def cmd_report(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    manifest = load_manifest(args.cache)
    traces = _load_traces(Path(args.traces), manifest.get("org_id", "org"))

    write_frequency(out / "frequency.csv", break_frequency(traces))
    write_durations(out / "durations.csv", break_durations(traces))
    write_paired_tests(
        out / "paired_tests.csv",
        wilcoxon_holm_cliffs(paired_duration_samples(traces)),
    )

    rows = _contribution_rows(traces, args.cache)
    has_both_bins = {level for level, _ in rows} == {"low", "high"}
    if rows and has_both_bins:
        write_odds_ratio(out / "odds_ratio.csv", gone_odds_ratio(rows))
    else:
        write_csv(
            out / "odds_ratio.csv",
            ["n", "odds_ratio", "ci_low", "ci_high", "significant", "corrected", "intercept_or"],
            [],
        )

    for scope, matrix in transition_matrices_by_org(traces, args.self_loop_mode).items():
        write_matrix_edges(out / f"transition_matrix_{_safe_name(scope)}.csv", matrix)
    _write_run_config(out, "report", args)
    return 0


# ---------------------------------------------------------------- sensitivity


def cmd_sensitivity(args: argparse.Namespace) -> int:
    out = _outdir(args.out)
    timelines = cache_load(args.cache)
    sizes = [int(s) for s in args.window_sizes.split(",") if s.strip()]

    rows = []
    for months in sizes:
        cfg = DetectorConfig(window_months=months, shift_days=args.shift_days)
        total_breaks = 0
        over_window = 0
        short_history = 0
        for dev in sorted(timelines):
            timeline = timelines[dev]
            if history_shorter_than_window(timeline, cfg):
                short_history += 1
            if len(timeline.commit_days) < 2:
                continue
            total_breaks += len(sweep(timeline, cfg).breaks)
            over_window += over_window_pause_count(timeline, cfg)
        rows.append(
            {
                "window_months": months,
                "breaks_total": total_breaks,
                "over_window_pauses": over_window,
                "devs_history_shorter_than_window": short_history,
            }
        )
    write_sensitivity(out / "sensitivity.csv", rows)
    _write_run_config(out, "sensitivity", args)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="devbreaks",
        description="Detect developer breaks and lifecycle states from repository histories",
    )
    parser.add_argument("--version", action="version", version=f"devbreaks {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse inputs and build the timeline cache")
    p.add_argument("--org", required=True, help="organization id for all inputs")
    p.add_argument("--cutoff", required=True, help="data-collection cutoff (ISO-8601)")
    p.add_argument(
        "--commits",
        nargs="+",
        required=True,
        metavar="[REPO=]PATH",
        help="commit logs; git_log inputs need a REPO= prefix",
    )
    p.add_argument("--commit-format", choices=["git_log", "ndjson"], default="ndjson")
    p.add_argument("--events", nargs="*", default=[], metavar="PATH")
    p.add_argument("--aliases", help="JSON alias file for identity resolution")
    p.add_argument("--doc-patterns", help="file with one doc glob per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("core", help="select core developers per project")
    p.add_argument("--cache", required=True, help="ingest output: <out>/cache")
    p.add_argument("--core-method", dest="method", choices=["tf", "cbh"], default="cbh")
    p.add_argument("--cbh-threshold", type=float, default=0.8)
    p.add_argument(
        "--include-doc-commits",
        action="store_true",
        help="count doc-only commits in the commit-based heuristic",
    )
    p.add_argument("--tf-extra", help="comma-separated manual truck-factor additions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("breaks", help="detect longer-than-usual pauses")
    p.add_argument("--cache", required=True)
    p.add_argument("--window-months", type=int, default=3)
    p.add_argument("--shift-days", type=int, default=7)
    p.add_argument("--only", help="restrict to developers in this file (core_sets.json or one key per line)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_breaks)

    p = sub.add_parser("lifecycle", help="label breaks and build state traces")
    p.add_argument("--cache", required=True)
    p.add_argument("--breaks", required=True, help="breaks output dir (or sweep_meta.json)")
    p.add_argument("--gone-days", type=int, default=365)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lifecycle)

    p = sub.add_parser("report", help="aggregate traces into tables and matrices")
    p.add_argument("--cache", required=True)
    p.add_argument("--traces", required=True, help="lifecycle output dir (or traces.json)")
    p.add_argument("--self-loop-mode", choices=["pauses", "boundaries"], default="pauses")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sensitivity", help="compare window sizes")
    p.add_argument("--cache", required=True)
    p.add_argument("--window-sizes", default="1,3,4,6,12")
    p.add_argument("--shift-days", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, CacheError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
