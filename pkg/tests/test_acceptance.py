"""Acceptance suite: one test per acceptance criterion, each printing a
PASS line with its number so a full run reads as a checklist.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import shutil
import time
from datetime import date, timedelta
from fractions import Fraction

from devbreaks.analytics import (
    transition_matrix,
    wilcoxon_holm_cliffs,
    break_frequency,
    break_durations,
    paired_duration_samples,
    transition_matrices_by_org,
)
from devbreaks.coredevs import commit_based_core, truck_factor
from devbreaks.ingest import build_timeline, parse_commit_log, parse_events
from devbreaks.lifecycle import (
    LifecycleConfig,
    LifecycleTrace,
    State,
    StateSegment,
    build_trace,
    derive_transitions,
    segment_break,
)
from devbreaks.model import CommitRecord, IdentityMap
from devbreaks.rhythm import (
    DetectedBreak,
    DetectorConfig,
    Pause,
    Window,
    detect_breaks,
    far_out_threshold,
    sweep,
)
from devbreaks.stats import (
    average_ranks,
    cliffs_delta,
    holm_bonferroni,
    logistic_fit_2x2,
    odds_ratio_2x2,
    wilcoxon_signed_rank,
)

from conftest import as_dt, make_event, make_timeline
from test_golden_breaks import GOLDEN

d = date
A, N, I, G = (
    State.ACTIVE_CODING,
    State.ACTIVE_NON_CODING,
    State.INACTIVE,
    State.GONE,
)


def ok(number: int, label: str) -> None:
    print(f"ACCEPTANCE {number} {label}: PASS")


# ---------------------------------------------------------------- 1


def test_criterion_1_detector_matches_hand_traced_golden_suite():
    assert len(GOLDEN) >= 10
    t0 = time.perf_counter()
    for name, (days, window_months, expected) in GOLDEN.items():
        breaks = detect_breaks(
            make_timeline(days), DetectorConfig(window_months=window_months)
        )
        got = [
            (
                b.start.isoformat(),
                b.end.isoformat(),
                b.length_days,
                b.threshold,
                b.window.start.isoformat(),
            )
            for b in breaks
        ]
        assert got == list(expected), name
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    ok(1, f"detector fidelity, {len(GOLDEN)} hand-traced timelines in {elapsed:.3f}s")


# ---------------------------------------------------------------- 2


def test_criterion_2_inactivity_period_replicas():
    cfg = LifecycleConfig()
    # 93-day pause, threshold 85.75, events spaced so no sub-gap exceeds it
    long_pause = DetectedBreak(
        Pause(d(2015, 9, 11), d(2015, 12, 13)),
        Window(d(2015, 9, 11), d(2015, 12, 11)),
        Fraction(343, 4),
    )
    events = [make_event(d(2015, 10, 15)), make_event(d(2015, 11, 20))]
    segs = segment_break(long_pause, events, cfg)
    assert [(s.state, s.duration_days) for s in segs] == [(N, 93)]

    # threshold 30, traces only for the first 32 days, then silence
    split_pause = DetectedBreak(
        Pause(d(2014, 9, 12), d(2014, 12, 1)),
        Window(d(2014, 9, 12), d(2014, 12, 12)),
        Fraction(30),
    )
    events = [
        make_event(d(2014, 9, 20)),
        make_event(d(2014, 10, 1)),
        make_event(d(2014, 10, 14)),
    ]
    segs = segment_break(split_pause, events, cfg)
    assert [s.state for s in segs] == [N, I]
    assert segs[0].end == d(2014, 10, 14)  # boundary exactly on the last event day
    assert segs[0].duration_days == 32
    ok(2, "one-break and two-break inactivity period replicas")


# ---------------------------------------------------------------- 3


def hinge_oracle(values):
    ordered = sorted(Fraction(v) for v in values)
    n = len(ordered)

    def med(chunk):
        m = len(chunk)
        return chunk[m // 2] if m % 2 else (chunk[m // 2 - 1] + chunk[m // 2]) / 2

    half = (n + 1) // 2
    return med(ordered[:half]), med(ordered[n - half:])


def test_criterion_3_threshold_arithmetic_against_hinge_oracle():
    rng = random.Random(31)
    for _ in range(1000):
        values = [rng.randint(1, 500) for _ in range(rng.randint(1, 30))]
        q1, q3 = hinge_oracle(values)
        result = far_out_threshold(values)
        assert result.t_fov == q3 + 3 * (q3 - q1)
        assert result.valid == (len(values) >= 4 and (q3 - q1) > 1)
    ok(3, "far-out threshold equals hinge oracle on 1000 random samples")


# ---------------------------------------------------------------- 4


def test_criterion_4_gone_split_boundaries():
    cfg = LifecycleConfig()
    outcomes = {}
    for days in (364, 365, 400):
        brk = DetectedBreak(
            Pause(d(2019, 1, 1), d(2019, 1, 1) + timedelta(days=days)),
            Window(d(2019, 1, 1), d(2019, 4, 1)),
            Fraction(30),
        )
        outcomes[days] = [(s.state, s.duration_days) for s in segment_break(brk, [], cfg)]
    assert outcomes[364] == [(I, 364)]
    # the boundary case: the full hiatus elapsed exactly at the return,
    # leaving a zero-length gone segment
    assert outcomes[365] == [(I, 365), (G, 0)]
    assert outcomes[400] == [(I, 365), (G, 35)]
    ok(4, "gone split at 364/365/400 days, zero-length boundary case included")


# ---------------------------------------------------------------- 5


ALLOWED_NEXT = {A: (N, I), N: (A, I), I: (A, N, G), G: (A, N)}


def random_trace(rng: random.Random, k: int) -> LifecycleTrace:
    segments = []
    cursor = d(2015, 1, 1)
    state = A
    for _ in range(rng.randint(1, 9)):
        nxt = cursor + timedelta(days=rng.randint(1, 120))
        segments.append(StateSegment(state, cursor, nxt))
        cursor = nxt
        state = rng.choice(ALLOWED_NEXT[state])
    segments[-1] = StateSegment(
        segments[-1].state, segments[-1].start, segments[-1].end, ongoing=True
    )
    segments = tuple(segments)
    return LifecycleTrace(
        developer_key=f"dev{k}",
        org_id=f"org{k % 7}",
        segments=segments,
        transitions=derive_transitions(segments),
        first_commit_day=segments[0].start,
        last_commit_day=segments[-1].end,
        active_pause_count=rng.randint(0, 30),
    )


def test_criterion_5_transition_matrix_properties():
    rng = random.Random(55)
    traces = [random_trace(rng, k) for k in range(10_000)]
    for trace in traces:
        for tr in trace.transitions:
            if tr.name == "comeback":
                assert tr.from_state is G
            if tr.to_state is G:
                assert tr.name == "expire_to_gone" and tr.from_state is I
    for mode in ("pauses", "boundaries"):
        for lo in range(0, len(traces), 500):
            matrix = transition_matrix(traces[lo : lo + 500], "chunk", mode)
            for i, row in enumerate(matrix.probs):
                total = float(sum(row))
                if sum(matrix.counts[i]) == 0:
                    assert total == 0.0
                else:
                    assert abs(total - 1.0) <= 1e-9
    ok(5, "row normalization and gone-edge origins over 10000 random traces")


# ---------------------------------------------------------------- 6


def enumeration_p(x, y, alternative):
    diffs = [Fraction(a) - Fraction(b) for a, b in zip(x, y) if a != b]
    ranks = average_ranks([abs(v) for v in diffs])
    n = len(diffs)
    w = sum((r for v, r in zip(diffs, ranks) if v > 0), Fraction(0))
    sums = [
        sum((r for bit, r in zip(bits, ranks) if bit), Fraction(0))
        for bits in itertools.product((0, 1), repeat=n)
    ]
    lower = Fraction(sum(1 for s in sums if s <= w), 2**n)
    upper = Fraction(sum(1 for s in sums if s >= w), 2**n)
    if alternative == "less":
        return lower
    if alternative == "greater":
        return upper
    return min(Fraction(1), 2 * min(lower, upper))


def test_criterion_6_statistics_oracles():
    rng = random.Random(66)

    wilcoxon_cases = 0
    while wilcoxon_cases < 500:
        n = rng.randint(1, 10)
        x = [rng.randint(0, 9) for _ in range(n)]
        y = [rng.randint(0, 9) for _ in range(n)]
        result = wilcoxon_signed_rank(x, y)
        if result is None:
            continue
        assert result.exact
        assert result.p_value == enumeration_p(x, y, "two-sided")
        wilcoxon_cases += 1

    for _ in range(200):
        xs = [rng.randint(-30, 30) for _ in range(rng.randint(1, 20))]
        ys = [rng.randint(-30, 30) for _ in range(rng.randint(1, 20))]
        greater = sum(1 for a in xs for b in ys if a > b)
        less = sum(1 for a in xs for b in ys if a < b)
        assert cliffs_delta(xs, ys) == Fraction(greater - less, len(xs) * len(ys))

    for _ in range(200):
        ps = [Fraction(rng.randint(0, 1000), 1000) for _ in range(rng.randint(1, 10))]
        adjusted = holm_bonferroni(ps)
        m = len(ps)
        order = sorted(range(m), key=lambda i: ps[i])
        for rank, i in enumerate(order):
            expected = min(1, max((m - r) * ps[order[r]] for r in range(rank + 1)))
            assert adjusted[i] == expected

    for _ in range(200):
        a, b, c, e = (rng.randint(1, 300) for _ in range(4))
        result = odds_ratio_2x2(a, b, c, e)
        closed_form = (a * e) / (b * c)
        assert abs(result.or_value - closed_form) <= 1e-12 * closed_form
        _, coef = logistic_fit_2x2(a, b, c, e)
        assert abs(math.exp(coef) - result.or_value) <= 1e-6 * result.or_value

    ok(6, "wilcoxon/cliff/holm/odds-ratio oracles (500+ exact wilcoxon cases)")


# ---------------------------------------------------------------- 7


def test_criterion_7_core_identification():
    t0 = as_dt(d(2020, 1, 1))

    def commit(author, files, sha, hours=0, doc=False):
        return CommitRecord(
            "org/p", sha, author, t0 + timedelta(hours=hours),
            tuple((f, doc) for f in files),
        )

    commits = []
    tick = 0
    for dev, count in {"A": 50, "B": 30, "C": 15, "D": 5}.items():
        for i in range(count):
            tick += 1
            commits.append(commit(dev, [f"src/{dev}{i}.c"], f"{dev}{i}", tick))
    assert commit_based_core(commits, Fraction(4, 5)).members == ("A", "B")

    half_half = [
        commit("A", [f"src/a{i}.c"], f"ha{i}", i) for i in range(5)
    ] + [commit("B", [f"src/b{i}.c"], f"hb{i}", 100 + i) for i in range(5)]
    assert len(truck_factor(half_half).members) == 2

    with_docs = half_half + [
        commit("DOC", [f"notes{i}.md"], f"doc{i}", 200 + i, doc=True) for i in range(40)
    ]
    assert "DOC" not in truck_factor(with_docs).members
    ok(7, "commit-based core and truck-factor fixtures")


# ---------------------------------------------------------------- 8


def synth_org(n_devs=50, commits_per_dev=200, events_per_dev=1000, seed=8):
    rng = random.Random(seed)
    commit_lines = []
    event_lines = []
    sha = 0
    for k in range(n_devs):
        dev = f"dev{k:03d}"
        rhythm = rng.randint(2, 12)
        day = d(2016, 1, 1) + timedelta(days=rng.randint(0, 90))
        days = []
        for i in range(commits_per_dev):
            days.append(day)
            step = max(1, round(rng.gauss(rhythm, rhythm / 3)))
            if i == commits_per_dev // 2 and rng.random() < 0.5:
                step = rng.randint(100, 420)
            day += timedelta(days=step)
        for cday in days:
            sha += 1
            commit_lines.append(
                json.dumps(
                    {
                        "repo": f"org/r{k % 5}",
                        "sha": f"{sha:x}",
                        "author": dev,
                        "authored_at": f"{cday.isoformat()}T09:00:00Z",
                        "files": [f"src/{dev}/m{sha % 37}.c"],
                    }
                )
            )
        span = (days[-1] - days[0]).days
        for _ in range(events_per_dev):
            eday = days[0] + timedelta(days=rng.randint(0, max(span, 1)))
            event_lines.append(
                json.dumps(
                    {
                        "repo": f"org/r{k % 5}",
                        "actor": dev,
                        "created_at": f"{eday.isoformat()}T15:00:00Z",
                        "type": rng.choice(["issue_comment", "pr_comment", "mentioned"]),
                    }
                )
            )
    return commit_lines, event_lines


def test_criterion_8_scale_end_to_end_under_ten_seconds():
    commit_lines, event_lines = synth_org()
    assert len(commit_lines) == 10_000 and len(event_lines) == 50_000
    cutoff = as_dt(d(2022, 1, 1))

    t0 = time.perf_counter()
    commits = parse_commit_log(commit_lines, "ndjson").records
    events = parse_events(event_lines).events
    build = build_timeline(commits, events, IdentityMap(), "org", cutoff)
    assert len(build.timelines) == 50

    cfg = DetectorConfig()
    traces = []
    for dev, timeline in build.timelines.items():
        result = sweep(timeline, cfg)
        traces.append(
            build_trace(timeline, result.breaks, LifecycleConfig(), result.fallback_threshold)
        )
    break_frequency(traces)
    break_durations(traces)
    wilcoxon_holm_cliffs(paired_duration_samples(traces))
    transition_matrices_by_org(traces)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    ok(8, f"50 devs / 10k commits / 50k events end-to-end in {elapsed:.2f}s")


# ---------------------------------------------------------------- 9


def test_criterion_9_determinism(tmp_path):
    from test_cli import run_pipeline, write_corpus

    corpus = write_corpus(tmp_path)

    def snapshot():
        run = run_pipeline(tmp_path / "work", corpus)
        files = {
            str(p.relative_to(run)): p.read_bytes()
            for p in sorted(run.rglob("*"))
            if p.is_file()
        }
        shutil.rmtree(tmp_path / "work")
        return files

    first = snapshot()
    second = snapshot()
    assert first == second
    ok(9, f"two identical runs, {len(first)} files byte-identical")
