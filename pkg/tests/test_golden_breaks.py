"""Hand-traced detection fixtures, frozen end to end.

Every expected tuple below was produced by walking the sliding-window
procedure on paper: windows were listed with their calendar ends, the
fully contained pause multiset of each window written out, hinges and
thresholds computed by hand, and the valid-threshold propagation and
deferred longer-than-window bookkeeping followed step by step. The
detector must reproduce them exactly.

Expected rows are (start, end, length, threshold, window_start); the
threshold is a Fraction or None for breaks that only outran the window
size before any window was ever valid.
"""

from __future__ import annotations

import time
from datetime import date, timedelta
from fractions import Fraction

import pytest

from devbreaks.rhythm import DetectorConfig, detect_breaks

from conftest import make_timeline


def weekly(start: date, until: date) -> list[date]:
    days = [start]
    while days[-1] + timedelta(days=7) <= until:
        days.append(days[-1] + timedelta(days=7))
    return days


d = date

GOLDEN = {
    # Uniform weekly rhythm for a year: every window sees only 7-day pauses
    # (IQR 0, never valid) and nothing outruns a 3-month window.
    "uniform_weekly_no_breaks": (
        weekly(d(2020, 1, 1), d(2020, 12, 30)),
        3,
        [],
    ),
    # Weekly rhythm with one 120-day gap. No window is ever valid (the gap
    # never fits inside one, so every window's pauses are all 7s), but the
    # gap outruns the 91-day first window at its very first sighting.
    "weekly_with_120_day_gap": (
        weekly(d(2020, 1, 1), d(2020, 4, 1))
        + [d(2020, 7, 30)]
        + weekly(d(2020, 7, 30), d(2020, 12, 30))[1:],
        3,
        [("2020-04-01", "2020-07-30", 120, None, "2020-01-01")],
    ),
    # One-month windows. First window [Mar 1, Apr 1] holds pauses
    # 2,3,5,9,12: hinges 3 and 9, IQR 6, threshold 27. The 30-day pause is
    # partially included there and exceeds 27; later windows reuse 27 and
    # re-detect it, deduplicated to the first window.
    "single_anomaly_above_valid_threshold": (
        [d(2021, 3, 1), d(2021, 3, 3), d(2021, 3, 6), d(2021, 3, 11),
         d(2021, 3, 20), d(2021, 4, 1), d(2021, 5, 1), d(2021, 5, 3), d(2021, 5, 6)],
        1,
        [("2021-04-01", "2021-05-01", 30, Fraction(27), "2021-03-01")],
    ),
    # A 40-day gap opens the history before any window can be valid, so it
    # is deferred as longer-than-window (31 days). Windows 6..10 later
    # become valid with thresholds 20.5, 20.5, 20.5 (reused), 26.5, 20.5;
    # the deferred pause is reported against their mean 21.7.
    "early_gap_judged_by_mean_threshold": (
        [d(2021, 1, 1), d(2021, 1, 3), d(2021, 2, 12), d(2021, 2, 14),
         d(2021, 2, 17), d(2021, 2, 22), d(2021, 3, 3), d(2021, 3, 15),
         d(2021, 3, 17), d(2021, 3, 20), d(2021, 3, 25), d(2021, 4, 3)],
        1,
        [("2021-01-03", "2021-02-12", 40, Fraction(217, 10), "2021-01-01")],
    ),
    # A single commit day has no pauses at all.
    "single_commit_day": ([d(2021, 5, 1)], 3, []),
    # Two commit days, 151 days apart: the pause outruns the 90-day first
    # window; no window is ever valid, threshold stays None.
    "two_commits_giant_pause": (
        [d(2021, 1, 1), d(2021, 6, 1)],
        3,
        [("2021-01-01", "2021-06-01", 151, None, "2021-01-01")],
    ),
    # Ten-day pause inside a 31-day window: fully contained pauses are
    # never judged on the deferred path, so nothing fires.
    "short_history_small_pause": ([d(2021, 1, 1), d(2021, 1, 11)], 1, []),
    # Pause exactly equal to the window span (31 days) is fully contained
    # in the first window and is not longer than it.
    "pause_equal_to_window_size": ([d(2021, 3, 1), d(2021, 4, 1)], 1, []),
    # One day more and it becomes partially included and longer than the
    # window, a break by definition.
    "pause_one_day_over_window_size": (
        [d(2021, 3, 1), d(2021, 4, 2)],
        1,
        [("2021-03-01", "2021-04-02", 32, None, "2021-03-01")],
    ),
    # A pause exactly at the threshold (27 days with t_fov 27) is not a
    # break: the comparison is strict.
    "pause_exactly_at_threshold": (
        [d(2021, 3, 1), d(2021, 3, 3), d(2021, 3, 6), d(2021, 3, 11),
         d(2021, 3, 20), d(2021, 4, 1), d(2021, 4, 28), d(2021, 4, 30)],
        1,
        [],
    ),
    # Two separated anomalies; the second is first seen by the window
    # starting Apr 12 (the last one ending before May 6 is [Apr 5, May 5]).
    "two_anomalies_dedup_first_window_wins": (
        [d(2021, 3, 1), d(2021, 3, 3), d(2021, 3, 6), d(2021, 3, 11),
         d(2021, 3, 20), d(2021, 4, 1), d(2021, 5, 1), d(2021, 5, 3),
         d(2021, 5, 6), d(2021, 6, 4), d(2021, 6, 6)],
        1,
        [
            ("2021-04-01", "2021-05-01", 30, Fraction(27), "2021-03-01"),
            ("2021-05-06", "2021-06-04", 29, Fraction(27), "2021-04-12"),
        ],
    ),
    # Leap-year February: the single window [Feb 1, Mar 1] spans 29 days,
    # holds pauses 2,3,5,9,10 (threshold 27, valid), and nothing exceeds it.
    "leap_february_window": (
        [d(2020, 2, 1), d(2020, 2, 3), d(2020, 2, 6), d(2020, 2, 11),
         d(2020, 2, 20), d(2020, 3, 1)],
        1,
        [],
    ),
}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_case(name):
    days, window_months, expected = GOLDEN[name]
    breaks = detect_breaks(
        make_timeline(days), DetectorConfig(window_months=window_months)
    )
    got = [
        (b.start.isoformat(), b.end.isoformat(), b.length_days, b.threshold,
         b.window.start.isoformat())
        for b in breaks
    ]
    expected = [
        (start, end, length, thr, win) for start, end, length, thr, win in expected
    ]
    assert got == expected


def test_golden_suite_runs_fast():
    t0 = time.perf_counter()
    for days, window_months, _ in GOLDEN.values():
        detect_breaks(make_timeline(days), DetectorConfig(window_months=window_months))
    assert time.perf_counter() - t0 < 1.0
