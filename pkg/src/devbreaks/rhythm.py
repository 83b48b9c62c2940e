"""Per-developer pause extraction and sliding-window break detection.

A pause is the whole-day interval between two consecutive commit days. A
window of ``window_months`` calendar months slides over the commit history
in ``shift_days`` steps, starting at the first commit day and stopping at
the first window whose end reaches the last commit day. Within each
window, the far-out-value threshold ``t_fov = Q3 + 3 * (Q3 - Q1)`` is
computed over the fully contained pauses (quartiles are Tukey hinges). A
window yields a usable threshold only when it contains at least
MIN_PAUSES_PER_WINDOW pauses and the interquartile range exceeds
IQR_FLOOR; otherwise the previous window's threshold is reused. While no
usable threshold exists yet, pauses that start in the window but outrun
the window size are set aside and, after the sweep, reported as breaks
against the mean of all valid thresholds (breaks by definition: they
exceed the window itself).

A pause becomes a break when it is longer than the applicable threshold,
or longer than the window size on the deferred path. Overlapping windows
see the same pause many times; each break is emitted once, keyed by its
(start, end), keeping the first window that triggered it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from fractions import Fraction
from typing import Iterator, Sequence

from .dates import add_months
from .model import DeveloperTimeline
from .stats import tukey_hinges

MIN_PAUSES_PER_WINDOW = 4
IQR_FLOOR = 1

SENSITIVITY_WINDOW_MONTHS = (1, 3, 4, 6, 12)


@dataclass(frozen=True)
class Pause:
    """Interval between two consecutive commit days of one developer."""

    start: date
    end: date

    @property
    def length_days(self) -> int:
        return (self.end - self.start).days


@dataclass(frozen=True)
class Window:
    start: date
    end: date

    @property
    def days(self) -> int:
        return (self.end - self.start).days


@dataclass(frozen=True)
class WindowThreshold:
    window_index: int
    t_fov: Fraction | None
    valid: bool


@dataclass(frozen=True)
class DetectedBreak:
    """A pause flagged as longer than usual.

    ``threshold`` is the far-out-value threshold it exceeded, or the mean
    of the developer's valid thresholds for pauses that outran the window
    size (None when no window was ever valid).
    """

    pause: Pause
    window: Window
    threshold: Fraction | None

    @property
    def start(self) -> date:
        return self.pause.start

    @property
    def end(self) -> date:
        return self.pause.end

    @property
    def length_days(self) -> int:
        return self.pause.length_days


@dataclass(frozen=True)
class DetectorConfig:
    window_months: int = 3
    shift_days: int = 7
    min_pauses_per_window: int = MIN_PAUSES_PER_WINDOW
    iqr_floor: int = IQR_FLOOR

    def __post_init__(self) -> None:
        if self.window_months not in SENSITIVITY_WINDOW_MONTHS:
            raise ValueError(
                f"window_months must be one of {SENSITIVITY_WINDOW_MONTHS}"
            )
        if self.shift_days < 1:
            raise ValueError("shift_days must be >= 1")


def extract_pauses(timeline: DeveloperTimeline) -> list[Pause]:
    """All n-1 pauses of a timeline with n commit days (empty when n < 2)."""
    days = timeline.commit_days
    return [Pause(a, b) for a, b in zip(days, days[1:])]


def far_out_threshold(
    pauses_in_window: Sequence[int],
    window_index: int = -1,
    min_pauses: int = MIN_PAUSES_PER_WINDOW,
    iqr_floor: int = IQR_FLOOR,
) -> WindowThreshold:
    """Far-out-value threshold Q3 + 3*IQR over the given pause lengths.

    The result is marked invalid when there are fewer than ``min_pauses``
    values or the interquartile range is at most ``iqr_floor``; invalidity
    is a flag, not an error.
    """
    if not pauses_in_window:
        return WindowThreshold(window_index, None, False)
    q1, q3 = tukey_hinges(pauses_in_window)
    iqr = q3 - q1
    t_fov = q3 + 3 * iqr
    valid = len(pauses_in_window) >= min_pauses and iqr > iqr_floor
    return WindowThreshold(window_index, t_fov, valid)


def iter_windows(first: date, last: date, cfg: DetectorConfig) -> Iterator[Window]:
    """Windows from the first commit day, shifted by cfg.shift_days, up to
    and including the first window whose end reaches the last commit day."""
    start = first
    shift = timedelta(days=cfg.shift_days)
    while True:
        window = Window(start, add_months(start, cfg.window_months))
        yield window
        if window.end >= last:
            return
        start = start + shift


@dataclass
class SweepResult:
    breaks: list[DetectedBreak] = field(default_factory=list)
    window_thresholds: list[WindowThreshold] = field(default_factory=list)
    avg_valid_threshold: Fraction | None = None
    n_windows: int = 0
    window_days_first: int | None = None

    @property
    def fallback_threshold(self) -> Fraction | None:
        """Threshold for judging silences no window ever priced: the mean of
        the valid window thresholds, else the first window's day span."""
        if self.avg_valid_threshold is not None:
            return self.avg_valid_threshold
        if self.window_days_first is not None:
            return Fraction(self.window_days_first)
        return None


def sweep(timeline: DeveloperTimeline, cfg: DetectorConfig | None = None) -> SweepResult:
    """Run the full sliding-window detection for one developer."""
    cfg = cfg or DetectorConfig()
    result = SweepResult()
    pauses = extract_pauses(timeline)
    if not pauses:
        return result

    first = timeline.commit_days[0]
    last = timeline.commit_days[-1]
    emitted: dict[tuple[date, date], DetectedBreak] = {}
    longer_breaks: dict[tuple[date, date], tuple[Pause, Window]] = {}
    valid_values: list[Fraction] = []
    prev: WindowThreshold | None = None

    for index, window in enumerate(iter_windows(first, last, cfg), start=1):
        if result.window_days_first is None:
            result.window_days_first = window.days
        result.n_windows = index
        fully = [
            p for p in pauses if p.start >= window.start and p.end <= window.end
        ]
        partial = [
            p
            for p in pauses
            if window.start <= p.start <= window.end and p.end > window.end
        ]

        own: WindowThreshold | None = None
        if len(fully) >= cfg.min_pauses_per_window:
            own = far_out_threshold(
                [p.length_days for p in fully],
                index,
                cfg.min_pauses_per_window,
                cfg.iqr_floor,
            )

        if own is not None and own.valid:
            effective = own
        elif prev is not None and prev.valid:
            effective = WindowThreshold(index, prev.t_fov, True)
        else:
            # No usable threshold yet: defer. Pauses longer than the window
            # itself are breaks by definition, judged after the sweep.
            for p in partial:
                if p.length_days > window.days:
                    longer_breaks.setdefault((p.start, p.end), (p, window))
            if own is not None:
                result.window_thresholds.append(own)
            prev = own
            continue

        result.window_thresholds.append(effective)
        valid_values.append(effective.t_fov)
        for p in fully + partial:
            if p.length_days > effective.t_fov:
                emitted.setdefault(
                    (p.start, p.end), DetectedBreak(p, window, effective.t_fov)
                )
        prev = effective

    if valid_values:
        result.avg_valid_threshold = sum(valid_values) / len(valid_values)
    for key in sorted(longer_breaks):
        if key not in emitted:
            pause, window = longer_breaks[key]
            emitted[key] = DetectedBreak(pause, window, result.avg_valid_threshold)

    result.breaks = sorted(emitted.values(), key=lambda b: (b.start, b.end))
    return result


def detect_breaks(
    timeline: DeveloperTimeline, cfg: DetectorConfig | None = None
) -> list[DetectedBreak]:
    return sweep(timeline, cfg).breaks


def over_window_pause_count(timeline: DeveloperTimeline, cfg: DetectorConfig) -> int:
    """Pauses longer than a window of cfg.window_months anchored at their start."""
    count = 0
    for p in extract_pauses(timeline):
        if p.length_days > (add_months(p.start, cfg.window_months) - p.start).days:
            count += 1
    return count


def history_shorter_than_window(timeline: DeveloperTimeline, cfg: DetectorConfig) -> bool:
    days = timeline.commit_days
    if len(days) < 2:
        return True
    return add_months(days[0], cfg.window_months) > days[-1]
