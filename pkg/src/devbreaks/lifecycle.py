"""Label detected breaks with lifecycle states and build state timelines.

Within a detected break, the developer's collaboration events partition
the interval: stretches where consecutive activity anchors (the opening
commit day, each event day, the closing commit day) are at most the
break's threshold apart are ``active_non_coding``; stretches longer than
the threshold are ``inactive``. An eventless stretch that reaches
``gone_after_days`` splits at exactly that many days into ``inactive``
followed by ``gone``, so a gone segment always starts a full hiatus after
the last observed activity. A break that reaches the gone limit exactly
produces a zero-length gone segment: the developer touched the gone state
at the instant they returned.

All non-break time between commit days is ``active_coding``. The trailing
silence between the last commit day and the observation cutoff gets the
same treatment once it is longer than the developer's fallback threshold;
its final segment is right-censored (``ongoing``).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .dates import utc_day
from .errors import ConsistencyError
from .model import ActivityEvent, DeveloperTimeline
from .rhythm import DetectedBreak, extract_pauses


class State(str, Enum):
    ACTIVE_CODING = "active_coding"
    ACTIVE_NON_CODING = "active_non_coding"
    INACTIVE = "inactive"
    GONE = "gone"


_A = State.ACTIVE_CODING
_N = State.ACTIVE_NON_CODING
_I = State.INACTIVE
_G = State.GONE

TRANSITION_NAMES: dict[tuple[State, State], str] = {
    (_A, _N): "pause_to_noncoding",
    (_A, _I): "pause_to_inactive",
    (_N, _I): "deepen_to_inactive",
    (_N, _A): "back_to_coding",
    (_I, _A): "reactivation",
    (_I, _N): "reactivation",
    (_I, _G): "expire_to_gone",
    (_G, _A): "comeback",
    (_G, _N): "comeback",
    (_A, _A): "self_loop",
    (_N, _N): "self_loop",
    (_I, _I): "self_loop",
    (_G, _G): "self_loop",
}


@dataclass(frozen=True)
class LifecycleConfig:
    """Only the gone hiatus is a run-level constant; the non-coding and
    inactive thresholds are each break's own far-out-value threshold."""

    gone_after_days: int = 365

    def __post_init__(self) -> None:
        if self.gone_after_days < 1:
            raise ValueError("gone_after_days must be positive")


@dataclass(frozen=True)
class StateSegment:
    state: State
    start: date
    end: date
    ongoing: bool = False

    @property
    def duration_days(self) -> int:
        return (self.end - self.start).days


@dataclass(frozen=True)
class Transition:
    from_state: State
    to_state: State
    at: date
    name: str


@dataclass(frozen=True)
class LifecycleTrace:
    developer_key: str
    org_id: str
    segments: tuple[StateSegment, ...]
    transitions: tuple[Transition, ...]
    first_commit_day: date
    last_commit_day: date
    active_pause_count: int  # pauses between commit days that were not breaks

    def states_seen(self) -> set[State]:
        return {seg.state for seg in self.segments}

    @property
    def gone_at_cutoff(self) -> bool:
        return bool(self.segments) and self.segments[-1].state is _G

    @property
    def years_observed(self) -> float:
        """Years between first and last commit day (365.25-day years)."""
        return (self.last_commit_day - self.first_commit_day).days / 365.25


def _classify_gaps(
    start: date, end: date, event_days: Sequence[date], threshold
) -> list[tuple[State, date, date]]:
    """Elementary regions between consecutive activity anchors, merged.

    A stretch counts as non-coding only when an event vouches for it: an
    interval with no events at all is inactive no matter how short.
    """
    inside = {d for d in event_days if start <= d <= end}
    if not inside:
        return [(_I, start, end)] if end > start else []
    points = sorted({start, end, *inside})
    regions: list[tuple[State, date, date]] = []
    for a, b in zip(points, points[1:]):
        state = _N if (b - a).days <= threshold else _I
        if regions and regions[-1][0] is state:
            regions[-1] = (state, regions[-1][1], b)
        else:
            regions.append((state, a, b))
    return regions


def _split_gone(
    regions: list[tuple[State, date, date]], gone_after_days: int
) -> list[tuple[State, date, date]]:
    out: list[tuple[State, date, date]] = []
    for state, a, b in regions:
        if state is _I and (b - a).days >= gone_after_days:
            split = a + timedelta(days=gone_after_days)
            out.append((_I, a, split))
            out.append((_G, split, b))
        else:
            out.append((state, a, b))
    return out


def segment_break(
    brk: DetectedBreak,
    events: Sequence[ActivityEvent],
    cfg: LifecycleConfig,
    threshold=None,
) -> list[StateSegment]:
    """Split one break into non-coding / inactive / gone segments.

    ``events`` must be the developer's non-passive events inside the break
    (boundary days included). The threshold defaults to the break's own;
    an explicit one can be supplied for breaks detected without a usable
    window threshold.
    """
    thr = threshold if threshold is not None else brk.threshold
    if thr is None:
        raise ConsistencyError(
            f"break {brk.start}..{brk.end} has no threshold; pass a fallback"
        )
    event_days = []
    for ev in events:
        day = utc_day(ev.occurred_at)
        if not brk.start <= day <= brk.end:
            raise ValueError(f"event on {day} is outside break {brk.start}..{brk.end}")
        event_days.append(day)
    regions = _classify_gaps(brk.start, brk.end, event_days, thr)
    regions = _split_gone(regions, cfg.gone_after_days)
    return [StateSegment(state, a, b) for state, a, b in regions]


def _validate_breaks(
    breaks: Sequence[DetectedBreak], commit_days: Sequence[date]
) -> list[DetectedBreak]:
    first, last = commit_days[0], commit_days[-1]
    day_set = set(commit_days)
    ordered = sorted(breaks, key=lambda b: (b.start, b.end))
    previous_end: date | None = None
    for brk in ordered:
        if brk.start >= brk.end:
            raise ConsistencyError(f"empty break {brk.start}..{brk.end}")
        if brk.start < first or brk.end > last:
            raise ConsistencyError(
                f"break {brk.start}..{brk.end} outside commit history {first}..{last}"
            )
        if previous_end is not None and brk.start < previous_end:
            raise ConsistencyError(f"overlapping breaks at {brk.start}")
        # a break must be a pause: commit days bound it, none fall inside
        if brk.start not in day_set or brk.end not in day_set:
            raise ConsistencyError(
                f"break {brk.start}..{brk.end} is not bounded by commit days"
            )
        swallowed = [d for d in commit_days if brk.start < d < brk.end]
        if swallowed:
            raise ConsistencyError(
                f"break {brk.start}..{brk.end} spans commit day {swallowed[0]}"
            )
        previous_end = brk.end
    return ordered


def build_trace(
    timeline: DeveloperTimeline,
    breaks: Sequence[DetectedBreak],
    cfg: LifecycleConfig | None = None,
    fallback_threshold: Fraction | None = None,
) -> LifecycleTrace:
    """Assemble a developer's full state timeline from their breaks.

    ``fallback_threshold`` prices silences no window ever judged: breaks
    carrying no threshold and the trailing stretch before the cutoff
    (detectors expose it as ``SweepResult.fallback_threshold``).
    """
    cfg = cfg or LifecycleConfig()
    if not timeline.commit_days:
        raise ValueError("cannot build a trace without commit days")
    first = timeline.commit_days[0]
    last = timeline.commit_days[-1]
    cutoff_day = utc_day(timeline.observation_end)
    if cutoff_day < last:
        raise ConsistencyError("observation end precedes the last commit day")
    ordered = _validate_breaks(breaks, timeline.commit_days)

    events_by_day: dict[date, list[ActivityEvent]] = {}
    for ev in timeline.activity_events:
        events_by_day.setdefault(utc_day(ev.occurred_at), []).append(ev)
    all_event_days = sorted(events_by_day)

    raw: list[tuple[State, date, date]] = []
    cursor = first
    for brk in ordered:
        # The commit day bounding every break is an (often zero-length)
        # active anchor, so back-to-back breaks never fuse across it.
        raw.append((_A, cursor, brk.start))
        thr = brk.threshold if brk.threshold is not None else fallback_threshold
        if thr is None:
            raise ConsistencyError(
                f"break {brk.start}..{brk.end} has no threshold and no fallback given"
            )
        inside = [d for d in all_event_days if brk.start <= d <= brk.end]
        regions = _classify_gaps(brk.start, brk.end, inside, thr)
        raw.extend(_split_gone(regions, cfg.gone_after_days))
        cursor = brk.end
    raw.append((_A, cursor, last))

    trailing_days = (cutoff_day - last).days
    if trailing_days > 0:
        if fallback_threshold is None:
            raise ConsistencyError(
                f"{timeline.developer_key}: trailing silence of {trailing_days} days "
                "needs a fallback threshold"
            )
        if trailing_days > fallback_threshold:
            inside = [d for d in all_event_days if last < d <= cutoff_day]
            regions = _classify_gaps(last, cutoff_day, inside, fallback_threshold)
            raw.extend(_split_gone(regions, cfg.gone_after_days))
        else:
            raw.append((_A, last, cutoff_day))

    merged: list[tuple[State, date, date]] = []
    for state, a, b in raw:
        if merged and merged[-1][0] is state and merged[-1][2] == a:
            merged[-1] = (state, merged[-1][1], b)
        else:
            merged.append((state, a, b))

    segments = tuple(
        StateSegment(state, a, b, ongoing=(i == len(merged) - 1))
        for i, (state, a, b) in enumerate(merged)
    )
    _check_coverage(segments, first, cutoff_day, timeline.developer_key)
    transitions = derive_transitions(segments)

    return LifecycleTrace(
        developer_key=timeline.developer_key,
        org_id=timeline.org_id,
        segments=segments,
        transitions=transitions,
        first_commit_day=first,
        last_commit_day=last,
        active_pause_count=len(extract_pauses(timeline)) - len(ordered),
    )


def derive_transitions(segments: Sequence[StateSegment]) -> tuple[Transition, ...]:
    """Named transitions at every boundary between consecutive segments."""
    transitions = []
    for prev, nxt in zip(segments, segments[1:]):
        pair = (prev.state, nxt.state)
        name = TRANSITION_NAMES.get(pair)
        if name is None:
            raise ConsistencyError(f"impossible transition {pair}")
        if prev.state is nxt.state:
            raise ConsistencyError(f"unmerged adjacent {prev.state.value} segments")
        transitions.append(Transition(prev.state, nxt.state, nxt.start, name))
    return tuple(transitions)


def _check_coverage(
    segments: Sequence[StateSegment], first: date, cutoff: date, dev: str
) -> None:
    if not segments:
        raise ConsistencyError(f"{dev}: empty trace")
    if segments[0].start != first or segments[-1].end != cutoff:
        raise ConsistencyError(f"{dev}: trace does not span history to cutoff")
    for prev, nxt in zip(segments, segments[1:]):
        if prev.end != nxt.start:
            raise ConsistencyError(f"{dev}: gap or overlap at {nxt.start}")
    for seg in segments:
        if seg.end < seg.start:
            raise ConsistencyError(f"{dev}: negative segment at {seg.start}")
