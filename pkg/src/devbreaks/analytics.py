"""Aggregate lifecycle traces into the reporting tables.

All aggregations are associative folds over per-trace contributions, so
partial results computed over disjoint trace subsets merge into the same
totals regardless of order.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from statistics import mean
from typing import Iterable, Mapping, Sequence

from .errors import ConsistencyError
from .lifecycle import LifecycleTrace, State, TRANSITION_NAMES
from .stats import (
    OddsRatioResult,
    cliffs_delta,
    delta_magnitude,
    holm_bonferroni,
    logistic_fit_2x2,
    median_fraction,
    odds_ratio_2x2,
    wilcoxon_signed_rank,
)

STATES = (
    State.ACTIVE_CODING,
    State.ACTIVE_NON_CODING,
    State.INACTIVE,
    State.GONE,
)
_INDEX = {state: i for i, state in enumerate(STATES)}

SELF_LOOP_MODES = ("pauses", "boundaries")

AGGREGATE_SCOPE = "aggregate"


@dataclass(frozen=True)
class TransitionMatrix:
    scope: str
    counts: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[Fraction, ...], ...]

    @property
    def zero_rows(self) -> tuple[State, ...]:
        return tuple(
            state for i, state in enumerate(STATES) if sum(self.counts[i]) == 0
        )


def transition_counts(
    trace: LifecycleTrace, self_loop_mode: str = "pauses"
) -> list[list[int]]:
    """4x4 transition counts for one trace.

    In ``pauses`` mode every pause between commit days that was not a break
    adds one active_coding self-loop, giving the active state its
    self-transition mass; ``boundaries`` mode counts segment boundaries
    only.
    """
    if self_loop_mode not in SELF_LOOP_MODES:
        raise ValueError(f"self_loop_mode must be one of {SELF_LOOP_MODES}")
    counts = [[0] * len(STATES) for _ in STATES]
    for tr in trace.transitions:
        pair = (tr.from_state, tr.to_state)
        if pair not in TRANSITION_NAMES:
            raise ConsistencyError(f"unknown transition {pair}")
        counts[_INDEX[tr.from_state]][_INDEX[tr.to_state]] += 1
    if self_loop_mode == "pauses":
        i = _INDEX[State.ACTIVE_CODING]
        counts[i][i] += trace.active_pause_count
    return counts


def _merge(into: list[list[int]], other: Sequence[Sequence[int]]) -> None:
    for i in range(len(STATES)):
        for j in range(len(STATES)):
            into[i][j] += other[i][j]


def matrix_from_counts(scope: str, counts: Sequence[Sequence[int]]) -> TransitionMatrix:
    probs = []
    for row in counts:
        total = sum(row)
        if total == 0:
            probs.append(tuple(Fraction(0) for _ in row))
        else:
            probs.append(tuple(Fraction(v, total) for v in row))
    return TransitionMatrix(
        scope=scope,
        counts=tuple(tuple(row) for row in counts),
        probs=tuple(probs),
    )


def transition_matrix(
    traces: Iterable[LifecycleTrace],
    scope: str = AGGREGATE_SCOPE,
    self_loop_mode: str = "pauses",
) -> TransitionMatrix:
    total = [[0] * len(STATES) for _ in STATES]
    for trace in traces:
        _merge(total, transition_counts(trace, self_loop_mode))
    return matrix_from_counts(scope, total)


def transition_matrices_by_org(
    traces: Sequence[LifecycleTrace], self_loop_mode: str = "pauses"
) -> dict[str, TransitionMatrix]:
    """One matrix per organization plus the aggregate over everything."""
    by_org: dict[str, list[LifecycleTrace]] = defaultdict(list)
    for trace in traces:
        by_org[trace.org_id].append(trace)
    result = {
        org: transition_matrix(members, org, self_loop_mode)
        for org, members in sorted(by_org.items())
    }
    result[AGGREGATE_SCOPE] = transition_matrix(traces, AGGREGATE_SCOPE, self_loop_mode)
    return result


@dataclass(frozen=True)
class OrgBreakFrequency:
    org: str
    n_devs: int
    noncoding_devs: int
    inactive_devs: int
    gone_devs: int
    gone_at_cutoff_devs: int
    noncoding_share: Fraction
    inactive_share: Fraction
    gone_share: Fraction
    noncoding_per_year_mean: float
    inactive_per_year_mean: float
    gone_per_year_mean: float


def _completed_segments(trace: LifecycleTrace, state: State):
    return [s for s in trace.segments if s.state is state and not s.ongoing]


def _per_year(count: int, trace: LifecycleTrace) -> float:
    years = trace.years_observed
    return count / years if years > 0 else float(count)


def break_frequency(traces: Sequence[LifecycleTrace]) -> list[OrgBreakFrequency]:
    """Per-organization counts and shares of developers ever in each state,
    with mean per-developer break rates normalized by years in project."""
    by_org: dict[str, list[LifecycleTrace]] = defaultdict(list)
    for trace in traces:
        by_org[trace.org_id].append(trace)
    rows = []
    for org in sorted(by_org):
        members = by_org[org]
        n = len(members)
        ever = {
            state: sum(1 for t in members if state in t.states_seen())
            for state in (State.ACTIVE_NON_CODING, State.INACTIVE, State.GONE)
        }
        rates = {
            state: mean(
                _per_year(
                    sum(1 for s in t.segments if s.state is state), t
                )
                for t in members
            )
            for state in (State.ACTIVE_NON_CODING, State.INACTIVE, State.GONE)
        }
        rows.append(
            OrgBreakFrequency(
                org=org,
                n_devs=n,
                noncoding_devs=ever[State.ACTIVE_NON_CODING],
                inactive_devs=ever[State.INACTIVE],
                gone_devs=ever[State.GONE],
                gone_at_cutoff_devs=sum(1 for t in members if t.gone_at_cutoff),
                noncoding_share=Fraction(ever[State.ACTIVE_NON_CODING], n),
                inactive_share=Fraction(ever[State.INACTIVE], n),
                gone_share=Fraction(ever[State.GONE], n),
                noncoding_per_year_mean=rates[State.ACTIVE_NON_CODING],
                inactive_per_year_mean=rates[State.INACTIVE],
                gone_per_year_mean=rates[State.GONE],
            )
        )
    return rows


@dataclass(frozen=True)
class DurationStats:
    org: str
    state: State
    n: int
    mean_days: float
    median_days: float
    sd_days: float  # population standard deviation


def break_durations(traces: Sequence[LifecycleTrace]) -> list[DurationStats]:
    """Per-org duration summaries of completed non-coding and inactive
    breaks. Gone segments and right-censored segments are excluded; orgs
    with no completed breaks of a state get no row."""
    samples: dict[tuple[str, State], list[int]] = defaultdict(list)
    for trace in traces:
        for state in (State.ACTIVE_NON_CODING, State.INACTIVE):
            for seg in _completed_segments(trace, state):
                samples[(trace.org_id, state)].append(seg.duration_days)
    rows = []
    for (org, state), values in sorted(
        samples.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        n = len(values)
        avg = sum(values) / n
        var = sum((v - avg) ** 2 for v in values) / n
        rows.append(
            DurationStats(
                org=org,
                state=state,
                n=n,
                mean_days=avg,
                median_days=float(median_fraction(values)),
                sd_days=var**0.5,
            )
        )
    return rows


def paired_duration_samples(
    traces: Sequence[LifecycleTrace],
) -> dict[str, list[tuple[Fraction, Fraction]]]:
    """Per org, (median non-coding, median inactive) break duration per
    developer, restricted to developers who completed at least one break of
    each kind."""
    by_org: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
    for trace in sorted(traces, key=lambda t: (t.org_id, t.developer_key)):
        noncoding = [
            s.duration_days for s in _completed_segments(trace, State.ACTIVE_NON_CODING)
        ]
        inactive = [
            s.duration_days for s in _completed_segments(trace, State.INACTIVE)
        ]
        if noncoding and inactive:
            by_org[trace.org_id].append(
                (median_fraction(noncoding), median_fraction(inactive))
            )
    return dict(by_org)


@dataclass(frozen=True)
class PairedTestResult:
    org: str
    n_pairs: int
    n_effective: int
    w_statistic: Fraction | None  # W+: rank sum of positive (noncoding - inactive) diffs
    p_raw: Fraction | float | None
    p_adjusted: Fraction | float | None
    cliffs_delta: Fraction | None
    magnitude: str | None
    applicable: bool


def wilcoxon_holm_cliffs(
    samples_by_org: Mapping[str, Sequence[tuple]],
) -> list[PairedTestResult]:
    """Paired Wilcoxon tests per org with Holm correction across orgs and
    Cliff's delta over all cross pairs of the two duration samples.

    Orgs whose pairs all tie (or with no pairs at all) are reported as
    not applicable and excluded from the correction family.
    """
    partial = []
    for org in sorted(samples_by_org):
        pairs = list(samples_by_org[org])
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        test = wilcoxon_signed_rank(xs, ys) if pairs else None
        if test is None:
            partial.append((org, len(pairs), None, None, None))
        else:
            delta = cliffs_delta(xs, ys)
            partial.append((org, len(pairs), test, delta, delta_magnitude(delta)))

    testable = [row for row in partial if row[2] is not None]
    adjusted = holm_bonferroni([row[2].p_value for row in testable])
    adjusted_by_org = {row[0]: adj for row, adj in zip(testable, adjusted)}

    results = []
    for org, n_pairs, test, delta, magnitude in partial:
        if test is None:
            results.append(
                PairedTestResult(org, n_pairs, 0, None, None, None, None, None, False)
            )
        else:
            results.append(
                PairedTestResult(
                    org=org,
                    n_pairs=n_pairs,
                    n_effective=test.n_effective,
                    w_statistic=test.w_plus,
                    p_raw=test.p_value,
                    p_adjusted=adjusted_by_org[org],
                    cliffs_delta=delta,
                    magnitude=magnitude,
                    applicable=True,
                )
            )
    return results


def assign_contribution_levels(
    shares: Mapping[str, Mapping[str, Fraction]],
) -> dict[str, str]:
    """Split each project's developers at the median share into low/high.

    ``shares`` maps project -> developer -> contribution share. Developers
    at or below the median land in ``low``; strictly above in ``high``.
    """
    levels: dict[str, str] = {}
    for project in sorted(shares):
        devs = shares[project]
        if not devs:
            continue
        cut = median_fraction(list(devs.values()))
        for dev, share in devs.items():
            levels[dev] = "high" if share > cut else "low"
    return levels


def gone_odds_ratio(
    rows: Sequence[tuple[str, bool]], tolerance: float = 1e-6
) -> OddsRatioResult:
    """Odds ratio of ever turning gone for high- vs low-level contributors.

    ``rows`` holds (contribution level, ever gone) per developer. The
    contingency odds ratio and the logistic-regression coefficient must
    agree; a mismatch beyond ``tolerance`` raises, since the two paths are
    mathematically identical for a single binary predictor.
    """
    cells = {("high", True): 0, ("high", False): 0, ("low", True): 0, ("low", False): 0}
    for level, ever_gone in rows:
        if level not in ("high", "low"):
            raise ValueError(f"unknown contribution level {level!r}")
        cells[(level, bool(ever_gone))] += 1
    if cells[("high", True)] + cells[("high", False)] == 0:
        raise ValueError("no developers in the high bin")
    if cells[("low", True)] + cells[("low", False)] == 0:
        raise ValueError("no developers in the low bin")

    result = odds_ratio_2x2(
        cells[("high", True)],
        cells[("high", False)],
        cells[("low", True)],
        cells[("low", False)],
    )
    correction = 0.5 if result.corrected else 0.0
    _, coef = logistic_fit_2x2(
        cells[("high", True)] + correction,
        cells[("high", False)] + correction,
        cells[("low", True)] + correction,
        cells[("low", False)] + correction,
    )
    if abs(math.exp(coef) - result.or_value) > tolerance * max(1.0, result.or_value):
        raise ConsistencyError(
            f"logistic OR {math.exp(coef)} disagrees with contingency OR "
            f"{result.or_value}"
        )
    return result
