"""Nonparametric statistics used by the reporting stage.

Everything that can be exact is exact: quartiles are Tukey hinges computed
with rational arithmetic, the Wilcoxon signed-rank p-value is the exact
tail probability (a subset-sum count over rank assignments) up to
EXACT_LIMIT pairs, and Cliff's delta is a rational pair count. Beyond
EXACT_LIMIT the Wilcoxon test switches to the normal approximation with
tie correction and a continuity correction.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

EXACT_LIMIT = 25

_NORMAL = NormalDist()
Z_95 = _NORMAL.inv_cdf(0.975)


def median_fraction(values: Sequence) -> Fraction:
    if not values:
        raise ValueError("median of empty sequence")
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return Fraction(ordered[mid])
    return Fraction(ordered[mid - 1] + ordered[mid], 2)


def tukey_hinges(values: Sequence) -> tuple[Fraction, Fraction]:
    """Lower and upper hinge (fourths): medians of the two halves of the
    sorted data, with the median itself included in both halves when the
    sample size is odd."""
    if not values:
        raise ValueError("hinges of empty sequence")
    ordered = sorted(values)
    n = len(ordered)
    half = (n + 1) // 2
    return median_fraction(ordered[:half]), median_fraction(ordered[n - half:])


def average_ranks(values: Sequence) -> list[Fraction]:
    """Ranks 1..n in input order, ties sharing the average of their ranks."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks: list[Fraction] = [Fraction(0)] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = Fraction(i + 1 + j + 1, 2)
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


@dataclass(frozen=True)
class WilcoxonResult:
    w_plus: Fraction
    n_effective: int
    p_value: Fraction | float
    exact: bool


def _signed_rank_counts(doubled_ranks: Sequence[int]) -> list[int]:
    """Number of sign assignments reaching each possible doubled rank sum."""
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        for s in range(total, r - 1, -1):
            if counts[s - r]:
                counts[s] += counts[s - r]
    return counts


def wilcoxon_signed_rank(
    x: Sequence,
    y: Sequence,
    alternative: str = "two-sided",
    exact_limit: int = EXACT_LIMIT,
) -> WilcoxonResult | None:
    """Paired signed-rank test on differences x - y.

    Zero differences are dropped; tied absolute differences share average
    ranks. Returns None when no nonzero differences remain. The statistic
    is W+, the rank sum of positive differences. ``alternative`` is
    ``two-sided``, ``less`` (small W+ extreme) or ``greater``.
    """
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    diffs = [Fraction(a) - Fraction(b) for a, b in zip(x, y) if a != b]
    if not diffs:
        return None
    n = len(diffs)
    abs_diffs = [abs(d) for d in diffs]
    ranks = average_ranks(abs_diffs)
    w_plus = sum((r for d, r in zip(diffs, ranks) if d > 0), Fraction(0))

    if n <= exact_limit:
        doubled = [int(2 * r) for r in ranks]
        counts = _signed_rank_counts(doubled)
        total = 2**n
        w2 = int(2 * w_plus)
        lower = Fraction(sum(counts[: w2 + 1]), total)
        upper = Fraction(sum(counts[w2:]), total)
        if alternative == "less":
            p: Fraction | float = lower
        elif alternative == "greater":
            p = upper
        else:
            p = min(Fraction(1), 2 * min(lower, upper))
        return WilcoxonResult(w_plus, n, p, exact=True)

    mean = Fraction(n * (n + 1), 4)
    tie_term = Fraction(0)
    seen: dict[Fraction, int] = {}
    for d in abs_diffs:
        seen[d] = seen.get(d, 0) + 1
    for t in seen.values():
        tie_term += Fraction(t**3 - t, 48)
    variance = Fraction(n * (n + 1) * (2 * n + 1), 24) - tie_term
    sd = math.sqrt(float(variance))
    # Continuity correction pulls the statistic half a step toward the mean.
    if w_plus > mean:
        z = (float(w_plus - mean) - 0.5) / sd
    elif w_plus < mean:
        z = (float(w_plus - mean) + 0.5) / sd
    else:
        z = 0.0
    if alternative == "less":
        p = _NORMAL.cdf(z)
    elif alternative == "greater":
        p = 1.0 - _NORMAL.cdf(z)
    else:
        p = min(1.0, 2.0 * (1.0 - _NORMAL.cdf(abs(z))))
    return WilcoxonResult(w_plus, n, p, exact=False)


def holm_bonferroni(p_values: Sequence) -> list:
    """Step-down Holm adjustment, monotone and capped at 1, input order kept."""
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [None] * m
    running = 0
    for rank, i in enumerate(order):
        candidate = (m - rank) * p_values[i]
        running = max(running, candidate)
        adjusted[i] = min(1, running)
    return adjusted


def cliffs_delta(xs: Sequence, ys: Sequence) -> Fraction:
    """(#(x > y) - #(x < y)) / (n * m) over all cross pairs."""
    if not xs or not ys:
        raise ValueError("cliffs_delta needs non-empty samples")
    sorted_ys = sorted(ys)
    greater = 0
    less = 0
    for x in xs:
        greater += bisect_left(sorted_ys, x)
        less += len(sorted_ys) - bisect_right(sorted_ys, x)
    return Fraction(greater - less, len(xs) * len(ys))


DELTA_NEGLIGIBLE = Fraction(147, 1000)
DELTA_SMALL = Fraction(330, 1000)
DELTA_MEDIUM = Fraction(474, 1000)


def delta_magnitude(delta: Fraction | float) -> str:
    size = abs(Fraction(delta))
    if size < DELTA_NEGLIGIBLE:
        return "negligible"
    if size < DELTA_SMALL:
        return "small"
    if size < DELTA_MEDIUM:
        return "medium"
    return "large"


@dataclass(frozen=True)
class OddsRatioResult:
    n: int
    or_value: float
    ci_low: float
    ci_high: float
    significant: bool
    corrected: bool  # 0.5 added to every cell because one was zero
    intercept_or: float  # baseline odds of the reference group


def odds_ratio_2x2(
    exposed_pos: int, exposed_neg: int, control_pos: int, control_neg: int
) -> OddsRatioResult:
    """Odds ratio (exposed vs control) with a 95% Wald interval on log-OR.

    A zero cell triggers the Haldane-Anscombe 0.5 correction on all cells,
    flagged in the result.
    """
    n = exposed_pos + exposed_neg + control_pos + control_neg
    cells = [exposed_pos, exposed_neg, control_pos, control_neg]
    corrected = any(c == 0 for c in cells)
    a, b, c, d = ((v + 0.5 for v in cells) if corrected else cells)
    or_value = (a * d) / (b * c)
    se = math.sqrt(1 / a + 1 / b + 1 / c + 1 / d)
    log_or = math.log(or_value)
    ci_low = math.exp(log_or - Z_95 * se)
    ci_high = math.exp(log_or + Z_95 * se)
    return OddsRatioResult(
        n=n,
        or_value=or_value,
        ci_low=ci_low,
        ci_high=ci_high,
        significant=not (ci_low <= 1.0 <= ci_high),
        corrected=corrected,
        intercept_or=c / d,
    )


def logistic_fit_2x2(
    exposed_pos: float, exposed_neg: float, control_pos: float, control_neg: float
) -> tuple[float, float]:
    """Newton-Raphson fit of logit(p) = b0 + b1*exposed on aggregated counts.

    Returns (b0, b1); exp(b1) is the fitted odds ratio. Counts may be
    fractional (corrected tables).
    """
    groups = [
        (0.0, control_pos, control_pos + control_neg),
        (1.0, exposed_pos, exposed_pos + exposed_neg),
    ]
    b0 = 0.0
    b1 = 0.0
    for _ in range(50):
        g0 = g1 = 0.0
        h00 = h01 = h11 = 0.0
        for x, pos, total in groups:
            eta = b0 + b1 * x
            p = 1.0 / (1.0 + math.exp(-eta))
            w = total * p * (1.0 - p)
            resid = pos - total * p
            g0 += resid
            g1 += resid * x
            h00 += w
            h01 += w * x
            h11 += w * x * x
        det = h00 * h11 - h01 * h01
        if det == 0:
            break
        step0 = (h11 * g0 - h01 * g1) / det
        step1 = (h00 * g1 - h01 * g0) / det
        b0 += step0
        b1 += step1
        if abs(step0) < 1e-12 and abs(step1) < 1e-12:
            break
    return b0, b1
