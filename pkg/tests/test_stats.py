from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from devbreaks.stats import (
    average_ranks,
    cliffs_delta,
    delta_magnitude,
    holm_bonferroni,
    logistic_fit_2x2,
    median_fraction,
    odds_ratio_2x2,
    tukey_hinges,
    wilcoxon_signed_rank,
)


# -------------------------------------------------------------- wilcoxon


def enumeration_p(x, y, alternative):
    """Null distribution of W+ by brute force over all 2^n sign patterns."""
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


def test_all_zero_differences_not_applicable():
    assert wilcoxon_signed_rank([1, 2, 3], [1, 2, 3]) is None


def test_one_sided_lower_tail_example():
    result = wilcoxon_signed_rank([1, 2, 3], [2, 4, 6], alternative="less")
    assert result.w_plus == 0
    assert result.p_value == Fraction(1, 8)


def test_exact_matches_enumeration_on_random_samples():
    rng = random.Random(42)
    checked = 0
    for _ in range(550):
        n = rng.randint(1, 10)
        x = [rng.randint(0, 8) for _ in range(n)]
        y = [rng.randint(0, 8) for _ in range(n)]
        for alternative in ("two-sided", "less", "greater"):
            mine = wilcoxon_signed_rank(x, y, alternative)
            if mine is None:
                assert all(a == b for a, b in zip(x, y))
                continue
            assert mine.exact
            assert mine.p_value == enumeration_p(x, y, alternative)
            checked += 1
    assert checked >= 500


def test_normal_approximation_close_to_exact_at_the_switch():
    rng = random.Random(7)
    x = [rng.randint(0, 100) for _ in range(26)]
    y = [rng.randint(0, 100) for _ in range(26)]
    approx = wilcoxon_signed_rank(x, y)
    exact = wilcoxon_signed_rank(x, y, exact_limit=30)
    assert not approx.exact and exact.exact
    assert approx.p_value == pytest.approx(float(exact.p_value), abs=0.02)


# -------------------------------------------------------------- holm


def test_holm_worked_example():
    assert holm_bonferroni([0.01, 0.03, 0.04]) == [0.03, 0.06, 0.06]


def test_holm_keeps_input_order():
    assert holm_bonferroni([0.04, 0.01, 0.03]) == [0.06, 0.03, 0.06]


@given(st.lists(st.fractions(min_value=0, max_value=1), min_size=1, max_size=12))
def test_holm_matches_stepdown_definition(ps):
    adjusted = holm_bonferroni(ps)
    m = len(ps)
    order = sorted(range(m), key=lambda i: ps[i])
    expected = {}
    for rank, i in enumerate(order):
        candidates = [(m - r) * ps[order[r]] for r in range(rank + 1)]
        expected[i] = min(1, max(candidates))
    assert adjusted == [expected[i] for i in range(m)]
    for i in range(m):
        assert adjusted[i] >= ps[i]
    in_order = [adjusted[i] for i in order]
    assert in_order == sorted(in_order)


# -------------------------------------------------------------- cliff


def test_cliffs_delta_complete_dominance():
    delta = cliffs_delta([1, 2, 3], [4, 5, 6])
    assert delta == -1
    assert delta_magnitude(delta) == "large"


@pytest.mark.parametrize(
    "delta,expected",
    [
        (Fraction(1, 10), "negligible"),
        (Fraction(147, 1000), "small"),
        (Fraction(3, 10), "small"),
        (Fraction(33, 100), "medium"),
        (Fraction(473, 1000), "medium"),
        (Fraction(474, 1000), "large"),
        (Fraction(-9, 10), "large"),
    ],
)
def test_delta_magnitude_thresholds(delta, expected):
    assert delta_magnitude(delta) == expected


@given(
    st.lists(st.integers(min_value=-20, max_value=20), min_size=1, max_size=25),
    st.lists(st.integers(min_value=-20, max_value=20), min_size=1, max_size=25),
)
def test_cliffs_delta_matches_pairwise_count(xs, ys):
    greater = sum(1 for x in xs for y in ys if x > y)
    less = sum(1 for x in xs for y in ys if x < y)
    assert cliffs_delta(xs, ys) == Fraction(greater - less, len(xs) * len(ys))


# -------------------------------------------------------------- quartiles


def test_tukey_hinges_examples():
    assert tukey_hinges([3, 5, 7, 9, 120]) == (5, 9)
    assert tukey_hinges([1, 2, 3, 50]) == (Fraction(3, 2), Fraction(53, 2))
    assert median_fraction([1, 2]) == Fraction(3, 2)


# -------------------------------------------------------------- odds ratio


def test_odds_ratio_closed_form():
    result = odds_ratio_2x2(50, 150, 100, 100)
    assert result.or_value == pytest.approx(1 / 3, rel=1e-12)
    assert result.significant
    assert not result.corrected


def test_odds_ratio_identical_bins_is_one():
    result = odds_ratio_2x2(10, 10, 10, 10)
    assert result.or_value == pytest.approx(1.0, rel=1e-12)
    assert result.ci_low < 1 < result.ci_high
    assert not result.significant


def test_odds_ratio_zero_cell_corrected():
    result = odds_ratio_2x2(0, 20, 10, 10)
    assert result.corrected
    expected = (0.5 * 10.5) / (20.5 * 10.5)
    assert result.or_value == pytest.approx(expected, rel=1e-12)
    assert result.or_value < 1


def test_logistic_agrees_with_contingency_or():
    rng = random.Random(3)
    for _ in range(50):
        a, b, c, d = (rng.randint(1, 200) for _ in range(4))
        table_or = odds_ratio_2x2(a, b, c, d).or_value
        _, coef = logistic_fit_2x2(a, b, c, d)
        assert math.exp(coef) == pytest.approx(table_or, rel=1e-9)


def test_logistic_intercept_is_control_odds():
    b0, _ = logistic_fit_2x2(30, 70, 40, 60)
    assert math.exp(b0) == pytest.approx(40 / 60, rel=1e-9)
