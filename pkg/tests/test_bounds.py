import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from banditclust.bounds import (
    bounds_report,
    complexity_h,
    corollary1_bound,
    effective_sparsity,
    lower_bound_quantile,
    sandwich_check,
    s_tilde,
    two_valued,
)
from banditclust.errors import DomainError, ZeroGap
from banditclust.harness import exp1_gap_grid


def naive_s_star(gap):
    g = sorted((abs(x) for x in gap), reverse=True)
    best, arg = -1.0, None
    for s in range(1, len(g) + 1):
        v = s * g[s - 1] ** 2
        if v > best:
            best, arg = v, s
    return arg


@pytest.mark.parametrize(
    "gap,s",
    [([2, 1], 1), ([2, 2, 1], 2), ([5] * 10 + [0] * 90, 10), ([0, -3, 1], 1)],
)
def test_effective_sparsity_examples(gap, s):
    assert effective_sparsity(gap) == s


def test_zero_gap_rejected():
    for fn in (effective_sparsity, sandwich_check):
        with pytest.raises(ZeroGap):
            fn(np.zeros(4))


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(1, 64), elements=st.floats(-10, 10, allow_subnormal=False)))
def test_effective_sparsity_matches_scan(gap):
    if not np.any(gap):
        return
    assert effective_sparsity(gap) == naive_s_star(gap)


def test_sandwich_d1_edge():
    left, mid, right = sandwich_check([1.0])
    assert (left, mid) == (1.0, 1.0)
    assert right == pytest.approx(math.log(2))
    assert right < mid


def test_sandwich_equal_entries():
    left, mid, _ = sandwich_check(np.full(7, 0.3))
    assert left == pytest.approx(mid)


def test_sandwich_random_gaussian():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        left, mid, right = sandwich_check(rng.standard_normal(50))
        assert left <= mid <= right


def test_complexity_hand_value():
    assert complexity_h([1.0], 0.5, 2, 1) == pytest.approx(10.0)


def test_complexity_along_exp1_grid():
    # On the grid the support value is 15/sqrt(s), so the min over the support
    # sits at s itself: (d/s + n)(s/225 + 1), smallest near s = sqrt(225 d / n).
    d, n, theta = 1000, 20, 0.5
    rows = []
    for _, s, gap in exp1_gap_grid(d):
        total = complexity_h(gap, theta, n, d)
        assert effective_sparsity(gap) == s
        first = (d / theta) * (1 / 225.0 + 1 / s)
        second = total - first
        assert second == pytest.approx((d / s + n) * (s / 225.0 + 1.0))
        rows.append((s, second))
    turn = math.sqrt(225 * d / n)
    tail = [v for s, v in rows if s >= turn]
    assert len(tail) == 17
    assert all(a <= b for a, b in zip(tail, tail[1:]))
    assert rows[0][1] > rows[1][1]


def test_complexity_homogeneity():
    gap = np.array([0.1, 0.1, 0.05, 0.0])
    n, theta, d = 10, 0.3, 4
    base = complexity_h(gap, theta, n, d)
    double = complexity_h(2 * gap, theta, n, d)
    s_star = effective_sparsity(gap)
    sq = float(gap @ gap)
    # Separate the 1/||Delta||^2 and 1/Delta_(s)^2 pieces from the constant ones.
    g = np.sort(np.abs(gap))[::-1][:3]
    s = np.arange(1, 4)

    def pieces(scale):
        detect_scaled = (d / theta) / (scale**2 * sq)
        classify = np.min((d / s + n) * (1 / (scale * g) ** 2 + 1))
        return detect_scaled + (d / theta) / s_star + classify

    assert base == pytest.approx(pieces(1))
    assert double == pytest.approx(pieces(2))
    # Argmin stays put, so the scaled contributions shrink by exactly 4.
    scaled_1 = (d / theta) / sq + np.min((d / s + n) / g**2)
    scaled_2 = (d / theta) / (4 * sq) + np.min((d / s + n) / (2 * g) ** 2)
    assert scaled_2 == pytest.approx(scaled_1 / 4)


def test_complexity_theta_domain():
    with pytest.raises(DomainError):
        complexity_h([1.0], 0.6, 2, 1)


def test_lower_bound_boundary():
    delta = 1 / 4.8
    gap = np.array([1.0, 0.0])
    expected = 2 * 2 / (1 / 3 * 1.0) * math.log(1 / (6 * delta))
    assert lower_bound_quantile(gap, 1 / 3, 3, 2, delta) == pytest.approx(max(0.0, expected))


def test_lower_bound_high_precision():
    mpmath.mp.dps = 40
    gap = np.zeros(1000)
    gap[0] = 15
    t1 = 2 * mpmath.mpf(18) / 225 * mpmath.log(1 / (mpmath.mpf("4.8") * mpmath.mpf("0.1")))
    t2 = 2 * mpmath.mpf(1000) / (mpmath.mpf("0.5") * 225) * mpmath.log(1 / (6 * mpmath.mpf("0.1")))
    assert lower_bound_quantile(gap, 0.5, 20, 1000, 0.1) == pytest.approx(float(max(t1, t2)), rel=1e-12)


def test_lower_bound_monotone_and_domain():
    gap = np.array([0.5, 0.2, 0.0])
    values = [lower_bound_quantile(gap, 0.25, 8, 3, float(x)) for x in np.linspace(0.005, 0.2, 40)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    with pytest.raises(DomainError):
        lower_bound_quantile(gap, 0.25, 8, 3, 0.25)
    with pytest.raises(DomainError):
        lower_bound_quantile(gap, 0.5, 2, 3, 0.1)


def test_corollary_examples():
    assert corollary1_bound(0.5, 0.5, 10, 100, 4) == pytest.approx(240.0)
    d, h, theta = 50, 0.4, 0.5
    first = corollary1_bound(h, theta, 7, d, d) - 7 / h**2
    assert first == pytest.approx(1 / (theta * h**2))
    with pytest.raises(DomainError):
        corollary1_bound(1.0, 0.5, 10, 100, 4)


def test_corollary_tracks_complexity():
    d, n, theta = 1000, 20, 0.5
    for _, s, gap in exp1_gap_grid(d):
        h = 15 / math.sqrt(s)
        if h >= 1:
            continue
        ratio = corollary1_bound(h, theta, n, d, s) / complexity_h(gap, theta, n, d)
        assert 0.25 <= ratio <= 4


def test_report_fields():
    gap = np.zeros(100)
    gap[:4] = 0.5
    rep = bounds_report(gap, 0.5, 10, 100, 0.1)
    assert rep.corollary_bound == pytest.approx(240.0)
    assert rep.s_star == 4
    assert rep.sandwich[0] <= rep.sandwich[1] <= rep.sandwich[2]
    assert rep.s_tilde == s_tilde(gap, 10) == max(4, min(10, 4))
    assert two_valued([0.0, 2.0, 3.0]) is None
    assert bounds_report([1.0], 0.5, 2, 1).lb_quantile is None
