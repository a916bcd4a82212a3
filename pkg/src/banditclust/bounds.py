"""Closed-form complexity and lower-bound formulas.

All logarithms are natural. None of these include the unspecified
polylogarithmic constants of the upper bound.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .env import ordered_gaps
from .errors import DomainError, ZeroGap


@dataclass
class BoundsReport:
    h_complexity: float
    s_star: int
    s_tilde: int
    sandwich: tuple
    lb_quantile: float | None
    corollary_bound: float | None

    def to_dict(self):
        out = asdict(self)
        out["sandwich"] = list(self.sandwich)
        return out


def _sorted_nonzero(gap):
    g = ordered_gaps(gap)
    if g.size == 0 or g[0] == 0.0:
        raise ZeroGap("gap vector must have a nonzero entry")
    return g


def sparsity_profile(gap):
    """``s * Delta_(s)^2`` for ``s = 1..d``."""
    g = _sorted_nonzero(gap)
    return np.arange(1, g.size + 1) * g**2


def effective_sparsity(gap):
    """Smallest ``s`` maximizing ``s * Delta_(s)^2``."""
    return int(np.argmax(sparsity_profile(gap))) + 1


def sandwich_check(gap, d=None):
    """``(max_s s*Delta_(s)^2, ||Delta||^2, log(2d) * max_s s*Delta_(s)^2)``.

    The right inequality is only claimed for ``d >= 2``; at ``d = 1`` the
    factor ``log 2 < 1`` breaks it and nothing is asserted.
    """
    gap = np.asarray(gap, dtype=float)
    d = gap.size if d is None else d
    left = float(sparsity_profile(gap).max())
    mid = float(np.dot(gap, gap))
    right = math.log(2 * d) * left
    slack = 1e-9 * max(1.0, mid)
    assert left <= mid + slack
    if d >= 2:
        assert mid <= right + slack
    return left, mid, right


def complexity_h(gap, theta, n, d=None):
    """Instance complexity without log factors.

    ``(d/theta)(1/||Delta||^2 + 1/s*) + min_s (d/s + n)(1/Delta_(s)^2 + 1)``
    with the min over the support of ``Delta``.
    """
    gap = np.asarray(gap, dtype=float)
    d = gap.size if d is None else d
    if not 1.0 / n <= theta <= 0.5:
        raise DomainError(f"theta must lie in [1/n, 1/2], got {theta}")
    g = _sorted_nonzero(gap)
    support = g[g > 0]
    s = np.arange(1, support.size + 1)
    detect = (d / theta) * (1.0 / float(np.dot(gap, gap)) + 1.0 / effective_sparsity(gap))
    classify = float(np.min((d / s + n) * (1.0 / support**2 + 1.0)))
    return detect + classify


def s_tilde(gap, n, d=None):
    """Index used only inside the log factor of the upper bound; informational."""
    gap = np.asarray(gap, dtype=float)
    d = gap.size if d is None else d
    support = int(np.count_nonzero(gap))
    return max(effective_sparsity(gap), min(math.ceil(d / n), support))


def lower_bound_quantile(gap, theta, n, d=None, delta=0.1):
    """Budget that any delta-correct algorithm exceeds with probability at least delta."""
    gap = np.asarray(gap, dtype=float)
    d = gap.size if d is None else d
    if not 0.0 < delta < 0.25:
        raise DomainError(f"delta must lie in (0, 1/4), got {delta}")
    if n < 3:
        raise DomainError("the lower bound needs n >= 3")
    g = _sorted_nonzero(gap)
    items_term = 2.0 * (n - 2) / g[0] ** 2 * math.log(1.0 / (4.8 * delta))
    detect_term = 2.0 * d / (theta * float(np.dot(gap, gap))) * math.log(1.0 / (6.0 * delta))
    return max(items_term, detect_term)


def corollary1_bound(h, theta, n, d, support):
    """``d / (theta ||Delta||^2) + n / h^2`` for a gap vector in ``{0, h}^d``."""
    if not 0.0 < h < 1.0:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    if not 1 <= support <= d:
        raise DomainError("support size must lie in [1, d]")
    return d / (theta * support * h**2) + n / h**2


def two_valued(gap):
    """``(h, support)`` if ``|Delta|`` takes only the values 0 and h, else None."""
    a = np.abs(np.asarray(gap, dtype=float))
    nz = a[a > 0]
    if nz.size == 0 or not np.all(nz == nz[0]):
        return None
    return float(nz[0]), int(nz.size)


def bounds_report(gap, theta, n, d=None, delta=None):
    gap = np.asarray(gap, dtype=float)
    d = gap.size if d is None else d
    lb = None
    if delta is not None and 0.0 < delta < 0.25 and n >= 3:
        lb = lower_bound_quantile(gap, theta, n, d, delta)
    cor = None
    tv = two_valued(gap)
    if tv is not None and tv[0] < 1.0:
        cor = corollary1_bound(tv[0], theta, n, d, tv[1])
    return BoundsReport(
        h_complexity=complexity_h(gap, theta, n, d),
        s_star=effective_sparsity(gap),
        s_tilde=s_tilde(gap, n, d),
        sandwich=sandwich_check(gap, d),
        lb_quantile=lb,
        corollary_bound=cor,
    )
