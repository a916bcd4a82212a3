"""Find one item whose feature vector differs from item 1's."""

import math
from dataclasses import dataclass, field

from .csh import CshParams, compare_sequential_halving, min_budget
from .errors import DomainError


@dataclass(frozen=True)
class TraceRecord:
    k: int
    halving_steps: int
    pair: tuple
    csh_budget: int
    statistic: float
    threshold: float


@dataclass
class DetectOutcome:
    candidate: int
    k_final: int
    budget_spent: int
    trace: list = field(default_factory=list)


def check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def l_max(n, d, delta):
    """Largest number of halving steps tried per budget level."""
    check_delta(delta)
    if n < 2 or d < 1:
        raise DomainError("need n >= 2 and d >= 1")
    return math.ceil(math.log2(16.0 * d * n * math.log(4.0 * math.log(8.0 * n * d) / delta)))


def detection_threshold(k, delta):
    """Hoeffding threshold on the sum of ``2^k`` paired differences."""
    return math.sqrt(4.0 * 2**k * math.log(k**3 / (0.15 * delta)))


def halving_schedule(k, cap):
    """Halving steps ``L <= cap`` whose minimal budget fits in ``2^(k+1)``."""
    budget = 2 ** (k + 1)
    L = 1
    while L <= cap and min_budget(L) <= budget:
        yield L
        L += 1


def candidate_row(env, delta, rng):
    """Return an item that, with probability at least ``1 - delta``, is not in item 1's group.

    Budget levels ``2^(k+1)`` double until a halving run on items ``2..n``
    proposes a pair whose fresh paired sum clears the Hoeffding threshold.
    Raises ``BudgetExhausted`` if the environment cap is hit first.
    """
    check_delta(delta)
    n = env.n
    cap = l_max(n, env.d, delta)
    items = tuple(range(2, n + 1))
    start = env.budget
    trace = []
    k = 1
    while True:
        m = 2**k
        threshold = detection_threshold(k, delta)
        for L in halving_schedule(k, cap):
            res = compare_sequential_halving(env, CshParams(items, L, 2 * m), rng)
            i_hat, j_hat = res.pair
            stat = abs(
                float(env.sample_sums([i_hat], [j_hat], m)[0] - env.sample_sums([1], [j_hat], m)[0])
            )
            trace.append(TraceRecord(k, L, res.pair, res.budget_spent, stat, threshold))
            if stat > threshold:
                return DetectOutcome(i_hat, k, env.budget - start, trace)
        k += 1
