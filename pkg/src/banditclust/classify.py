"""Label every item using one discriminative feature found from a candidate row."""

import math
from dataclasses import dataclass

import numpy as np

from .csh import CshParams, compare_sequential_halving
from .detect import check_delta, halving_schedule


@dataclass
class ClassifyOutcome:
    labels: np.ndarray
    chosen_feature: int
    k_final: int
    budget_spent: int
    epsilon_final: float
    d_hat: float
    attempts: int = 0
    labeling_budget: int = 0


def tilde_l_max(d, delta):
    check_delta(delta)
    return math.ceil(math.log2(16.0 * d * math.log(4.0 * math.log(8.0 * d) / delta)))


def classification_epsilon(m, n, k, delta):
    return math.sqrt(4.0 * m * math.log(n * k**3 / (0.15 * delta)))


def first_level(n):
    """Smallest ``k`` with ``2^k >= n``."""
    return (n - 1).bit_length()


def cluster_by_candidates(env, delta, candidate, rng):
    """Recover all labels given an item ``candidate`` outside item 1's group.

    For each budget level ``2^(k+1)`` (starting at ``2^k >= n``), halving on
    the candidate row proposes a feature; ``m = floor(2^k / n)`` paired draws
    estimate its gap. Once the estimate clears ``3 * eps`` every item is
    labeled from ``m`` fresh paired draws on that feature with threshold
    ``eps``. With a wrong candidate this never stops on its own; the
    environment cap turns that into ``BudgetExhausted``.
    """
    check_delta(delta)
    n, d = env.n, env.d
    cap = tilde_l_max(d, delta)
    start = env.budget
    others = np.arange(2, n + 1)
    attempts = 0
    k = first_level(n)
    while True:
        m = 2**k // n
        assert m >= 1
        eps = classification_epsilon(m, n, k, delta)
        for L in halving_schedule(k, cap):
            res = compare_sequential_halving(env, CshParams((candidate,), L, 2 ** (k + 1)), rng)
            i_hat, j_hat = res.pair
            assert i_hat == candidate
            attempts += 1
            d_hat = float(
                env.sample_sums([candidate], [j_hat], m)[0] - env.sample_sums([1], [j_hat], m)[0]
            )
            if abs(d_hat) < 3.0 * eps:
                continue
            before = env.budget
            feature = np.full(others.size, j_hat)
            diffs = env.sample_sums(others, feature, m) - env.sample_sums(
                np.ones_like(others), feature, m
            )
            labels = np.zeros(n, dtype=np.int8)
            labels[1:] = np.abs(diffs) >= eps
            return ClassifyOutcome(
                labels=labels,
                chosen_feature=j_hat,
                k_final=k,
                budget_spent=env.budget - start,
                epsilon_final=eps,
                d_hat=d_hat,
                attempts=attempts,
                labeling_budget=env.budget - before,
            )
        k += 1
