"""Full two-stage clustering: find a candidate row, then label by one feature."""

from dataclasses import dataclass

import numpy as np

from .bounds import complexity_h
from .classify import cluster_by_candidates
from .detect import candidate_row, check_delta
from .env import DEFAULT_CAP, balancedness, gap_vector
from .errors import BudgetExhausted

CAP_MULTIPLIER = 64


@dataclass
class PipelineOutcome:
    labels: np.ndarray | None
    budget_total: int
    budget_detect: int
    budget_classify: int
    emergency_stopped: bool
    candidate: int | None = None
    chosen_feature: int | None = None

    def correct(self, truth):
        return self.labels is not None and bool(np.array_equal(self.labels, truth))


def default_cap(instance=None, multiplier=CAP_MULTIPLIER):
    """Emergency-stop cap: a multiple of the instance complexity when it is known."""
    if instance is None:
        return DEFAULT_CAP
    h = complexity_h(gap_vector(instance), balancedness(instance.labels), instance.n)
    return int(min(DEFAULT_CAP, max(1, round(multiplier * h))))


def bandit_clustering(env, delta, rng, detect=candidate_row, classify=cluster_by_candidates):
    """Run detection and classification at confidence ``delta / 2`` each.

    A ``BudgetExhausted`` from either stage is absorbed into an outcome with
    ``emergency_stopped=True`` and no labels.
    """
    check_delta(delta)
    start = env.budget
    half = delta / 2
    candidate = mid = None
    try:
        candidate = detect(env, half, rng).candidate
        mid = env.budget
        result = classify(env, half, candidate, rng)
    except BudgetExhausted:
        if mid is None:
            mid = env.budget
        return PipelineOutcome(
            labels=None,
            budget_total=env.budget - start,
            budget_detect=mid - start,
            budget_classify=env.budget - mid,
            emergency_stopped=True,
            candidate=candidate,
        )
    return PipelineOutcome(
        labels=result.labels,
        budget_total=env.budget - start,
        budget_detect=mid - start,
        budget_classify=env.budget - mid,
        emergency_stopped=False,
        candidate=candidate,
        chosen_feature=result.chosen_feature,
    )
