"""Adaptive two-group clustering of items from single-entry noisy queries."""

from .baseline import uniform_kmeans
from .bounds import (
    bounds_report,
    complexity_h,
    corollary1_bound,
    effective_sparsity,
    lower_bound_quantile,
    sandwich_check,
)
from .classify import cluster_by_candidates, tilde_l_max
from .csh import CshParams, compare_sequential_halving, lemma1_budget, lemma1_halving_steps
from .detect import candidate_row, l_max
from .env import (
    Environment,
    NoiseModel,
    ProblemInstance,
    QueryLedger,
    balancedness,
    gap_vector,
    ordered_gaps,
)
from .errors import BudgetExhausted
from .pipeline import bandit_clustering

__all__ = [
    "BudgetExhausted",
    "CshParams",
    "Environment",
    "NoiseModel",
    "ProblemInstance",
    "QueryLedger",
    "balancedness",
    "bandit_clustering",
    "bounds_report",
    "candidate_row",
    "cluster_by_candidates",
    "compare_sequential_halving",
    "complexity_h",
    "corollary1_bound",
    "effective_sparsity",
    "gap_vector",
    "l_max",
    "lemma1_budget",
    "lemma1_halving_steps",
    "lower_bound_quantile",
    "ordered_gaps",
    "sandwich_check",
    "tilde_l_max",
    "uniform_kmeans",
]
