import math

import numpy as np
import pytest

from banditclust.env import Environment, NoiseModel, ProblemInstance, balanced_labels, minority_labels


def binomial_slack(p, trials):
    """Three standard deviations of an empirical frequency."""
    return 3.0 * math.sqrt(p * (1.0 - p) / trials)


def sparse_gap(d, support, value):
    gap = np.zeros(d)
    gap[:support] = value
    return gap


@pytest.fixture
def tiny_instance():
    return ProblemInstance.from_gap([1.0], [0, 1])


@pytest.fixture
def zero_env(tiny_instance):
    return Environment(tiny_instance, NoiseModel.zero(), 0)


def make_instance(d, support, value, n, minority=None):
    labels = balanced_labels(n) if minority is None else minority_labels(n, minority)
    return ProblemInstance.from_shift(sparse_gap(d, support, value), labels)
