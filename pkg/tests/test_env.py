import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditclust import streams
from banditclust.env import (
    DEFAULT_CAP,
    Environment,
    NoiseModel,
    ProblemInstance,
    QueryLedger,
    balanced_labels,
    balancedness,
    gap_vector,
    minority_labels,
    ordered_gaps,
)
from banditclust.errors import (
    BudgetExhausted,
    DegenerateLabels,
    IndexOutOfRange,
    InvalidInstance,
)
from banditclust.harness import exp2_instances


def test_zero_noise_returns_mean_and_meters():
    inst = ProblemInstance([0.0], [1.0], [0, 1])
    env = Environment(inst, NoiseModel.zero(), 0)
    assert env.ledger.total == 0
    assert env.sample(2, 1) == 1.0
    assert env.ledger.total == 1
    assert env.ledger.count(2, 1) == 1


def test_gaussian_draws_are_distinct_and_unbiased():
    inst = ProblemInstance([0.3, 0.0], [1.0, 0.0], [0, 1])
    env = Environment(inst, NoiseModel.gaussian(1.0), 11)
    a, b = env.sample(1, 1), env.sample(1, 1)
    assert a != b
    draws = env.sample_batch(1, 1, 100_000)
    assert abs(draws.mean() - 0.3) < 0.02
    assert env.ledger.total == 100_002


def test_cap_raises_on_sixth_call():
    inst = ProblemInstance([0.0], [1.0], [0, 1])
    env = Environment(inst, NoiseModel.zero(), 0, cap=5)
    for _ in range(5):
        env.sample(1, 1)
    with pytest.raises(BudgetExhausted):
        env.sample(1, 1)
    assert env.ledger.total == 5


def test_default_cap():
    inst = ProblemInstance([0.0], [1.0], [0, 1])
    assert Environment(inst).ledger.cap == DEFAULT_CAP == 2**42


@pytest.mark.parametrize("i,j", [(0, 1), (3, 1), (1, 0), (1, 2)])
def test_index_out_of_range(i, j):
    env = Environment(ProblemInstance([0.0], [1.0], [0, 1]), NoiseModel.zero(), 0)
    with pytest.raises(IndexOutOfRange):
        env.sample(i, j)
    assert env.ledger.total == 0


def test_gap_vector_examples():
    inst = ProblemInstance([0.0, 0.0], [1.0, 0.0], [0, 1])
    assert gap_vector(inst).tolist() == [-1.0, 0.0]
    shift = np.zeros(1000)
    shift[:4] = 15 / math.sqrt(4)
    inst = ProblemInstance.from_shift(shift, balanced_labels(20))
    gap = gap_vector(inst)
    assert np.allclose(gap[:4], -7.5) and not np.any(gap[4:])


def test_equal_means_rejected():
    with pytest.raises(InvalidInstance):
        ProblemInstance([1.0, 2.0], [1.0, 2.0], [0, 1])


@pytest.mark.parametrize(
    "labels",
    [[0, 0, 0], [1, 1], [1, 0], [0, 2]],
)
def test_bad_labels_rejected(labels):
    with pytest.raises(InvalidInstance):
        ProblemInstance([0.0], [1.0], labels)


def test_bernoulli_range_checked():
    inst = ProblemInstance([0.0], [1.5], [0, 1])
    with pytest.raises(InvalidInstance):
        Environment(inst, NoiseModel.bernoulli())


def test_gaussian_sigma_bounded():
    with pytest.raises(ValueError):
        NoiseModel.gaussian(1.5)


@pytest.mark.parametrize(
    "labels,theta",
    [([0] * 10 + [1] * 10, 0.5), ([0, 1, 1, 1], 0.25), ([0, 1], 0.5)],
)
def test_balancedness(labels, theta):
    assert balancedness(labels) == theta


def test_balancedness_degenerate():
    with pytest.raises(DegenerateLabels):
        balancedness([0, 0, 0])


def test_ordered_gaps_examples():
    assert ordered_gaps([0, 3, -4]).tolist() == [4, 3, 0]
    assert ordered_gaps([1, 1]).tolist() == [1, 1]
    _, _, gap = exp2_instances([100])[0]
    out = ordered_gaps(gap)
    assert np.all(out[:10] == 5) and not np.any(out[10:])


def test_label_helpers():
    assert balanced_labels(5).tolist() == [0, 0, 0, 1, 1]
    assert minority_labels(4, 1).tolist() == [0, 0, 0, 1]
    with pytest.raises(DegenerateLabels):
        minority_labels(4, 4)


def test_instance_means_match_dense_matrix():
    inst = ProblemInstance([0.1, 0.2, 0.3], [0.5, 0.6, 0.7], [0, 1, 0, 1])
    m = inst.dense_matrix()
    items, feats = np.meshgrid(np.arange(1, 5), np.arange(1, 4), indexing="ij")
    assert np.array_equal(inst.means(items.ravel(), feats.ravel()), m.ravel())
    assert np.array_equal(inst.row(2), inst.mu_b)


@pytest.mark.parametrize(
    "noise,means",
    [
        (NoiseModel.gaussian(1.0), ([-0.4, 2.0], [1.0, 0.0])),
        (NoiseModel.gaussian(0.5), ([0.0, 0.0], [3.0, 0.0])),
        (NoiseModel.bernoulli(), ([0.2, 0.9], [0.7, 0.05])),
        (NoiseModel.zero(), ([0.2, 0.9], [0.7, 0.05])),
    ],
)
def test_noise_unbiased(noise, means):
    inst = ProblemInstance(*means, [0, 1])
    env = Environment(inst, noise, 5)
    r = 100_000
    sigma = 1.0 if noise.kind == "bernoulli" else noise.sigma
    for i in (1, 2):
        for j in (1, 2):
            single = env.sample_batch(i, j, r).mean()
            summed = env.sample_sums([i], [j], r)[0] / r
            mean = inst.means([i], [j])[0]
            assert abs(single - mean) <= 4 * sigma / math.sqrt(r)
            assert abs(summed - mean) <= 4 * sigma / math.sqrt(r)


def test_sum_law_matches_raw_draws():
    # Sums of raw draws and the direct sum law agree in mean and variance.
    inst = ProblemInstance([0.25], [0.75], [0, 1])
    for noise in (NoiseModel.gaussian(0.8), NoiseModel.bernoulli()):
        env = Environment(inst, noise, 3)
        raw = env.sample_batch(2, 1, 7 * 20_000).reshape(20_000, 7).sum(axis=1)
        direct = env.sample_sums(np.full(20_000, 2), np.ones(20_000, dtype=int), 7)
        assert abs(raw.mean() - direct.mean()) < 0.05
        assert abs(raw.var() / direct.var() - 1.0) < 0.05


def test_reproducible_streams():
    inst = ProblemInstance([0.0, 1.0], [1.0, 0.0], [0, 1, 1])
    a = Environment(inst, NoiseModel.gaussian(), streams.substream(9, 1, 2, "noise"))
    b = Environment(inst, NoiseModel.gaussian(), streams.substream(9, 1, 2, "noise"))
    seq_a = [a.sample(i, j) for i in (1, 2, 3) for j in (1, 2)]
    seq_b = [b.sample(i, j) for i in (1, 2, 3) for j in (1, 2)]
    assert seq_a == seq_b
    c = Environment(inst, NoiseModel.gaussian(), streams.substream(9, 1, 3, "noise"))
    assert seq_a != [c.sample(i, j) for i in (1, 2, 3) for j in (1, 2)]


@settings(max_examples=50, deadline=None)
@given(
    calls=st.lists(
        st.tuples(st.integers(1, 4), st.integers(1, 3), st.integers(1, 9)), max_size=30
    ),
    dense=st.booleans(),
)
def test_ledger_total_is_sum_of_cells(calls, dense):
    from banditclust import env as env_mod

    old = env_mod.DENSE_LEDGER_LIMIT
    env_mod.DENSE_LEDGER_LIMIT = old if dense else 0
    try:
        ledger = QueryLedger(4, 3)
    finally:
        env_mod.DENSE_LEDGER_LIMIT = old
    prev = 0
    for i, j, c in calls:
        ledger.charge([i], [j], c)
        assert ledger.total >= prev
        prev = ledger.total
    assert ledger.total == int(ledger.per_cell().sum())
    expected = np.zeros((4, 3), dtype=int)
    for i, j, c in calls:
        expected[i - 1, j - 1] += c
    assert np.array_equal(ledger.per_cell(), expected)
