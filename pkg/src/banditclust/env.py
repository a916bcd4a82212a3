"""Problem instances, noise models and the metered sampling oracle.

Item and feature indices are 1-based everywhere in the public API. The
matrix ``M`` is never materialized: an instance stores the two group means
and the label vector, so memory is ``O(n + d)``.
"""

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExhausted,
    DegenerateLabels,
    IndexOutOfRange,
    InvalidInstance,
)

# Per-cell counts are kept in a dense array up to this many cells, and in a
# dict keyed by flat cell index above it.
DENSE_LEDGER_LIMIT = 1 << 22

# Global cap so that a procedure that cannot stop ends in BudgetExhausted.
DEFAULT_CAP = 1 << 42


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    mu_a: np.ndarray
    mu_b: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        mu_a = np.array(self.mu_a, dtype=float).reshape(-1)
        mu_b = np.array(self.mu_b, dtype=float).reshape(-1)
        labels = np.array(self.labels).reshape(-1)
        if mu_a.shape != mu_b.shape or mu_a.size == 0:
            raise InvalidInstance("mu_a and mu_b must be non-empty and of equal length")
        if not (np.all(np.isfinite(mu_a)) and np.all(np.isfinite(mu_b))):
            raise InvalidInstance("group means must be finite")
        if np.array_equal(mu_a, mu_b):
            raise InvalidInstance("mu_a and mu_b must differ in at least one feature")
        if labels.size < 2:
            raise InvalidInstance("need at least two items")
        if not np.all((labels == 0) | (labels == 1)):
            raise InvalidInstance("labels must be binary")
        labels = labels.astype(np.int8)
        check_labels(labels)
        for name, arr in (("mu_a", mu_a), ("mu_b", mu_b), ("labels", labels)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_shift(cls, shift, labels):
        """Group ``a`` at the origin and group ``b`` at ``shift``."""
        shift = np.asarray(shift, dtype=float)
        return cls(np.zeros_like(shift), shift, labels)

    @classmethod
    def from_gap(cls, gap, labels):
        """Instance whose gap vector ``mu_a - mu_b`` equals ``gap`` (``mu_b = 0``)."""
        gap = np.asarray(gap, dtype=float)
        return cls(gap, np.zeros_like(gap), labels)

    @property
    def n(self):
        return int(self.labels.size)

    @property
    def d(self):
        return int(self.mu_a.size)

    def row(self, i):
        """Feature vector of item ``i`` (1-based)."""
        return self.mu_b if self.labels[i - 1] else self.mu_a

    def means(self, items, features):
        """Entries ``M[items, features]`` for 1-based index arrays."""
        items = np.asarray(items) - 1
        features = np.asarray(features) - 1
        return np.where(self.labels[items] == 1, self.mu_b[features], self.mu_a[features])

    def dense_matrix(self):
        return np.where(self.labels[:, None] == 1, self.mu_b[None, :], self.mu_a[None, :])


def check_labels(labels):
    labels = np.asarray(labels)
    if not (np.any(labels == 0) and np.any(labels == 1)):
        raise DegenerateLabels("both groups must be non-empty")
    if labels[0] != 0:
        raise InvalidInstance("item 1 must carry label 0")


def gap_vector(instance):
    return instance.mu_a - instance.mu_b


def balancedness(labels):
    labels = np.asarray(labels)
    ones = int(np.count_nonzero(labels))
    zeros = labels.size - ones
    if ones == 0 or zeros == 0:
        raise DegenerateLabels("both groups must be non-empty")
    return min(ones, zeros) / labels.size


def ordered_gaps(gap):
    """Absolute gap entries sorted in decreasing order."""
    return np.sort(np.abs(np.asarray(gap, dtype=float)))[::-1]


def balanced_labels(n):
    """``n - n // 2`` items in group 0 followed by ``n // 2`` items in group 1."""
    if n < 2:
        raise InvalidInstance("need at least two items")
    return minority_labels(n, n // 2)


def minority_labels(n, minority):
    """Last ``minority`` items in group 1, the rest (including item 1) in group 0."""
    if not 1 <= minority <= n - 1:
        raise DegenerateLabels(f"minority size must be in [1, {n - 1}], got {minority}")
    labels = np.zeros(n, dtype=np.int8)
    labels[n - minority:] = 1
    return labels


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "gaussian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bernoulli", "zero"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not 0.0 < self.sigma <= 1.0:
            raise ValueError("gaussian sigma must lie in (0, 1] to stay 1-subGaussian")

    @classmethod
    def gaussian(cls, sigma=1.0):
        return cls("gaussian", sigma)

    @classmethod
    def bernoulli(cls):
        return cls("bernoulli")

    @classmethod
    def zero(cls):
        return cls("zero")

    def validate(self, instance):
        if self.kind == "bernoulli":
            for mu in (instance.mu_a, instance.mu_b):
                if np.any((mu < 0.0) | (mu > 1.0)):
                    raise InvalidInstance("bernoulli noise needs all means in [0, 1]")

    def draw(self, means, rng, count=1):
        """``count`` independent observations per mean, shape ``means.shape + (count,)``."""
        means = np.asarray(means, dtype=float)[..., None]
        shape = means.shape[:-1] + (count,)
        if self.kind == "gaussian":
            return means + self.sigma * rng.standard_normal(shape)
        if self.kind == "bernoulli":
            return rng.binomial(1, np.broadcast_to(means, shape)).astype(float)
        return np.broadcast_to(means, shape).astype(float)

    def draw_sums(self, means, count, rng):
        """Sum of ``count`` independent observations per mean.

        Uses the exact law of the sum (normal, binomial or deterministic), so
        the cost does not grow with ``count``.
        """
        means = np.asarray(means, dtype=float)
        if self.kind == "gaussian":
            return count * means + self.sigma * np.sqrt(count) * rng.standard_normal(means.shape)
        if self.kind == "bernoulli":
            return rng.binomial(count, means).astype(float)
        return count * means


@dataclass
class QueryLedger:
    n: int
    d: int
    cap: int | None = None
    total: int = 0
    _dense: np.ndarray | None = field(default=None, repr=False)
    _sparse: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n * self.d <= DENSE_LEDGER_LIMIT:
            self._dense = np.zeros(self.n * self.d, dtype=np.int64)
        else:
            self._sparse = defaultdict(int)

    def remaining(self):
        return None if self.cap is None else self.cap - self.total

    def charge(self, items, features, count):
        """Record ``count`` observations of each (item, feature) cell."""
        items = np.atleast_1d(np.asarray(items, dtype=np.int64))
        features = np.atleast_1d(np.asarray(features, dtype=np.int64))
        requested = int(count) * int(items.size)
        if self.total + requested >= 1 << 62:
            raise BudgetExhausted(self.total, self.cap, requested)
        if self.cap is not None and self.total + requested > self.cap:
            raise BudgetExhausted(self.total, self.cap, requested)
        flat = (items - 1) * self.d + (features - 1)
        if self._dense is not None:
            np.add.at(self._dense, flat, int(count))
        else:
            cells, reps = np.unique(flat, return_counts=True)
            for c, r in zip(cells.tolist(), reps.tolist()):
                self._sparse[c] += r * int(count)
        self.total += requested

    def count(self, i, j):
        flat = (i - 1) * self.d + (j - 1)
        if self._dense is not None:
            return int(self._dense[flat])
        return self._sparse.get(flat, 0)

    def per_cell(self):
        """Dense ``n x d`` copy of the counts."""
        if self._dense is not None:
            return self._dense.reshape(self.n, self.d).copy()
        out = np.zeros(self.n * self.d, dtype=np.int64)
        for c, v in self._sparse.items():
            out[c] = v
        return out.reshape(self.n, self.d)


class Environment:
    """Sampling oracle for one instance; every observation goes through the ledger."""

    def __init__(self, instance, noise=None, rng=None, cap=DEFAULT_CAP):
        self.instance = instance
        self.noise = noise if noise is not None else NoiseModel.gaussian()
        self.noise.validate(instance)
        if rng is None or isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(rng)
        self.rng = rng
        self.ledger = QueryLedger(instance.n, instance.d, cap=cap)

    @property
    def n(self):
        return self.instance.n

    @property
    def d(self):
        return self.instance.d

    @property
    def budget(self):
        return self.ledger.total

    def _check(self, items, features):
        items = np.atleast_1d(np.asarray(items))
        features = np.atleast_1d(np.asarray(features))
        if items.shape != features.shape:
            raise ValueError("items and features must have the same shape")
        if items.size and (items.min() < 1 or items.max() > self.n):
            raise IndexOutOfRange(f"item index outside [1, {self.n}]")
        if features.size and (features.min() < 1 or features.max() > self.d):
            raise IndexOutOfRange(f"feature index outside [1, {self.d}]")
        return items, features

    def sample(self, i, j):
        """One noisy observation of ``M[i, j]``."""
        items, features = self._check(i, j)
        self.ledger.charge(items, features, 1)
        return float(self.noise.draw(self.instance.means(items, features), self.rng)[0, 0])

    def sample_batch(self, i, j, count):
        """``count`` independent observations of ``M[i, j]`` as an array."""
        items, features = self._check(i, j)
        self.ledger.charge(items, features, count)
        return self.noise.draw(self.instance.means(items, features), self.rng, count)[0]

    def sample_sums(self, items, features, count):
        """For each cell ``(items[k], features[k])``, the sum of ``count`` fresh draws."""
        items, features = self._check(items, features)
        if count < 1:
            raise ValueError("count must be positive")
        self.ledger.charge(items, features, count)
        return self.noise.draw_sums(self.instance.means(items, features), count, self.rng)
