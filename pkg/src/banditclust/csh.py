"""Sequential halving over (item, feature) pairs compared against item 1."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptyItemSet, InvalidBudget

MAX_HALVING_STEPS = 60


@dataclass(frozen=True)
class CshParams:
    item_set: tuple
    halving_steps: int
    budget: int

    def __post_init__(self):
        raw = self.item_set
        if isinstance(raw, (set, frozenset)):
            raw = sorted(raw)
        items = tuple(int(i) for i in np.atleast_1d(raw))
        object.__setattr__(self, "item_set", items)
        if not items:
            raise EmptyItemSet("item set must be non-empty")
        if not 1 <= self.halving_steps <= MAX_HALVING_STEPS:
            raise InvalidBudget(
                f"halving_steps must be in [1, {MAX_HALVING_STEPS}], got {self.halving_steps}"
            )
        if self.budget < min_budget(self.halving_steps):
            raise InvalidBudget(
                f"budget {self.budget} < L*2^(L+1) = {min_budget(self.halving_steps)}"
            )


@dataclass
class CshResult:
    pair: tuple
    budget_spent: int
    per_round_tau: list = field(default_factory=list)
    round_sizes: list = field(default_factory=list)
    initial_slots: np.ndarray | None = field(default=None, repr=False)

    @property
    def item(self):
        return self.pair[0]

    @property
    def feature(self):
        return self.pair[1]


def min_budget(halving_steps):
    """Smallest budget for which every round gets at least one draw."""
    return halving_steps * 2 ** (halving_steps + 1)


def round_draws(budget, halving_steps):
    """Draws per surviving pair in rounds ``1..L``."""
    L = halving_steps
    return [budget // (2 ** (L - l + 2) * L) for l in range(1, L + 1)]


def compare_sequential_halving(env, params, rng):
    """Find a pair ``(i, j)`` with a large ``|M[i, j] - M[1, j]|``.

    ``2^L`` pairs are drawn uniformly with replacement from
    ``item_set x [d]``; duplicates are independent slots. In round ``l`` each
    survivor gets ``tau_l`` paired draws from row ``i`` and row 1 and the half
    with the largest absolute mean difference survives. Ties go to the
    earlier slot.

    RNG order: ``rng`` draws the initial slots (items then features); within
    each round ``env`` draws the item-row sums for all survivors in slot
    order, then the row-1 sums in the same order.
    """
    L = params.halving_steps
    items = np.asarray(params.item_set, dtype=np.int64)
    width = 2 ** L
    slot_items = items[rng.integers(0, items.size, size=width)]
    slot_features = rng.integers(1, env.d + 1, size=width)

    initial = np.column_stack([slot_items, slot_features])
    taus = round_draws(params.budget, L)
    sizes = [width]
    spent = 0
    for l, tau in enumerate(taus, start=1):
        item_sums = env.sample_sums(slot_items, slot_features, tau)
        ref_sums = env.sample_sums(np.ones_like(slot_items), slot_features, tau)
        spent += 2 * tau * slot_items.size
        score = np.abs(item_sums - ref_sums) / tau
        keep = np.sort(np.argsort(-score, kind="stable")[: 2 ** (L - l)])
        slot_items = slot_items[keep]
        slot_features = slot_features[keep]
        sizes.append(int(slot_items.size))

    return CshResult(
        pair=(int(slot_items[0]), int(slot_features[0])),
        budget_spent=spent,
        per_round_tau=taus,
        round_sizes=sizes,
        initial_slots=initial,
    )


def lemma1_halving_steps(d, alpha, s, set_size, delta):
    """Number of halving steps sufficient to catch a gap shared by ``s`` features.

    ``alpha`` is the fraction of ``set_size`` items lying in the other group.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError("alpha must lie in (0, 1]")
    if not 1 <= s <= d:
        raise DomainError("s must lie in [1, d]")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    inner = 4.0 * math.log(8.0 * set_size * d) / delta
    if inner <= 1.0:
        raise DomainError("log argument must exceed 1")
    return max(1, math.ceil(math.log2(16.0 * d / (alpha * s) * math.log(inner))))


def lemma1_budget(halving_steps, h):
    """Budget sufficient for ``halving_steps`` rounds to resolve a gap of size ``h``."""
    if h <= 0:
        raise DomainError("h must be positive")
    L = halving_steps
    return max(math.ceil(516 * L**3 * 2**L / h**2), 2 ** (L + 1) * L)
