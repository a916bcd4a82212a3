"""Non-adaptive baseline: sample every cell equally, then 2-means on row averages."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientBudget

MAX_LLOYD_ITERATIONS = 100


@dataclass
class KMeansFit:
    assignment: np.ndarray
    centers: np.ndarray
    inertia: float
    iterations: int
    history: list = field(default_factory=list)


@dataclass
class BaselineOutcome:
    labels: np.ndarray
    budget_used: int
    tau: int
    kmeans_iterations: int
    inertia: float


def _inertia(points, centers, assignment):
    return float(np.sum((points - centers[assignment]) ** 2))


def _assign(points, centers):
    dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(dist, axis=1)


def lloyd_two_means(points, init, max_iter=MAX_LLOYD_ITERATIONS):
    """Lloyd iterations from the given two centers until assignments stop changing."""
    centers = np.array(init, dtype=float)
    assignment = _assign(points, centers)
    history = [_inertia(points, centers, assignment)]
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        for c in range(2):
            members = points[assignment == c]
            # An emptied cluster keeps its previous center.
            if members.size:
                centers[c] = members.mean(axis=0)
        history.append(_inertia(points, centers, assignment))
        new = _assign(points, centers)
        history.append(_inertia(points, centers, new))
        if np.array_equal(new, assignment):
            break
        assignment = new
    return KMeansFit(assignment, centers, history[-1], iterations, history)


def two_means(points, restarts, rng, max_iter=MAX_LLOYD_ITERATIONS):
    """Lowest-inertia fit among ``restarts`` Lloyd runs from random pairs of distinct rows."""
    points = np.asarray(points, dtype=float)
    best = None
    n = points.shape[0]
    for _ in range(max(1, restarts)):
        a = int(rng.integers(n))
        # Second seed is drawn among rows with a different vector when one exists.
        others = np.flatnonzero(np.any(points != points[a], axis=1))
        if others.size == 0:
            others = np.delete(np.arange(n), a)
        b = int(others[rng.integers(others.size)])
        fit = lloyd_two_means(points, points[[a, b]], max_iter)
        if best is None or fit.inertia < best.inertia:
            best = fit
    return best


def canonical_labels(assignment):
    """Relabel a two-way partition so that item 1 gets label 0."""
    assignment = np.asarray(assignment)
    return (assignment != assignment[0]).astype(np.int8)


def uniform_kmeans(env, T, restarts=10, rng=None):
    """Spend ``floor(T / nd)`` draws on every cell and cluster the row averages."""
    n, d = env.n, env.d
    tau = T // (n * d)
    if tau < 1:
        raise InsufficientBudget(f"budget {T} < n*d = {n * d}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    items = np.repeat(np.arange(1, n + 1), d)
    features = np.tile(np.arange(1, d + 1), n)
    averages = (env.sample_sums(items, features, tau) / tau).reshape(n, d)
    fit = two_means(averages, restarts, rng)
    return BaselineOutcome(
        labels=canonical_labels(fit.assignment),
        budget_used=n * d * tau,
        tau=tau,
        kmeans_iterations=fit.iterations,
        inertia=fit.inertia,
    )
