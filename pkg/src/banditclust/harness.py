"""Seeded Monte-Carlo trials, aggregation and CSV output.

A report is a pure function of its configuration: every trial draws from
its own substream keyed by ``(master_seed, grid index, delta index, trial
index, algorithm)``, and rows are emitted in grid-then-delta order.
"""

import csv
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .baseline import uniform_kmeans
from .bounds import bounds_report, complexity_h
from .classify import cluster_by_candidates
from .detect import candidate_row
from .env import (
    DEFAULT_CAP,
    Environment,
    NoiseModel,
    ProblemInstance,
    balanced_labels,
    balancedness,
    check_labels,
    gap_vector,
)
from .errors import BudgetExhausted, ConfigError, InvalidInstance
from .pipeline import bandit_clustering

CSV_COLUMNS = [
    "experiment",
    "grid_param",
    "n",
    "d",
    "delta",
    "trials",
    "mean_budget",
    "q05_budget",
    "q95_budget",
    "error_rate",
    "emergency_rate",
    "seed",
]

KINDS = ("exp1", "exp2", "single", "bounds")
ALGORITHMS = ("bc", "cr", "cbc", "uniform")
EXP2_SIZES = [100, 200, 500, 1000, 2000, 5000]


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 20
    d: int = 1000
    n_grid: list | None = None
    d_factor: int = 10
    gammas: list | None = None
    gap_norm: float = 15.0
    gap_value: float = 5.0
    gap_support: int = 10
    gaps: list | None = None
    labels: list | str = "auto"
    deltas: list = field(default_factory=lambda: [0.8])
    trials: int = 100
    master_seed: int = 0
    cap: int | None = None
    cap_multiplier: float | None = None
    noise: str = "gaussian"
    sigma: float = 1.0
    algorithms: list | None = None
    baseline_grid: list | None = None
    error_threshold: float = 0.05
    kmeans_restarts: int = 10
    output: str | None = None
    workers: int = 1

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' key")
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def validate(self):
        if self.experiment not in KINDS:
            raise ConfigError(f"experiment must be one of {KINDS}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not self.deltas or any(not 0.0 < float(x) < 1.0 for x in self.deltas):
            raise ConfigError("deltas must be a non-empty list of values in (0, 1)")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit non-negative integer")
        if self.cap is not None and (not isinstance(self.cap, int) or self.cap < 1):
            raise ConfigError("cap must be a positive integer")
        if self.noise not in ("gaussian", "bernoulli", "zero"):
            raise ConfigError("noise must be gaussian, bernoulli or zero")
        for alg in self.algorithms or []:
            if alg not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {alg!r}")
        if self.baseline_grid is not None:
            if len(self.baseline_grid) != 3 or self.baseline_grid[2] < 1:
                raise ConfigError("baseline_grid must be [T_min, T_max, steps]")
        if self.experiment == "exp1" and self.d < 20:
            raise ConfigError("exp1 needs d >= 20")
        if self.experiment in ("single", "bounds") and self.gaps is None:
            raise ConfigError(f"{self.experiment} needs 'gaps'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def resolved_algorithms(self):
        if self.algorithms:
            return list(self.algorithms)
        return ["cr", "cbc", "bc", "uniform"] if self.experiment == "exp1" else ["bc"]

    def noise_model(self):
        try:
            return NoiseModel(self.noise, self.sigma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class GridPoint:
    param: int
    instance: ProblemInstance


@dataclass
class TrialResult:
    budget: int
    error: bool
    emergency: bool


@dataclass
class ReportRow:
    experiment: str
    grid_param: int
    n: int
    d: int
    delta: float | None
    trials: int
    mean_budget: float
    q05_budget: float
    q95_budget: float
    error_rate: float
    emergency_rate: float
    seed: int
    trials_counted: int

    def csv_fields(self):
        return [
            self.experiment,
            str(self.grid_param),
            str(self.n),
            str(self.d),
            "" if self.delta is None else fmt(self.delta),
            str(self.trials),
            fmt(self.mean_budget),
            fmt(self.q05_budget),
            fmt(self.q95_budget),
            fmt(self.error_rate),
            fmt(self.emergency_rate),
            str(self.seed),
        ]


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    def select(self, experiment, grid_param=None, delta=None):
        return [
            r
            for r in self.rows
            if r.experiment == experiment
            and (grid_param is None or r.grid_param == grid_param)
            and (delta is None or r.delta == delta)
        ]


def fmt(x):
    return f"{x:.6g}"


def nearest_rank(values, p):
    """Empirical ``p``-quantile by the nearest-rank rule (no interpolation)."""
    v = sorted(values)
    if not v:
        return math.nan
    rank = max(1, math.ceil(p * len(v)))
    return float(v[rank - 1])


def exp1_gap_grid(d, gammas=None, norm=15.0):
    """``(gamma, s, Delta^s)`` with ``s = floor((d-1)(gamma-1)/19) + 1``."""
    out = []
    for gamma in gammas or range(1, 21):
        s = (d - 1) * (gamma - 1) // 19 + 1
        gap = np.zeros(d)
        gap[:s] = norm / math.sqrt(s)
        out.append((gamma, s, gap))
    return out


def exp2_instances(sizes=None, d_factor=10, value=5.0, support=10):
    """``(n, d, Delta)`` with ``d = d_factor * n`` and ``support`` entries equal to ``value``."""
    out = []
    for n in sizes or EXP2_SIZES:
        d = d_factor * n
        gap = np.zeros(d)
        gap[: min(support, d)] = value
        out.append((n, d, gap))
    return out


def parse_labels(spec, n):
    if spec is None or spec == "auto":
        return balanced_labels(n)
    labels = np.asarray(spec, dtype=np.int8)
    if labels.size != n:
        raise ConfigError(f"labels has length {labels.size}, expected n = {n}")
    try:
        check_labels(labels)
    except InvalidInstance as exc:
        raise ConfigError(str(exc)) from exc
    return labels


def grid_points(cfg):
    try:
        if cfg.experiment == "exp1":
            labels = parse_labels(cfg.labels, cfg.n)
            return [
                GridPoint(s, ProblemInstance.from_shift(gap, labels))
                for _, s, gap in exp1_gap_grid(cfg.d, cfg.gammas, cfg.gap_norm)
            ]
        if cfg.experiment == "exp2":
            return [
                GridPoint(n, ProblemInstance.from_shift(gap, balanced_labels(n)))
                for n, _, gap in exp2_instances(
                    cfg.n_grid, cfg.d_factor, cfg.gap_value, cfg.gap_support
                )
            ]
        gap = np.asarray(cfg.gaps, dtype=float)
        labels = parse_labels(cfg.labels, cfg.n)
        return [GridPoint(int(np.count_nonzero(gap)), ProblemInstance.from_gap(gap, labels))]
    except InvalidInstance as exc:
        raise ConfigError(str(exc)) from exc


def baseline_budgets(cfg, n, d):
    """Budget grid for the uniform baseline.

    Default: ten points from ``8.5 n d`` to ``15 n d``, the per-cell range of
    the reference grid 170000..300000 at ``n d = 20000``.
    """
    if cfg.baseline_grid is not None:
        lo, hi, steps = cfg.baseline_grid
    else:
        lo, hi, steps = int(8.5 * n * d), 15 * n * d, 10
    if steps == 1:
        return [int(lo)]
    return [int(lo + (hi - lo) * k // (steps - 1)) for k in range(steps)]


def trial_cap(cfg, instance):
    if cfg.cap is not None:
        return cfg.cap
    if cfg.cap_multiplier is not None:
        h = complexity_h(gap_vector(instance), balancedness(instance.labels), instance.n)
        return int(min(DEFAULT_CAP, max(1, round(cfg.cap_multiplier * h))))
    return DEFAULT_CAP


def first_other_item(labels):
    """Smallest 1-based index whose label differs from item 1's."""
    return int(np.flatnonzero(np.asarray(labels) != labels[0])[0]) + 1


def run_trial(instance, noise, algorithm, delta, cap, master_seed, path, baseline_T=None, restarts=10):
    noise_rng = streams.substream(master_seed, *path, algorithm, streams.NOISE)
    algo_rng = streams.substream(master_seed, *path, algorithm, streams.ALGO)
    env = Environment(instance, noise, noise_rng, cap=cap)
    truth = instance.labels
    if algorithm == "bc":
        out = bandit_clustering(env, delta, algo_rng)
        return TrialResult(out.budget_total, not out.correct(truth), out.emergency_stopped)
    if algorithm == "uniform":
        out = uniform_kmeans(env, baseline_T, restarts, algo_rng)
        return TrialResult(out.budget_used, not np.array_equal(out.labels, truth), False)
    try:
        if algorithm == "cr":
            found = candidate_row(env, delta / 2, algo_rng)
            error = truth[found.candidate - 1] == truth[0]
        else:
            found = cluster_by_candidates(env, delta / 2, first_other_item(truth), algo_rng)
            error = not np.array_equal(found.labels, truth)
    except BudgetExhausted:
        return TrialResult(env.budget, True, True)
    return TrialResult(found.budget_spent, bool(error), False)


def _run_trial_args(args):
    return run_trial(*args)


def aggregate(experiment, point, delta, results, seed):
    kept = [r.budget for r in results if not r.emergency]
    total = len(results)
    return ReportRow(
        experiment=experiment,
        grid_param=point.param,
        n=point.instance.n,
        d=point.instance.d,
        delta=delta,
        trials=total,
        mean_budget=float(np.mean(kept)) if kept else math.nan,
        q05_budget=nearest_rank(kept, 0.05),
        q95_budget=nearest_rank(kept, 0.95),
        error_rate=sum(r.error for r in results) / total,
        emergency_rate=sum(r.emergency for r in results) / total,
        seed=seed,
        trials_counted=len(kept),
    )


def first_passing(rows, threshold):
    """Summary row for the smallest budget whose error rate is at most ``threshold``."""
    for r in rows:
        if r.error_rate <= threshold:
            return dataclasses.replace(r, experiment=r.experiment + "_first")
    r = rows[0]
    return dataclasses.replace(
        r,
        experiment=r.experiment + "_first",
        mean_budget=math.nan,
        q05_budget=math.nan,
        q95_budget=math.nan,
        error_rate=math.nan,
    )


class CsvSink:
    """Writes rows as they are produced so an interrupted run keeps its prefix."""

    def __init__(self, stream):
        self.stream = stream
        self.writer = csv.writer(stream, lineterminator="\n")
        self.writer.writerow(CSV_COLUMNS)
        stream.flush()

    def __call__(self, row):
        self.writer.writerow(row.csv_fields())
        self.stream.flush()


def run_trials(cfg, sink=None):
    """Run every (grid point, delta, algorithm) cell of ``cfg`` and aggregate."""
    if cfg.experiment == "bounds":
        raise ConfigError("use bounds_table for the bounds experiment")
    noise = cfg.noise_model()
    report = ExperimentReport(cfg)
    algorithms = cfg.resolved_algorithms()
    executor = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    mapper = executor.map if executor else map

    def emit(row):
        report.rows.append(row)
        if sink is not None:
            sink(row)

    try:
        for g, point in enumerate(grid_points(cfg)):
            try:
                noise.validate(point.instance)
            except InvalidInstance as exc:
                raise ConfigError(str(exc)) from exc
            cap = trial_cap(cfg, point.instance)
            for di, delta in enumerate(cfg.deltas):
                for alg in algorithms:
                    if alg == "uniform":
                        continue
                    jobs = [
                        (point.instance, noise, alg, float(delta), cap, cfg.master_seed, (g, di, t))
                        for t in range(cfg.trials)
                    ]
                    results = list(mapper(_run_trial_args, jobs))
                    emit(aggregate(f"{cfg.experiment}:{alg}", point, float(delta), results, cfg.master_seed))
            if "uniform" in algorithms:
                rows = []
                n, d = point.instance.n, point.instance.d
                for b, T in enumerate(baseline_budgets(cfg, n, d)):
                    jobs = [
                        (point.instance, noise, "uniform", 0.5, DEFAULT_CAP, cfg.master_seed,
                         (g, "uniform", b, t), T, cfg.kmeans_restarts)
                        for t in range(cfg.trials)
                    ]
                    results = list(mapper(_run_trial_args, jobs))
                    row = aggregate(f"{cfg.experiment}:uniform", point, None, results, cfg.master_seed)
                    rows.append(row)
                    emit(row)
                emit(first_passing(rows, cfg.error_threshold))
    finally:
        if executor is not None:
            executor.shutdown()
    return report


def bounds_table(cfg, delta=None):
    out = []
    for point in grid_points(cfg):
        inst = point.instance
        theta = balancedness(inst.labels)
        dl = delta if delta is not None else min(cfg.deltas)
        rep = bounds_report(gap_vector(inst), theta, inst.n, inst.d, dl)
        out.append({"grid_param": point.param, "n": inst.n, "d": inst.d, "theta": theta,
                    "delta": dl, **rep.to_dict()})
    return out


def write_report(cfg, out_path=None):
    """Run ``cfg`` writing CSV to ``out_path`` (or stdout); returns the report."""
    if out_path is None or out_path == "-":
        return run_trials(cfg, CsvSink(sys.stdout))
    with open(out_path, "w", newline="") as fh:
        return run_trials(cfg, CsvSink(fh))
