"""Command-line entry point: ``banditclust {cluster,exp1,exp2,run,bounds}``."""

import argparse
import json
import os
import sys

import numpy as np

from . import streams
from .bounds import bounds_report
from .env import DEFAULT_CAP, Environment, NoiseModel, ProblemInstance, balanced_labels
from .errors import ConfigError, InvalidInstance
from .harness import ExperimentConfig, bounds_table, write_report
from .pipeline import bandit_clustering

EXIT_CONFIG = 2
EXIT_BUDGET = 3


def parse_vector(text, length=None, dtype=float):
    """Read a vector from a file or an inline list.

    Inline syntax is comma separated; ``v*c`` repeats ``v`` ``c`` times. A
    file may hold a JSON list or whitespace/comma separated numbers. Shorter
    vectors are zero-padded up to ``length``.
    """
    if os.path.exists(text):
        with open(text) as fh:
            raw = fh.read().strip()
        try:
            values = json.loads(raw)
        except json.JSONDecodeError:
            values = [tok for tok in raw.replace(",", " ").split()]
    else:
        values = [tok.strip() for tok in text.split(",") if tok.strip()]
    out = []
    for tok in values:
        if isinstance(tok, str) and "*" in tok:
            v, c = tok.split("*", 1)
            out.extend([dtype(v)] * int(c))
        else:
            out.append(dtype(tok))
    if length is not None:
        if len(out) > length:
            raise ConfigError(f"vector has {len(out)} entries, more than {length}")
        out.extend([dtype(0)] * (length - len(out)))
    return np.asarray(out, dtype=dtype)


def _noise(args):
    try:
        return NoiseModel(args.noise, args.sigma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_cluster(args):
    gap = parse_vector(args.gaps, args.d)
    n = args.n
    labels = balanced_labels(n) if args.theta_labels == "auto" else parse_vector(
        args.theta_labels, None, int
    )
    if labels.size != n:
        raise ConfigError(f"labels has length {labels.size}, expected {n}")
    try:
        instance = ProblemInstance.from_gap(gap, labels)
        env = Environment(
            instance, _noise(args), streams.substream(args.seed, 0, 0, streams.NOISE), cap=args.cap
        )
    except (InvalidInstance, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    out = bandit_clustering(env, args.delta, streams.substream(args.seed, 0, 0, streams.ALGO))
    print(json.dumps({
        "labels": None if out.labels is None else out.labels.tolist(),
        "correct": out.correct(instance.labels),
        "budget_total": out.budget_total,
        "budget_detect": out.budget_detect,
        "budget_classify": out.budget_classify,
        "emergency_stopped": out.emergency_stopped,
        "candidate": out.candidate,
        "chosen_feature": out.chosen_feature,
    }))
    return EXIT_BUDGET if out.emergency_stopped else 0


def _experiment_config(args, kind):
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if kind is not None and cfg.experiment != kind:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {kind!r}")
    else:
        if kind is None:
            raise ConfigError("--config is required")
        cfg = ExperimentConfig(experiment=kind)
        if kind == "exp2":
            cfg.deltas = [0.8, 0.5, 0.2, 0.05]
    if args.trials is not None:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.master_seed = args.seed
    cfg.validate()
    return cfg


def cmd_experiment(args):
    cfg = _experiment_config(args, args.command if args.command != "run" else None)
    if cfg.experiment == "bounds":
        text = json.dumps(bounds_table(cfg), indent=2)
        if args.out and args.out != "-":
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0
    write_report(cfg, args.out or cfg.output)
    return 0


def cmd_bounds(args):
    gap = parse_vector(args.gaps, args.d)
    n = args.n
    try:
        rep = bounds_report(gap, args.theta, n, gap.size, args.delta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(json.dumps(rep.to_dict(), indent=2))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="banditclust", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="run the clustering pipeline once")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, default=None)
    c.add_argument("--gaps", required=True, help="file or inline list, e.g. '8,0*199'")
    c.add_argument("--theta-labels", default="auto", help="'auto' (balanced), file or inline list")
    c.add_argument("--delta", type=float, default=0.2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.add_argument("--noise", choices=["gaussian", "bernoulli", "zero"], default="gaussian")
    c.add_argument("--sigma", type=float, default=1.0)
    c.set_defaults(func=cmd_cluster)

    for name in ("exp1", "exp2", "run"):
        e = sub.add_parser(name, help=f"{name} Monte-Carlo experiment to CSV")
        e.add_argument("--config", required=name == "run")
        e.add_argument("--out", default=None)
        e.add_argument("--trials", type=int, default=None)
        e.add_argument("--seed", type=int, default=None)
        e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bounds", help="print complexity and lower-bound values as JSON")
    b.add_argument("--gaps", required=True)
    b.add_argument("--theta", type=float, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, default=None)
    b.add_argument("--delta", type=float, default=0.1)
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
