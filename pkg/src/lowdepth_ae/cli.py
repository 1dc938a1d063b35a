"""Command-line entry points: stats, run, calibrate, fit-noise, sweep.

Failures exit nonzero after printing a machine-readable JSON error record
to stderr.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .circuits import build_iterated_circuit, compile_to_two_qubit, compiled_stats
from .harness import (ExperimentConfig, calibrate_hybrid, fit_depolarizing,
                      run_experiment, sample_vector_pair, run_trial)


def _load_config(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = str(args.out)
    if getattr(args, "algorithms", None):
        overrides["algorithms"] = tuple(args.algorithms.split(","))
    return dataclasses.replace(config, **overrides) if overrides else config


def _cmd_stats(args) -> int:
    rng = np.random.default_rng(args.seed or 0)
    x, y = sample_vector_pair(rng, "haar")
    print(f"{'t':>3} {'oracle calls':>13} {'rbs gates':>10} {'2q gates':>9} {'2q depth':>9}")
    for t in range(args.max_depth + 1):
        circuit = build_iterated_circuit(x, y, t)
        stats = compiled_stats(compile_to_two_qubit(circuit))
        print(f"{t:>3} {2 * t + 1:>13} {circuit.count('rbs'):>10} "
              f"{stats.two_qubit_count:>9} {stats.two_qubit_depth:>9}")
    return 0


def _cmd_run(args) -> int:
    config = _load_config(args)
    _, paths = run_experiment(config)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_calibrate(args) -> int:
    config = _load_config(args)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    cal = calibrate_hybrid(config, args.trials or config.calib_trials, rng,
                           tune_beta=args.tune_beta or config.tune_beta)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {str(d): {"mle_avg_depth2": c.mle_avg_depth2,
                        "crt_exact_at_d": c.crt_exact_at_d,
                        "beta_hybrid": c.beta_hybrid}
               for d, c in sorted(cal.items())}
    path = out / "calibration.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"calibration: {path}")
    return 0


def _cmd_fit_noise(args) -> int:
    config = _load_config(args)
    streams = np.random.SeedSequence(config.seed).spawn(config.n_trials)
    counts, thetas = [], []
    for s in streams:
        rng = np.random.default_rng(s)
        pair = sample_vector_pair(rng, config.vector_mode)
        trial = run_trial(dataclasses.replace(config, algorithms=()), pair, rng)
        counts.append(trial.counts_by_depth)
        thetas.append(trial.theta_true)
    gammas = fit_depolarizing(counts, thetas)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "gamma_fit.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump({"gamma_by_depth": gammas}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{'depth':>6} {'gamma_model':>12} {'gamma_fit':>12}")
    for d, g in enumerate(gammas):
        print(f"{d:>6} {config.noise.gamma_by_depth[d]:>12.4f} {g:>12.4f}")
    print(f"gamma fit: {path}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    base_out = Path(config.out_dir)
    for raw in values:
        if args.param == "max-depth":
            depth = int(raw)
            sub = dataclasses.replace(
                config, max_depth=depth, out_dir=str(base_out / f"max_depth_{depth}"))
        elif args.param == "target-eps":
            eps = float(raw)
            sub = dataclasses.replace(
                config, powerlaw_target_eps=eps,
                out_dir=str(base_out / f"target_eps_{raw}"))
        else:
            raise ValueError(f"unknown sweep parameter {args.param!r}")
        _, paths = run_experiment(sub)
        print(f"{args.param}={raw}: {paths['aggregate']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowdepth-ae",
        description="Low-depth amplitude estimation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="two-qubit resource table of the amplified circuits")
    p_stats.add_argument("--max-depth", type=int, default=7)
    p_stats.add_argument("--seed", type=int, default=None)
    p_stats.set_defaults(func=_cmd_stats)

    for name, func, extra in (
            ("run", _cmd_run, "run the configured experiment and emit data files"),
            ("calibrate", _cmd_calibrate, "write hybrid calibration values"),
            ("fit-noise", _cmd_fit_noise, "fit per-depth depolarizing rates from simulated data"),
            ("sweep", _cmd_sweep, "repeat the run over a parameter range")):
        p = sub.add_parser(name, help=extra)
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--algorithms", type=str, default=None,
                       help="comma-separated subset of direct,mle,crt,hybrid,powerlaw")
        if name == "calibrate":
            p.add_argument("--trials", type=int, default=None)
            p.add_argument("--tune-beta", action="store_true")
        if name == "sweep":
            p.add_argument("--param", choices=("max-depth", "target-eps"), required=True)
            p.add_argument("--values", type=str, required=True)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
