"""Command line interface.

Subcommands:

* ``optimize``     search likelihood-ratio thresholds for a scenario
* ``simulate``     one seeded field realization with CSV artifacts
* ``sweep``        averaged error rates across one varied parameter
* ``oracle-check`` closed-form fusion math vs exhaustive enumeration

Exit codes: 0 on success, 1 on oracle mismatch, 2 on configuration
errors, 3 when the threshold search stops without converging (results
are still written).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .decision_rules import LikelihoodThresholds, gammas_from_lambdas, local_metrics
from .fusion import (
    FaultModel,
    FusionParams,
    enumerate_fusion_oracle,
    fault_adjust,
    fusion_quality,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    load_config,
    run_single,
    run_sweep,
    SWEEP_PARAMS,
)
from .optimize import minimize_error
from .signal_model import Hypothesis, SignalModel

__all__ = ["main"]

EXIT_OK = 0
EXIT_ORACLE_MISMATCH = 1
EXIT_CONFIG_ERROR = 2
EXIT_NOT_CONVERGED = 3

_OVERRIDE_TYPES = {
    "width": float, "height": float, "sensor_count": int,
    "neighborhood_size": int, "quorum": int,
    "m0": float, "m1": float, "m2": float,
    "q0": float, "q1": float, "q2": float,
    "p_f": float, "seed": int, "repetitions": int,
    "lambda1": float, "lambda2": float,
}


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    for name, kind in _OVERRIDE_TYPES.items():
        flag = "--" + name.replace("_", "-")
        parser.add_argument(flag, type=kind, default=None, dest=name)
    parser.add_argument(
        "--fault-mode", choices=("forced-change", "alpha-table"),
        default=None, dest="fault_mode",
    )
    parser.add_argument(
        "--event1-region", metavar="X0,Y0,X1,Y1", default=None, dest="event1_region",
    )
    parser.add_argument(
        "--event2-region", metavar="X0,Y0,X1,Y1", default=None, dest="event2_region",
    )
    parser.add_argument(
        "--alphas", metavar="A1,A2,A3,A4,A5,A6", default=None,
        help="explicit fault transition probabilities",
    )
    parser.add_argument(
        "--exclude-self", action="store_true",
        help="fuse over the n nearest other sensors instead of n including self",
    )


def _collect_overrides(args: argparse.Namespace) -> dict[str, object]:
    overrides: dict[str, object] = {}
    for name in _OVERRIDE_TYPES:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "fault_mode", None) is not None:
        overrides["fault_mode"] = args.fault_mode
    for key in ("event1_region", "event2_region"):
        raw = getattr(args, key, None)
        if raw is not None:
            parts = [p.strip() for p in raw.split(",")]
            if len(parts) != 4:
                raise ConfigError(f"--{key.replace('_', '-')} needs 4 numbers")
            try:
                overrides[key] = tuple(float(p) for p in parts)
            except ValueError:
                raise ConfigError(f"--{key.replace('_', '-')} needs 4 numbers") from None
    if getattr(args, "alphas", None) is not None:
        parts = [p.strip() for p in args.alphas.split(",")]
        if len(parts) != 6:
            raise ConfigError("--alphas needs 6 comma-separated probabilities")
        try:
            overrides["alphas"] = tuple(float(p) for p in parts)
        except ValueError:
            raise ConfigError("--alphas needs 6 comma-separated probabilities") from None
    if getattr(args, "exclude_self", False):
        overrides["include_self"] = False
    return overrides


def _load(args: argparse.Namespace) -> ExperimentConfig:
    return load_config(args.config, _collect_overrides(args))


def _cmd_optimize(args: argparse.Namespace) -> int:
    config = _load(args)
    result = minimize_error(
        config.signal_model(), config.priors(), config.fusion_params(),
        config.fault_model(),
    )
    print(f"lambda1 = {result.lambda1!r}")
    print(f"lambda2 = {result.lambda2!r}")
    print(f"error_probability = {result.objective_value!r}")
    print(f"evaluations = {result.evaluations}")
    print(f"converged = {result.converged}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load(args)
    artifacts = run_single(config, args.output_dir)
    for key, value in artifacts.summary.items():
        print(f"{key} = {value}")
    for path in artifacts.paths:
        print(f"wrote {path}")
    opt = artifacts.optimization
    if opt is not None and not opt.converged:
        print("warning: threshold search did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args)
    values = [v for v in args.values.split(",") if v.strip()]
    summary = run_sweep(config, args.param, values)
    path = summary.to_csv(args.output)
    for row in summary.rows:
        print(
            f"{args.param}={row.label}: ld_bf={row.ld_bf:.2f}% fd_bf={row.fd_bf:.2f}% "
            f"ld_af={row.ld_af:.2f}% fd_af={row.fd_af:.2f}%"
        )
    print(f"wrote {path}")
    if not summary.all_converged:
        print("warning: threshold search did not converge for every cell", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    checked = 0
    for _ in range(args.trials):
        m0 = rng.uniform(-1.0, 1.0)
        m1 = m0 + rng.uniform(0.5, 4.0)
        m2 = m1 + rng.uniform(0.5, 4.0)
        model = SignalModel(m0, m1, m2)
        lambdas = LikelihoodThresholds(
            float(np.exp(rng.uniform(-3.0, 3.0))),
            float(np.exp(rng.uniform(-3.0, 3.0))),
        )
        metrics = local_metrics(model, gammas_from_lambdas(model, lambdas))
        if rng.random() < 0.5:
            metrics = fault_adjust(metrics, FaultModel.uniform_split(rng.uniform(0.0, 0.3)))
        params = FusionParams(args.n, args.k)
        quality = fusion_quality(metrics, params)
        closed = {
            Hypothesis.EVENT1: quality.q_d1,
            Hypothesis.EVENT2: quality.q_d2,
            Hypothesis.NORMAL: quality.q_f,
        }
        for conditioning, value in closed.items():
            outcome = enumerate_fusion_oracle(metrics, params, conditioning)
            if conditioning is Hypothesis.EVENT1:
                reference = outcome.event1
            elif conditioning is Hypothesis.EVENT2:
                reference = outcome.event2
            else:
                reference = outcome.event1 + outcome.event2
            worst = max(worst, abs(value - reference))
            checked += 1
    print(f"checked {checked} quantities over {args.trials} random scenarios")
    print(f"max |closed-form - enumeration| = {worst:.3e}")
    if worst > args.tolerance:
        print(f"MISMATCH: exceeds tolerance {args.tolerance:.1e}", file=sys.stderr)
        return EXIT_ORACLE_MISMATCH
    print(f"agreement within {args.tolerance:.1e}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualdetect",
        description="Fault-tolerant fusion of ternary sensor decisions for two concurrent events",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="search likelihood-ratio thresholds")
    _add_config_arguments(p_opt)
    p_opt.set_defaults(func=_cmd_optimize)

    p_sim = sub.add_parser("simulate", help="run one seeded field realization")
    _add_config_arguments(p_sim)
    p_sim.add_argument("--output-dir", default=None, help="directory for CSV artifacts")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="average error rates across one parameter")
    _add_config_arguments(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p_sweep.add_argument(
        "--values", required=True,
        help="comma-separated values; use '/' inside one value for tuples, e.g. 5/3",
    )
    p_sweep.add_argument("--output", default="sweep.csv", help="sweep CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser(
        "oracle-check", help="compare fusion closed forms with exhaustive enumeration",
    )
    p_oracle.add_argument("--n", type=int, default=5)
    p_oracle.add_argument("--k", type=int, default=3)
    p_oracle.add_argument("--trials", type=int, default=25)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--tolerance", type=float, default=1e-10)
    p_oracle.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
