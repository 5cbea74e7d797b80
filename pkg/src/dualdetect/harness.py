"""Experiment harness: configs, seeded runs, sweeps, CSV artifacts.

Configuration files are flat ``key = value`` text with ``#`` comments.
Every key can also be supplied (and overridden) on the command line.
A single run writes per-sensor scatter CSVs plus a summary; a sweep
varies one parameter, re-optimizes the likelihood thresholds for each
value, averages the error rates over seeded repetitions, and writes one
CSV row per value.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .decision_rules import LikelihoodThresholds, gammas_from_lambdas
from .fusion import FaultModel, FusionParams
from .optimize import OptimizationResult, minimize_error
from .signal_model import Priors, SignalModel
from .simulator import (
    FaultSpec,
    FieldConfig,
    Rectangle,
    RunResult,
    generate_field,
    run_detection,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SingleRunArtifacts",
    "SweepRow",
    "SweepSummary",
    "load_config",
    "parse_config_text",
    "run_single",
    "run_sweep",
    "SWEEP_PARAMS",
    "SWEEP_CSV_HEADER",
    "SCATTER_CSV_HEADER",
]

SWEEP_PARAMS = ("p_f", "nk", "sensor_count", "means", "priors")
SCATTER_CSV_HEADER = "x,y,truth,decision,faulty"
SWEEP_CSV_HEADER = "param,ld_bf,fd_bf,ld_af,fd_af,lambda1,lambda2"


class ConfigError(ValueError):
    """Invalid configuration file, key, or value (CLI exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment's complete parameter set.

    Defaults reproduce the reference scenario: a 20 x 20 field with 200
    sensors, a 10 x 10 first-event region in the lower-left corner, an
    8 x 8 second-event region in the upper-right corner, 3-of-5 fusion,
    means (0, 3, 6) and priors (0.59, 0.25, 0.16).
    """

    width: float = 20.0
    height: float = 20.0
    sensor_count: int = 200
    event1_region: tuple[float, float, float, float] = (0.0, 0.0, 10.0, 10.0)
    event2_region: tuple[float, float, float, float] = (12.0, 12.0, 20.0, 20.0)
    neighborhood_size: int = 5
    quorum: int = 3
    include_self: bool = True
    m0: float = 0.0
    m1: float = 3.0
    m2: float = 6.0
    q0: float = 0.59
    q1: float = 0.25
    q2: float = 0.16
    p_f: float = 0.0
    alphas: tuple[float, float, float, float, float, float] | None = None
    fault_mode: str = "forced-change"
    seed: int = 1
    repetitions: int = 50
    lambda1: float | None = None
    lambda2: float | None = None
    output_dir: str = "runs"

    # -- derived building blocks -------------------------------------

    def signal_model(self) -> SignalModel:
        return SignalModel(self.m0, self.m1, self.m2)

    def priors(self) -> Priors:
        return Priors(self.q0, self.q1, self.q2)

    def fusion_params(self) -> FusionParams:
        return FusionParams(self.neighborhood_size, self.quorum)

    def field_config(self) -> FieldConfig:
        return FieldConfig(
            width=self.width,
            height=self.height,
            sensor_count=self.sensor_count,
            event1_region=Rectangle(*self.event1_region),
            event2_region=Rectangle(*self.event2_region),
            neighborhood_size=self.neighborhood_size,
            quorum=self.quorum,
            seed=self.seed,
            include_self=self.include_self,
        )

    def fault_model(self) -> FaultModel | None:
        if self.alphas is not None:
            return FaultModel(*self.alphas)
        if self.p_f > 0.0:
            return FaultModel.uniform_split(self.p_f)
        return None

    def fault_probability(self) -> float:
        model = self.fault_model()
        return 0.0 if model is None else model.total_probability

    def fault_spec(self) -> FaultSpec | None:
        model = self.fault_model()
        if model is None:
            return None
        return FaultSpec(self.fault_probability(), model, self.fault_mode)

    def threshold_override(self) -> LikelihoodThresholds | None:
        given = (self.lambda1 is not None, self.lambda2 is not None)
        if all(given):
            return LikelihoodThresholds(self.lambda1, self.lambda2)
        if any(given):
            raise ConfigError("lambda1 and lambda2 must be given together")
        return None

    def validate(self) -> "ExperimentConfig":
        """Run every derived constructor so bad values fail fast."""
        try:
            self.signal_model()
            self.priors()
            self.fusion_params()
            self.field_config()
            spec = self.fault_spec()
            if spec is not None and self.alphas is not None and self.p_f > 0.0:
                raise ConfigError("give either p_f or alpha1..alpha6, not both")
            self.threshold_override()
            if self.repetitions < 1:
                raise ConfigError(f"repetitions must be positive, got {self.repetitions}")
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        return self


# ---------------------------------------------------------------------------
# config file parsing

_REGION_KEYS = {"event1_region", "event2_region"}
_ALPHA_KEYS = tuple(f"alpha{i}" for i in range(1, 7))

_BOOL_VALUES = {"true": True, "false": False, "yes": True, "no": False,
                "1": True, "0": False}


def _parse_bool(raw: str) -> bool:
    try:
        return _BOOL_VALUES[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {raw!r}") from None


def _parse_region(raw: str) -> tuple[float, float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"regions need 4 comma-separated numbers, got {raw!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ConfigError(f"regions need 4 comma-separated numbers, got {raw!r}") from None


_SCALAR_PARSERS = {
    "width": float, "height": float, "sensor_count": int,
    "neighborhood_size": int, "quorum": int, "include_self": _parse_bool,
    "m0": float, "m1": float, "m2": float,
    "q0": float, "q1": float, "q2": float,
    "p_f": float, "fault_mode": str, "seed": int, "repetitions": int,
    "lambda1": float, "lambda2": float, "output_dir": str,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse flat ``key = value`` lines into typed values."""
    values: dict[str, object] = {}
    alphas: dict[str, float] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in _REGION_KEYS:
            values[key] = _parse_region(raw)
        elif key in _ALPHA_KEYS:
            try:
                alphas[key] = float(raw)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: {key} needs a number") from None
        elif key in _SCALAR_PARSERS:
            try:
                values[key] = _SCALAR_PARSERS[key](raw)
            except ConfigError:
                raise
            except (ValueError, TypeError):
                raise ConfigError(f"{source}:{lineno}: bad value for {key}: {raw!r}") from None
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    if alphas:
        missing = [k for k in _ALPHA_KEYS if k not in alphas]
        if missing:
            raise ConfigError(f"{source}: alpha table incomplete, missing {missing}")
        values["alphas"] = tuple(alphas[k] for k in _ALPHA_KEYS)
    return values


def load_config(
    path: str | Path | None, overrides: dict[str, object] | None = None
) -> ExperimentConfig:
    """Build a config from an optional file plus override values."""
    values: dict[str, object] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        values.update(parse_config_text(text, source=str(path)))
    if overrides:
        values.update(overrides)
    valid_names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - valid_names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        config = ExperimentConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()


# ---------------------------------------------------------------------------
# single runs

@dataclass(frozen=True)
class SingleRunArtifacts:
    """Paths and headline numbers produced by one `simulate` call."""

    config: ExperimentConfig
    thresholds: LikelihoodThresholds
    optimization: OptimizationResult | None
    result: RunResult
    summary: dict[str, object]
    paths: tuple[Path, ...]


def _optimize_for(config: ExperimentConfig) -> tuple[LikelihoodThresholds, OptimizationResult | None]:
    override = config.threshold_override()
    if override is not None:
        return override, None
    result = minimize_error(
        config.signal_model(),
        config.priors(),
        config.fusion_params(),
        config.fault_model(),
    )
    return result.thresholds, result


def _format_value(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating, np.integer)):
        return repr(value.item())
    return str(value)


def _write_csv(path: Path, header: str, rows: list[list[object]]) -> None:
    lines = [header]
    lines.extend(",".join(_format_value(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _scatter_rows(
    result: RunResult, decisions: np.ndarray, faulty: np.ndarray
) -> list[list[object]]:
    positions = result.field.positions
    truth = result.field.truth
    return [
        [
            float(positions[i, 0]),
            float(positions[i, 1]),
            int(truth[i]),
            int(decisions[i]),
            int(faulty[i]),
        ]
        for i in range(positions.shape[0])
    ]


def run_single(config: ExperimentConfig, output_dir: str | Path | None = None) -> SingleRunArtifacts:
    """Run one seeded simulation and write its scatter + summary CSVs.

    Scatter files pair the decision layer (local/final) with the fault
    stage (clean always; faulty only when faults are configured). Every
    error percentage in the summary is recomputable from the matching
    scatter file.
    """
    config = config.validate()
    out = Path(output_dir) if output_dir is not None else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    thresholds, optimization = _optimize_for(config)
    gammas = gammas_from_lambdas(config.signal_model(), thresholds)
    rng = np.random.default_rng(config.seed)
    field = generate_field(config.field_config(), rng)
    result = run_detection(
        field, config.signal_model(), gammas, config.fusion_params(),
        config.fault_spec(), rng,
    )

    no_fault_flags = np.zeros(config.sensor_count, dtype=bool)
    artifacts: list[tuple[str, np.ndarray, np.ndarray]] = [
        ("local_decisions.csv", result.local, no_fault_flags),
        ("final_decisions.csv", result.clean_final, no_fault_flags),
    ]
    if config.fault_spec() is not None:
        artifacts.extend(
            [
                ("local_decisions_faulty.csv", result.reported, result.faulty),
                ("final_decisions_faulty.csv", result.final, result.faulty),
            ]
        )
    paths = []
    for name, decisions, flags in artifacts:
        path = out / name
        _write_csv(path, SCATTER_CSV_HEADER, _scatter_rows(result, decisions, flags))
        paths.append(path)

    summary: dict[str, object] = {
        "sensor_count": config.sensor_count,
        "seed": config.seed,
        "lambda1": thresholds.lambda1,
        "lambda2": thresholds.lambda2,
        "thresholds_from_optimizer": optimization is not None,
        "optimizer_objective": "" if optimization is None else optimization.objective_value,
        "optimizer_evaluations": "" if optimization is None else optimization.evaluations,
        "optimizer_converged": "" if optimization is None else optimization.converged,
        "p_f": config.fault_probability(),
        "fault_mode": config.fault_mode if config.fault_spec() is not None else "",
        "fault_count": result.fault_count,
        "local_error_percent": 100.0 * result.clean_local_error_rate,
        "final_error_percent": 100.0 * result.clean_final_error_rate,
        "local_error_faulty_percent": 100.0 * result.local_error_rate,
        "final_error_faulty_percent": 100.0 * result.final_error_rate,
    }
    summary_path = out / "summary.csv"
    _write_csv(summary_path, "key,value", [[k, v] for k, v in summary.items()])
    paths.append(summary_path)

    return SingleRunArtifacts(
        config=config,
        thresholds=thresholds,
        optimization=optimization,
        result=result,
        summary=summary,
        paths=tuple(paths),
    )


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepRow:
    """Averaged results for one sweep value (percentages)."""

    label: str
    ld_bf: float
    fd_bf: float
    ld_af: float
    fd_af: float
    lambda1: float
    lambda2: float
    converged: bool


@dataclass(frozen=True)
class SweepSummary:
    param: str
    rows: tuple[SweepRow, ...]

    @property
    def all_converged(self) -> bool:
        return all(row.converged for row in self.rows)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = [
            [row.label, row.ld_bf, row.fd_bf, row.ld_af, row.fd_af,
             row.lambda1, row.lambda2]
            for row in self.rows
        ]
        _write_csv(path, SWEEP_CSV_HEADER, rows)
        return path


def _apply_sweep_value(
    base: ExperimentConfig, param: str, raw: str
) -> tuple[ExperimentConfig, str]:
    """Return the cell config and its canonical label for one sweep value."""
    raw = raw.strip()
    try:
        if param == "p_f":
            value = float(raw)
            return replace(base, p_f=value, alphas=None), repr(value)
        if param == "nk":
            n_str, k_str = raw.split("/")
            n, k = int(n_str), int(k_str)
            return replace(base, neighborhood_size=n, quorum=k), f"{n}/{k}"
        if param == "sensor_count":
            value = int(raw)
            return replace(base, sensor_count=value), str(value)
        if param == "means":
            m0, m1, m2 = (float(p) for p in raw.split("/"))
            return replace(base, m0=m0, m1=m1, m2=m2), f"{m0!r}/{m1!r}/{m2!r}"
        if param == "priors":
            q0, q1, q2 = (float(p) for p in raw.split("/"))
            return replace(base, q0=q0, q1=q1, q2=q2), f"{q0!r}/{q1!r}/{q2!r}"
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad {param} sweep value {raw!r}: {exc}") from exc
    raise ConfigError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")


def _cell_rng(base_seed: int, run_index: int, param: str, label: str) -> np.random.Generator:
    # Decorrelates cells while keeping rows reproducible and independent
    # of their position in the value list.
    digest = hashlib.sha256(f"{param}={label}".encode()).digest()
    cell_key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence((base_seed + run_index, cell_key)))


def run_sweep(base: ExperimentConfig, param: str, values: list[str]) -> SweepSummary:
    """Average seeded runs for each value of one swept parameter.

    Each cell re-optimizes the thresholds for its own parameters (using
    the fault-adjusted objective when faults are configured), then runs
    ``repetitions`` independent field realizations. Error columns are
    percentages: local/final decision errors before (ld_bf, fd_bf) and
    after (ld_af, fd_af) fault injection.
    """
    base = base.validate()
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for raw in values:
        cell, label = _apply_sweep_value(base, param, raw)
        cell = cell.validate()
        thresholds, optimization = _optimize_for(cell)
        gammas = gammas_from_lambdas(cell.signal_model(), thresholds)
        spec = cell.fault_spec()
        model = cell.signal_model()
        params = cell.fusion_params()
        field_config = cell.field_config()

        sums = np.zeros(4)
        for r in range(cell.repetitions):
            rng = _cell_rng(cell.seed, r, param, label)
            field = generate_field(field_config, rng)
            result = run_detection(field, model, gammas, params, spec, rng)
            sums += (
                result.clean_local_error_rate,
                result.clean_final_error_rate,
                result.local_error_rate,
                result.final_error_rate,
            )
        averages = 100.0 * sums / cell.repetitions
        rows.append(
            SweepRow(
                label=label,
                ld_bf=float(averages[0]),
                fd_bf=float(averages[1]),
                ld_af=float(averages[2]),
                fd_af=float(averages[3]),
                lambda1=thresholds.lambda1,
                lambda2=thresholds.lambda2,
                converged=optimization.converged if optimization is not None else True,
            )
        )
    return SweepSummary(param=param, rows=tuple(rows))
