"""Configuration-driven Monte-Carlo experiment runner.

Ties the package together: parse a flat key=value config, simulate
snapshots over independently seeded runs, solve the requested
beamformers, aggregate beam-pattern metrics as median/IQR, and write
plot-ready CSV files (one pattern file per method plus one metrics
table).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .analysis import BeamPattern, beam_pattern, null_depth, output_sinr, pointing_error, sidelobe_level
from .arrays import ArrayGeometry, Scenario, generate_snapshots, interference_grid, steering_matrix, steering_vector
from .covariance import sample_covariance
from .errors import ConfigError, DomainError, SolverError
from .solvers import SolverOptions, build_ellipsoid, mvdr, solve_rmvb, solve_rwsc, solve_sc, solve_wsc
from .weighting import build_q

__all__ = [
    "METHOD_NAMES",
    "ExperimentConfig",
    "MetricRow",
    "ExperimentReport",
    "parse_config",
    "run_experiment",
    "emit_pattern_csv",
    "emit_metrics_csv",
]

METHOD_NAMES = ("mvdr", "sc", "wsc", "rmvb", "rwsc")

_METRIC_RESOLUTION_DEG = 0.1
_NULL_WINDOW_DEG = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ellipsoid_half_width_deg = None selects the default
    max(|mismatch_deg|, 3 deg). failure_budget bounds how many per-run
    solver failures the CLI tolerates before reporting an error exit.
    """

    geometry: ArrayGeometry
    scenario: Scenario
    methods: tuple[str, ...]
    solver_options: SolverOptions = SolverOptions()
    mismatch_deg: float = 0.0
    monte_carlo_runs: int = 1
    grid_resolution_deg: float = 1.0
    output_dir: str = "results"
    ellipsoid_half_width_deg: float | None = None
    ellipsoid_num_samples: int = 61
    failure_budget: int = 0

    def __post_init__(self):
        if not self.methods:
            raise DomainError("methods must be non-empty")
        for name in self.methods:
            if name not in METHOD_NAMES:
                raise DomainError(f"unknown method {name!r}; choose from {METHOD_NAMES}")
        if len(set(self.methods)) != len(self.methods):
            raise DomainError("methods must not repeat")
        if self.monte_carlo_runs < 1:
            raise DomainError("monte_carlo_runs must be >= 1")
        if not 0 < self.grid_resolution_deg <= 1.0:
            raise DomainError("grid_resolution_deg must lie in (0, 1]")
        if self.ellipsoid_half_width_deg is not None and self.ellipsoid_half_width_deg < 0:
            raise DomainError("ellipsoid_half_width_deg must be nonnegative")
        if self.ellipsoid_num_samples < 2:
            raise DomainError("ellipsoid_num_samples must be >= 2")
        if self.failure_budget < 0:
            raise DomainError("failure_budget must be nonnegative")

    @property
    def steer_deg(self) -> float:
        """Direction every solver is pointed at (true DOA plus mismatch)."""
        return self.scenario.soi_doa_deg + self.mismatch_deg

    @property
    def effective_half_width_deg(self) -> float:
        if self.ellipsoid_half_width_deg is not None:
            return self.ellipsoid_half_width_deg
        return max(abs(self.mismatch_deg), 3.0)


@dataclass(frozen=True)
class MetricRow:
    method: str
    metric: str
    median: float
    iqr: float
    failures: int


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated experiment outcome.

    patterns hold the per-method pointwise-median beam pattern on the
    export grid, renormalized to a 0 dB peak. run_seeds allows replaying
    any single run by constructing its Scenario directly.
    """

    methods: tuple[str, ...]
    patterns: dict[str, BeamPattern]
    metrics: tuple[MetricRow, ...]
    run_seeds: tuple[int, ...]
    failures: dict[str, int] = field(default_factory=dict)

    @property
    def total_failures(self) -> int:
        return sum(self.failures.values())


# --- config parsing -------------------------------------------------------

def _parse_float(raw: str, key: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value: expected a number, got {raw!r}", key=key) from exc
    if not math.isfinite(value):
        raise ConfigError(f"invalid value: must be finite, got {raw!r}", key=key)
    return value


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value: expected an integer, got {raw!r}", key=key) from exc


def _parse_interferers(raw: str, key: str) -> tuple[tuple[float, float], ...]:
    if not raw.strip():
        return ()
    out = []
    for chunk in raw.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ConfigError(
                f"invalid value: expected 'doa:inr_db' pairs, got {chunk.strip()!r}", key=key
            )
        out.append((_parse_float(parts[0], key), _parse_float(parts[1], key)))
    return tuple(out)


def _parse_methods(raw: str, key: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in raw.split(",") if part.strip())
    if not names:
        raise ConfigError("invalid value: methods must be non-empty", key=key)
    for name in names:
        if name not in METHOD_NAMES:
            raise ConfigError(
                f"invalid value: unknown method {name!r}; choose from {','.join(METHOD_NAMES)}",
                key=key,
            )
    if len(set(names)) != len(names):
        raise ConfigError("invalid value: methods must not repeat", key=key)
    return names


_KNOWN_KEYS = {
    "array.num_elements",
    "array.spacing_wavelengths",
    "scenario.soi_doa_deg",
    "scenario.soi_snr_db",
    "scenario.interferers",
    "scenario.num_snapshots",
    "scenario.noise_power",
    "scenario.rng_seed",
    "solver.gamma",
    "solver.p",
    "solver.max_iterations",
    "solver.objective_tolerance",
    "solver.irls_epsilon",
    "solver.diagonal_loading",
    "experiment.methods",
    "experiment.mismatch_deg",
    "experiment.monte_carlo_runs",
    "experiment.grid_resolution_deg",
    "experiment.output_dir",
    "experiment.failure_budget",
    "ellipsoid.half_width_deg",
    "ellipsoid.num_samples",
}

_REQUIRED_KEYS = (
    "array.num_elements",
    "scenario.soi_doa_deg",
    "scenario.soi_snr_db",
    "experiment.methods",
)


def _read_pairs(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"missing or unreadable config file: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"malformed syntax at line {lineno}: expected 'key = value'")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError("unknown key", key=key)
        if key in pairs:
            raise ConfigError("duplicate key", key=key)
        pairs[key] = value
    return pairs


def parse_config(path) -> ExperimentConfig:
    """Parse and validate a flat dotted key=value config file.

    '#' starts a comment; blank lines are ignored; unknown or duplicate
    keys are rejected with the offending key named. Domain invariant
    violations (e.g. an interferer at the SOI DOA) surface as
    ConfigError carrying the responsible section.
    """
    pairs = _read_pairs(path)
    for key in _REQUIRED_KEYS:
        if key not in pairs:
            raise ConfigError("missing key", key=key)

    def take(key: str, parse: Callable, default=None):
        if key in pairs:
            return parse(pairs[key], key)
        return default

    try:
        geometry = ArrayGeometry(
            num_elements=_parse_int(pairs["array.num_elements"], "array.num_elements"),
            spacing_wavelengths=take("array.spacing_wavelengths", _parse_float, 0.5),
        )
    except DomainError as exc:
        raise ConfigError(f"invariant violation: {exc}", key="array") from exc
    try:
        scenario = Scenario(
            soi_doa_deg=_parse_float(pairs["scenario.soi_doa_deg"], "scenario.soi_doa_deg"),
            soi_snr_db=_parse_float(pairs["scenario.soi_snr_db"], "scenario.soi_snr_db"),
            interferers=take("scenario.interferers", _parse_interferers, ()),
            num_snapshots=take("scenario.num_snapshots", _parse_int, 100),
            noise_power=take("scenario.noise_power", _parse_float, 1.0),
            rng_seed=take("scenario.rng_seed", _parse_int, 0),
        )
    except DomainError as exc:
        raise ConfigError(f"invariant violation: {exc}", key="scenario") from exc
    try:
        solver_options = SolverOptions(
            gamma=take("solver.gamma", _parse_float, 2.0),
            p=take("solver.p", _parse_float, 1.0),
            max_iterations=take("solver.max_iterations", _parse_int, 100),
            objective_tolerance=take("solver.objective_tolerance", _parse_float, 1e-8),
            irls_epsilon=take("solver.irls_epsilon", _parse_float, 1e-8),
            diagonal_loading=take("solver.diagonal_loading", _parse_float, 1e-6),
        )
    except DomainError as exc:
        raise ConfigError(f"invariant violation: {exc}", key="solver") from exc
    try:
        return ExperimentConfig(
            geometry=geometry,
            scenario=scenario,
            methods=_parse_methods(pairs["experiment.methods"], "experiment.methods"),
            solver_options=solver_options,
            mismatch_deg=take("experiment.mismatch_deg", _parse_float, 0.0),
            monte_carlo_runs=take("experiment.monte_carlo_runs", _parse_int, 1),
            grid_resolution_deg=take("experiment.grid_resolution_deg", _parse_float, 1.0),
            output_dir=take("experiment.output_dir", lambda raw, _key: raw, "results"),
            ellipsoid_half_width_deg=take("ellipsoid.half_width_deg", _parse_float, None),
            ellipsoid_num_samples=take("ellipsoid.num_samples", _parse_int, 61),
            failure_budget=take("experiment.failure_budget", _parse_int, 0),
        )
    except DomainError as exc:
        raise ConfigError(f"invariant violation: {exc}", key="experiment") from exc


# --- orchestration --------------------------------------------------------

def _solve_one(method, r, a_grid, q, a0, ellipsoid, opts):
    if method == "mvdr":
        return mvdr(r, a0, opts)
    if method == "sc":
        return solve_sc(r, a_grid, a0, opts)
    if method == "wsc":
        return solve_wsc(r, a_grid, q, a0, opts)
    if method == "rmvb":
        return solve_rmvb(r, ellipsoid, opts)
    if method == "rwsc":
        return solve_rwsc(r, a_grid, q, ellipsoid, opts)
    raise DomainError(f"unknown method {method!r}")


def _metric_names(scenario: Scenario) -> tuple[str, ...]:
    names = [f"null_depth_{doa:g}deg" for doa, _ in scenario.interferers]
    names += ["sidelobe_level_db", "pointing_error_deg", "output_sinr_db"]
    return tuple(names)


def _run_metrics(w, config: ExperimentConfig) -> dict[str, float]:
    pattern = beam_pattern(w, config.geometry, _METRIC_RESOLUTION_DEG)
    values: dict[str, float] = {}
    for doa, _ in config.scenario.interferers:
        values[f"null_depth_{doa:g}deg"] = null_depth(pattern, doa, _NULL_WINDOW_DEG)
    # Centering on the observed peak keeps the mainlobe search valid for
    # mis-steered patterns whose peak drifts away from the nominal DOA.
    values["sidelobe_level_db"] = sidelobe_level(pattern, pattern.peak_angle_deg).level_db
    values["pointing_error_deg"] = pointing_error(pattern, config.scenario.soi_doa_deg)
    values["output_sinr_db"] = output_sinr(w, config.scenario, config.geometry)
    return values


def _median_pattern(raw_rows: list[np.ndarray], angles: np.ndarray) -> BeamPattern:
    stacked = np.vstack(raw_rows)
    median_raw = np.median(stacked, axis=0)
    peak = float(median_raw.max())
    if peak <= 0:
        raise SolverError("median pattern collapsed to zero")
    normalized = median_raw / peak
    with np.errstate(divide="ignore"):
        gain_db = np.maximum(10.0 * np.log10(normalized), -200.0)
    return BeamPattern(angles, gain_db, normalized)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute every Monte-Carlo run and write the CSV artifacts.

    Run i re-seeds the scenario with rng_seed + i. Solver failures are
    caught per (run, method), excluded from all aggregates, and counted
    in the report and the metrics CSV. Outputs are deterministic
    functions of the config.
    """
    geometry, scenario = config.geometry, config.scenario
    steer = config.steer_deg
    penalty_grid = interference_grid(steer, config.grid_resolution_deg)
    a_grid = steering_matrix(geometry, penalty_grid)
    a0 = steering_vector(geometry, steer)
    needs_q = any(m in config.methods for m in ("wsc", "rwsc"))
    ellipsoid = None
    if any(m in config.methods for m in ("rmvb", "rwsc")):
        ellipsoid = build_ellipsoid(
            geometry, steer, config.effective_half_width_deg, config.ellipsoid_num_samples
        )

    export_count = int(round(180.0 / config.grid_resolution_deg)) + 1
    export_angles = np.linspace(-90.0, 90.0, export_count)
    export_matrix = steering_matrix(geometry, export_angles)

    per_metric: dict[str, dict[str, list[float]]] = {m: {} for m in config.methods}
    export_raws: dict[str, list[np.ndarray]] = {m: [] for m in config.methods}
    failures = {m: 0 for m in config.methods}
    seeds = tuple(scenario.rng_seed + i for i in range(config.monte_carlo_runs))

    for seed in seeds:
        run_scenario = dataclasses.replace(scenario, rng_seed=seed)
        snapshots = generate_snapshots(run_scenario, geometry)
        r = sample_covariance(snapshots)
        q = build_q(a_grid, snapshots) if needs_q else None
        for method in config.methods:
            try:
                result = _solve_one(
                    method, r, a_grid, q, a0, ellipsoid, config.solver_options
                )
            except SolverError:
                failures[method] += 1
                continue
            for name, value in _run_metrics(result.w, config).items():
                per_metric[method].setdefault(name, []).append(value)
            raw = np.abs(result.w.conj() @ export_matrix) ** 2
            export_raws[method].append(raw)

    metric_names = _metric_names(scenario)
    rows = []
    for method in config.methods:
        for name in metric_names:
            samples = per_metric[method].get(name, [])
            if samples:
                arr = np.asarray(samples)
                median = float(np.median(arr))
                iqr = float(np.percentile(arr, 75) - np.percentile(arr, 25))
            else:
                median, iqr = float("nan"), float("nan")
            rows.append(MetricRow(method, name, median, iqr, failures[method]))

    patterns: dict[str, BeamPattern] = {}
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for method in config.methods:
        if export_raws[method]:
            pattern = _median_pattern(export_raws[method], export_angles)
            patterns[method] = pattern
            emit_pattern_csv(pattern, out_dir / f"pattern_{method}.csv")
        else:
            # Every configured method yields exactly one artifact, even
            # when all of its runs failed: an empty (header-only) file.
            _write_rows(out_dir / f"pattern_{method}.csv", "theta_deg,gain_db,raw_gain", [])
    report = ExperimentReport(
        methods=config.methods,
        patterns=patterns,
        metrics=tuple(rows),
        run_seeds=seeds,
        failures=failures,
    )
    emit_metrics_csv(report, out_dir / "metrics.csv")
    return report


# --- CSV emission ---------------------------------------------------------

def _write_rows(path, header: str, rows: list[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(header + "\n")
            for row in rows:
                handle.write(row + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_pattern_csv(pattern: BeamPattern, path) -> None:
    """Write theta_deg,gain_db,raw_gain rows at fixed six decimals."""
    rows = [
        f"{theta:.6f},{db:.6f},{raw:.6f}"
        for theta, db, raw in zip(pattern.angles_deg, pattern.gain_db, pattern.raw_gain)
    ]
    _write_rows(path, "theta_deg,gain_db,raw_gain", rows)


def emit_metrics_csv(report: ExperimentReport, path) -> None:
    """Write method,metric,median,iqr,failures rows at fixed six decimals."""
    rows = [
        f"{row.method},{row.metric},{row.median:.6f},{row.iqr:.6f},{row.failures}"
        for row in report.metrics
    ]
    _write_rows(path, "method,metric,median,iqr,failures", rows)
