"""Batch experiment runner: TOML experiment configs in, CSV data files out.

Verbs: `run <config>` executes one experiment and writes its CSV (with a
`#`-prefixed metadata header echoing the full config, the package version,
and the seed), `validate <config>` checks the schema without running, and
`list` prints the bundled figure-reproduction configs. <config> may be a
file path or the name of a bundled config.

Exit codes: 0 success, 2 schema violation (field-level message on stderr),
3 master-equation validity failure (override with --force).

Plotting is out of scope: every experiment emits plain CSV columns,
documented per kind in the runner docstrings below. The column layout per
kind is stable. Sweep kinds parallelize their independent cells over a
thread pool sized by the `workers` key; the ANNEALSIM_WORKERS environment
variable overrides it.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .dynamics import (
    IntegratorOptions,
    analytic_static_dephasing,
    analytic_static_scl,
    analytic_static_wcl,
    evolve_closed_qubit,
    evolve_scl_qubit,
    evolve_wcl_qubit,
    optimal_tf_vs_coupling,
    sweep_tf,
)
from .hamiltonians import (
    PAULI_Z,
    IsingInstance,
    Schedule,
    SingleQubitModel,
    adiabatic_parameter,
    load_instance,
    quantum_signature_instance,
    site_operator,
)
from .multiqubit_analysis import build_rate_report
from .spectral_bath import SpectralModel, gamma
from .sqa_eb import QmcConfig, pi_pc_experiment, write_ratio_table
from .storage import write_table
from .wcl_generator import CouplingSet, DegeneracyError

__all__ = ["main", "SchemaError", "ExperimentConfig", "load_config", "run_experiment"]

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_VALIDITY = 3

WORKERS_ENV = "ANNEALSIM_WORKERS"

KINDS = (
    "static-analytic",
    "wcl-trajectory",
    "scl-trajectory",
    "tf-sweep",
    "coupling-sweep",
    "beta-schedule-sweep",
    "rate-report",
    "sqa-eb",
    "bath-spectrum",
)


class SchemaError(Exception):
    """Config fails validation; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment: kind dispatch plus normalized options."""

    kind: str
    output: str
    seed: int
    workers: int
    options: dict
    echo: dict  # flattened raw config for the CSV metadata header


# ---------------------------------------------------------------------------
# schema helpers


def _check_table(raw: dict, where: str, allowed: set) -> None:
    for key in raw:
        if key not in allowed:
            raise SchemaError(f"{where}{key}: unknown field")


def _get(raw: dict, key: str, where: str = ""):
    if key not in raw:
        raise SchemaError(f"{where}{key}: required field is missing")
    return raw[key]


def _number(raw: dict, key: str, where: str = "", *, default=None,
            positive=False, nonnegative=False) -> float:
    if key not in raw:
        if default is None:
            raise SchemaError(f"{where}{key}: required field is missing")
        return float(default)
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}{key}: expected a number, got {value!r}")
    value = float(value)
    if positive and value <= 0:
        raise SchemaError(f"{where}{key}: must be positive, got {value}")
    if nonnegative and value < 0:
        raise SchemaError(f"{where}{key}: must be non-negative, got {value}")
    return value


def _integer(raw: dict, key: str, where: str = "", *, default=None,
             minimum=None) -> int:
    if key not in raw:
        if default is None:
            raise SchemaError(f"{where}{key}: required field is missing")
        return int(default)
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaError(f"{where}{key}: must be >= {minimum}, got {value}")
    return value


def _string(raw: dict, key: str, where: str = "", *, default=None,
            choices=None) -> str:
    if key not in raw:
        if default is None:
            raise SchemaError(f"{where}{key}: required field is missing")
        return default
    value = raw[key]
    if not isinstance(value, str):
        raise SchemaError(f"{where}{key}: expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise SchemaError(
            f"{where}{key}: must be one of {sorted(choices)}, got {value!r}"
        )
    return value


def _boolean(raw: dict, key: str, where: str = "", *, default: bool) -> bool:
    if key not in raw:
        return default
    value = raw[key]
    if not isinstance(value, bool):
        raise SchemaError(f"{where}{key}: expected true/false, got {value!r}")
    return value


def _number_list(raw: dict, key: str, where: str = "", *, nonempty=False,
                 nonnegative=False, positive=False, default=None) -> list:
    if key not in raw:
        if default is None:
            raise SchemaError(f"{where}{key}: required field is missing")
        return list(default)
    value = raw[key]
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise SchemaError(f"{where}{key}: expected a list of numbers")
    if nonempty and not value:
        raise SchemaError(f"{where}{key}: list must not be empty")
    if nonnegative and any(v < 0 for v in value):
        raise SchemaError(f"{where}{key}: entries must be non-negative")
    if positive and any(v <= 0 for v in value):
        raise SchemaError(f"{where}{key}: entries must be positive")
    return [float(v) for v in value]


def _model_from(raw: dict) -> SingleQubitModel:
    table = raw.get("model")
    if not isinstance(table, dict):
        raise SchemaError("model: required table is missing")
    _check_table(table, "model.", {"omega_x", "omega_z", "schedule", "schedule_k"})
    omega_x = _number(table, "omega_x", "model.", positive=True)
    omega_z = _number(table, "omega_z", "model.", positive=True)
    kind = _string(table, "schedule", "model.", default="linear",
                   choices={"linear", "beta"})
    k = _integer(table, "schedule_k", "model.", default=0, minimum=0)
    return SingleQubitModel(omega_x, omega_z, Schedule(kind, k))


def _bath_from(raw: dict, *, allow_zero_coupling=True) -> SpectralModel:
    table = raw.get("bath")
    if not isinstance(table, dict):
        raise SchemaError("bath: required table is missing")
    _check_table(table, "bath.", {"coupling", "inv_temperature", "cutoff"})
    coupling = _number(table, "coupling", "bath.", nonnegative=True)
    if not allow_zero_coupling and coupling == 0:
        raise SchemaError("bath.coupling: must be positive for this experiment")
    inv_temperature = _number(table, "inv_temperature", "bath.", positive=True)
    cutoff = _number(table, "cutoff", "bath.", positive=True)
    return SpectralModel(coupling=coupling, inv_temperature=inv_temperature,
                         cutoff=cutoff)


def _integrator_from(raw: dict) -> IntegratorOptions:
    table = raw.get("integrator", {})
    if not isinstance(table, dict):
        raise SchemaError("integrator: expected a table")
    _check_table(table, "integrator.", {"rtol", "atol", "grid_points", "method"})
    defaults = IntegratorOptions()
    return IntegratorOptions(
        rtol=_number(table, "rtol", "integrator.", default=defaults.rtol,
                     positive=True),
        atol=_number(table, "atol", "integrator.", default=defaults.atol,
                     positive=True),
        grid_points=_integer(table, "grid_points", "integrator.",
                             default=defaults.grid_points, minimum=2),
        method=_string(table, "method", "integrator.", default=defaults.method,
                       choices={"auto", "explicit", "implicit"}),
    )


def _instance_from(raw: dict, config_dir: Path) -> IsingInstance:
    name = raw.get("instance")
    path = raw.get("instance_file")
    if (name is None) == (path is None):
        raise SchemaError(
            "instance: give exactly one of instance = \"signature\" or "
            "instance_file = \"<path.toml>\""
        )
    if name is not None:
        if name != "signature":
            raise SchemaError(
                f"instance: only \"signature\" is bundled, got {name!r}"
            )
        return quantum_signature_instance()
    if not isinstance(path, str):
        raise SchemaError("instance_file: expected a path string")
    resolved = Path(path)
    if not resolved.is_absolute():
        resolved = config_dir / resolved
    if not resolved.is_file():
        raise SchemaError(f"instance_file: no such file: {resolved}")
    try:
        return load_instance(resolved)
    except (ValueError, KeyError, tomllib.TOMLDecodeError) as exc:
        raise SchemaError(f"instance_file: {exc}") from exc


def _flatten(raw, prefix="config"):
    flat = {}
    for key, value in raw.items():
        dotted = f"{prefix}.{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted))
        else:
            flat[dotted] = value
    return flat


# ---------------------------------------------------------------------------
# per-kind validation: each returns the normalized options dict


def _validate_bath_spectrum(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "bath",
                           "omega_min", "omega_max", "points"})
    omega_min = _number(raw, "omega_min", default=-10.0)
    omega_max = _number(raw, "omega_max", default=40.0)
    if omega_max <= omega_min:
        raise SchemaError("omega_max: must exceed omega_min")
    return {
        "bath": _bath_from(raw, allow_zero_coupling=False),
        "omega_min": omega_min,
        "omega_max": omega_max,
        "points": _integer(raw, "points", default=1001, minimum=2),
    }


def _validate_static_analytic(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "bath",
                           "variant", "omega", "t_max", "points",
                           "initial_state", "include_lamb_shift"})
    variant = _string(raw, "variant", choices={"dephasing", "wcl", "scl"})
    state = raw.get("initial_state", [0.5, 0.5, 0.0])
    state = _number_list({"initial_state": state}, "initial_state")
    if len(state) != 3:
        raise SchemaError(
            "initial_state: expected [p0, re_offdiag, im_offdiag]"
        )
    p0, re, im = state
    if not 0.0 <= p0 <= 1.0:
        raise SchemaError("initial_state: p0 must lie in [0, 1]")
    if re * re + im * im > p0 * (1.0 - p0) + 1e-12:
        raise SchemaError("initial_state: off-diagonal too large (not a state)")
    return {
        "bath": _bath_from(raw, allow_zero_coupling=False),
        "variant": variant,
        "omega": _number(raw, "omega", positive=True),
        "t_max": _number(raw, "t_max", positive=True),
        "points": _integer(raw, "points", default=201, minimum=2),
        "rho0": np.array([[p0, re + 1j * im], [re - 1j * im, 1.0 - p0]]),
        "include_lamb_shift": _boolean(raw, "include_lamb_shift", default=True),
    }


def _validate_trajectory(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "model",
                           "bath", "integrator", "t_f", "include_lamb_shift"})
    return {
        "model": _model_from(raw),
        "bath": _bath_from(raw),
        "options": _integrator_from(raw),
        "t_f": _number(raw, "t_f", positive=True),
        "include_lamb_shift": _boolean(raw, "include_lamb_shift", default=True),
    }


def _tf_grid_from(raw: dict) -> np.ndarray:
    tf_min = _number(raw, "tf_min", positive=True)
    tf_max = _number(raw, "tf_max", positive=True)
    if tf_max <= tf_min:
        raise SchemaError("tf_max: must exceed tf_min")
    points = _integer(raw, "tf_points", default=13, minimum=3)
    return np.logspace(math.log10(tf_min), math.log10(tf_max), points)


def _validate_tf_sweep(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "model",
                           "bath", "integrator", "tf_min", "tf_max",
                           "tf_points", "mode", "refine", "plateau_margin"})
    return {
        "model": _model_from(raw),
        "bath": _bath_from(raw),
        "options": _integrator_from(raw),
        "tf_grid": _tf_grid_from(raw),
        "mode": _string(raw, "mode", default="wcl", choices={"wcl", "scl"}),
        "refine": _boolean(raw, "refine", default=True),
        "plateau_margin": _number(raw, "plateau_margin", default=2e-3,
                                  positive=True),
    }


def _validate_coupling_sweep(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "model",
                           "bath", "integrator", "couplings", "tf_min",
                           "tf_max", "tf_points", "plateau_margin"})
    return {
        "model": _model_from(raw),
        "bath": _bath_from(raw),
        "options": _integrator_from(raw),
        "couplings": _number_list(raw, "couplings", nonempty=True,
                                  positive=True),
        "tf_grid": _tf_grid_from(raw),
        "plateau_margin": _number(raw, "plateau_margin", default=2e-3,
                                  positive=True),
    }


def _validate_beta_schedule_sweep(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "model",
                           "bath", "integrator", "schedule_orders",
                           "t_f_values", "include_lamb_shift"})
    orders = raw.get("schedule_orders")
    if not isinstance(orders, list) or not orders or any(
        isinstance(k, bool) or not isinstance(k, int) or k < 0 for k in orders
    ):
        raise SchemaError(
            "schedule_orders: expected a non-empty list of integers >= 0"
        )
    model_table = raw.get("model", {})
    if isinstance(model_table, dict) and "schedule" in model_table:
        raise SchemaError(
            "model.schedule: fixed by schedule_orders in this experiment"
        )
    return {
        "model": _model_from(raw),
        "bath": _bath_from(raw),
        "options": _integrator_from(raw),
        "orders": [int(k) for k in orders],
        "t_f_values": _number_list(raw, "t_f_values", positive=True,
                                   default=[]),
        "include_lamb_shift": _boolean(raw, "include_lamb_shift", default=True),
    }


def _validate_rate_report(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "bath",
                           "instance", "instance_file", "s"})
    s = _number(raw, "s")
    if not 0.0 <= s <= 1.0:
        raise SchemaError("s: must lie in [0, 1]")
    return {
        "instance": _instance_from(raw, config_dir),
        "bath": _bath_from(raw, allow_zero_coupling=False),
        "s": s,
    }


def _validate_sqa_eb(raw: dict, config_dir: Path) -> dict:
    _check_table(raw, "", {"kind", "output", "seed", "workers", "instance",
                           "instance_file", "beta", "n_tau", "sweeps",
                           "runs", "alphas", "bootstrap_resamples"})
    return {
        "instance": _instance_from(raw, config_dir),
        "beta": _number(raw, "beta", positive=True),
        "n_tau": _integer(raw, "n_tau", minimum=2),
        "sweeps": _integer(raw, "sweeps", minimum=1),
        "runs": _integer(raw, "runs", minimum=1),
        "alphas": _number_list(raw, "alphas", nonempty=True, nonnegative=True),
        "bootstrap_resamples": _integer(raw, "bootstrap_resamples",
                                        default=100, minimum=2),
    }


_VALIDATORS: dict = {
    "bath-spectrum": _validate_bath_spectrum,
    "static-analytic": _validate_static_analytic,
    "wcl-trajectory": _validate_trajectory,
    "scl-trajectory": _validate_trajectory,
    "tf-sweep": _validate_tf_sweep,
    "coupling-sweep": _validate_coupling_sweep,
    "beta-schedule-sweep": _validate_beta_schedule_sweep,
    "rate-report": _validate_rate_report,
    "sqa-eb": _validate_sqa_eb,
}


def load_config(path, workers_override: Optional[int] = None) -> ExperimentConfig:
    """Parse and schema-check one experiment file."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"config is not valid TOML: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("config must be a TOML table")

    kind = _string(raw, "kind", choices=set(KINDS))
    output = _string(raw, "output")
    seed = _integer(raw, "seed", default=0, minimum=0)
    workers = _integer(raw, "workers", default=1, minimum=1)
    if workers_override is not None:
        workers = workers_override
    options = _VALIDATORS[kind](raw, path.parent)
    return ExperimentConfig(
        kind=kind, output=output, seed=seed, workers=workers,
        options=options, echo=_flatten(raw),
    )


def _workers_from_env() -> Optional[int]:
    import os

    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return None
    try:
        workers = int(value)
    except ValueError:
        raise SchemaError(f"{WORKERS_ENV}: expected an integer, got {value!r}")
    if workers < 1:
        raise SchemaError(f"{WORKERS_ENV}: must be >= 1, got {workers}")
    return workers


# ---------------------------------------------------------------------------
# per-kind runners: each returns an optional validity failure message


def _base_metadata(config: ExperimentConfig) -> dict:
    meta = {"version": __version__, "seed": config.seed}
    meta.update(config.echo)
    return meta


def _run_bath_spectrum(config: ExperimentConfig) -> Optional[str]:
    """Columns: omega, gamma."""
    opts = config.options
    grid = np.linspace(opts["omega_min"], opts["omega_max"], opts["points"])
    rates = np.array([gamma(opts["bath"], w) for w in grid])
    write_table(config.output, {"omega": grid, "gamma": rates},
                _base_metadata(config))
    return None


def _run_static_analytic(config: ExperimentConfig) -> Optional[str]:
    """Columns: t, rho00, re_offdiag, im_offdiag."""
    opts = config.options
    times = np.linspace(0.0, opts["t_max"], opts["points"])
    solution = {
        "dephasing": lambda t: analytic_static_dephasing(
            opts["omega"], opts["bath"], opts["rho0"], t),
        "wcl": lambda t: analytic_static_wcl(
            opts["omega"], opts["bath"], opts["rho0"], t,
            include_lamb_shift=opts["include_lamb_shift"]),
        "scl": lambda t: analytic_static_scl(
            opts["omega"], opts["bath"], opts["rho0"], t),
    }[opts["variant"]]
    states = np.array([solution(t) for t in times])
    write_table(
        config.output,
        {
            "t": times,
            "rho00": states[:, 0, 0].real,
            "re_offdiag": states[:, 0, 1].real,
            "im_offdiag": states[:, 0, 1].imag,
        },
        _base_metadata(config),
    )
    return None


def _trajectory_validity(trajectory, force: bool) -> Optional[str]:
    report = trajectory.validity
    if report is None or report.ok or force:
        return None
    failing = ", ".join(
        f"{name} = {value:.3g}" for name, value in report.ratios().items()
        if value >= 1.0
    )
    return f"master-equation validity violated ({failing}); rerun with --force"


def _run_wcl_trajectory(config: ExperimentConfig, force: bool) -> Optional[str]:
    """Columns: s, p_gs, re_offdiag, im_offdiag, trace_drift, min_eig."""
    opts = config.options
    if opts["bath"].coupling == 0.0:
        closed_options = replace(
            IntegratorOptions(rtol=1e-12, atol=1e-14),
            grid_points=opts["options"].grid_points,
        )
        trajectory = evolve_closed_qubit(opts["model"], opts["t_f"],
                                         options=closed_options)
    else:
        trajectory = evolve_wcl_qubit(
            opts["model"], opts["bath"], opts["t_f"], options=opts["options"],
            include_lamb_shift=opts["include_lamb_shift"],
        )
    failure = _trajectory_validity(trajectory, force)
    if failure is None:
        trajectory.to_csv(config.output, _base_metadata(config))
    return failure


def _run_scl_trajectory(config: ExperimentConfig, force: bool) -> Optional[str]:
    """Columns: s, p_gs, re_offdiag, im_offdiag, trace_drift, min_eig."""
    opts = config.options
    trajectory = evolve_scl_qubit(opts["model"], opts["bath"], opts["t_f"],
                                  options=opts["options"])
    failure = _trajectory_validity(trajectory, force)
    if failure is None:
        trajectory.to_csv(config.output, _base_metadata(config))
    return failure


def _run_tf_sweep(config: ExperimentConfig) -> Optional[str]:
    """Columns: t_f, adiabatic_parameter, p_final."""
    opts = config.options
    sweep = sweep_tf(
        opts["model"], opts["bath"], opts["tf_grid"], options=opts["options"],
        mode=opts["mode"], refine=opts["refine"],
        plateau_margin=opts["plateau_margin"], workers=config.workers,
    )
    meta = _base_metadata(config)
    meta.update({
        "gibbs_population": sweep.gibbs_population,
        "plateau_margin": sweep.plateau_margin,
        "optimal_tf": "none" if sweep.optimal_tf is None else repr(sweep.optimal_tf),
        "optimal_population": sweep.optimal_population,
    })
    params = np.array(
        [adiabatic_parameter(opts["model"], t) for t in sweep.t_f]
    )
    write_table(
        config.output,
        {
            "t_f": sweep.t_f,
            "adiabatic_parameter": params,
            "p_final": sweep.final_population,
        },
        meta,
    )
    return None


def _run_coupling_sweep(config: ExperimentConfig) -> Optional[str]:
    """Columns: coupling, optimal_tf, p_max, adiabatic_parameter."""
    opts = config.options
    result = optimal_tf_vs_coupling(
        opts["model"], opts["bath"], opts["couplings"], opts["tf_grid"],
        options=opts["options"], plateau_margin=opts["plateau_margin"],
        workers=config.workers,
    )
    result.to_csv(config.output, _base_metadata(config))
    return None


def _numeric_min_gap(model: SingleQubitModel) -> float:
    """Minimum spectral gap located by bounded scalar minimization."""
    from scipy.optimize import minimize_scalar

    def gap(s: float) -> float:
        energies = np.linalg.eigvalsh(model.hamiltonian(s))
        return float(energies[1] - energies[0])

    coarse = np.linspace(0.0, 1.0, 201)
    best = min(coarse, key=gap)
    lo = max(0.0, best - 0.01)
    hi = min(1.0, best + 0.01)
    result = minimize_scalar(gap, bounds=(lo, hi), method="bounded",
                             options={"xatol": 1e-12})
    return float(result.fun)


def _run_beta_schedule_sweep(config: ExperimentConfig) -> Optional[str]:
    """Columns: k, delta_min and, per requested total time, t_f, error.

    error is 1 - final ground-state population; with zero coupling the
    closed-system integrator is used at tight tolerance so boundary-
    cancellation errors down to ~1e-11 are resolved.
    """
    opts = config.options
    base = opts["model"]
    bath = opts["bath"]
    rows_k, rows_tf, rows_gap, rows_err = [], [], [], []
    for k in opts["orders"]:
        model = SingleQubitModel(base.omega_x, base.omega_z,
                                 Schedule("beta", k))
        delta_min = _numeric_min_gap(model)
        if not opts["t_f_values"]:
            rows_k.append(float(k))
            rows_gap.append(delta_min)
            continue
        for t_f in opts["t_f_values"]:
            if bath.coupling == 0.0:
                trajectory = evolve_closed_qubit(model, t_f)
            else:
                trajectory = evolve_wcl_qubit(
                    model, bath, t_f, options=opts["options"],
                    include_lamb_shift=opts["include_lamb_shift"],
                )
            rows_k.append(float(k))
            rows_tf.append(t_f)
            rows_gap.append(delta_min)
            rows_err.append(1.0 - trajectory.final_population)
    columns = {"k": rows_k}
    if opts["t_f_values"]:
        columns["t_f"] = rows_tf
    columns["delta_min"] = rows_gap
    if opts["t_f_values"]:
        columns["error"] = rows_err
    write_table(config.output, columns, _base_metadata(config))
    return None


def _run_rate_report(config: ExperimentConfig) -> Optional[str]:
    """Columns: a, b, rate, gap (one row per eigenstate pair, a <= b)."""
    opts = config.options
    instance = opts["instance"]
    energies, states = np.linalg.eigh(instance.hamiltonian(opts["s"]))
    from .hamiltonians import EigenBasis

    basis = EigenBasis(energies, states)
    operators = [site_operator(PAULI_Z, i, instance.n)
                 for i in range(instance.n)]
    couplings = CouplingSet(operators=operators, bath=opts["bath"])
    try:
        report = build_rate_report(basis, couplings)
    except DegeneracyError as exc:
        # closed-form pair rates are derived for non-degenerate spectra;
        # a degenerate instance has no meaningful output to force
        return str(exc)
    meta = _base_metadata(config)
    meta["s"] = opts["s"]
    report.to_csv(config.output, meta)
    return None


def _run_sqa_eb(config: ExperimentConfig) -> Optional[str]:
    """Columns: alpha, p_i, p_c, ratio, err_2sigma, gs_rate, runs."""
    opts = config.options
    qmc = QmcConfig(
        beta=opts["beta"], n_tau=opts["n_tau"], sweeps=opts["sweeps"],
        alpha=0.0, runs=opts["runs"], seed=config.seed,
    )
    estimates = pi_pc_experiment(
        opts["instance"], qmc, opts["alphas"], workers=config.workers,
        bootstrap_resamples=opts["bootstrap_resamples"],
    )
    write_ratio_table(config.output, estimates, _base_metadata(config))
    return None


def run_experiment(config: ExperimentConfig, force: bool = False) -> Optional[str]:
    """Execute one validated experiment; returns a validity failure or None."""
    if config.kind == "wcl-trajectory":
        return _run_wcl_trajectory(config, force)
    if config.kind == "scl-trajectory":
        return _run_scl_trajectory(config, force)
    runner: Callable = {
        "bath-spectrum": _run_bath_spectrum,
        "static-analytic": _run_static_analytic,
        "tf-sweep": _run_tf_sweep,
        "coupling-sweep": _run_coupling_sweep,
        "beta-schedule-sweep": _run_beta_schedule_sweep,
        "rate-report": _run_rate_report,
        "sqa-eb": _run_sqa_eb,
    }[config.kind]
    return runner(config)


# ---------------------------------------------------------------------------
# bundled experiments

BUNDLED = {
    "fig1": "Ohmic bath rate curve gamma(omega) at the standard temperature and cutoff",
    "fig2a": "closed-system qubit anneal at t_f*omega_x = 10*sqrt(2): bare nonadiabatic oscillations",
    "fig2b": "open-system counterpart of fig2a: damped oscillations under eigenbasis dissipation",
    "fig2c": "open-system qubit anneal at t_f*omega_x = 5e3: thermal dip with partial recovery",
    "fig2d": "open-system qubit anneal at t_f*omega_x = 5e4: stronger relaxation recovery",
    "fig3": "final ground-state population vs total time: optimum peak and Gibbs plateau",
    "fig4": "optimal total time vs system-bath coupling on a doubling grid",
    "fig5a": "computational-basis dephasing anneal at omega_x*t_f = 1e2 (still adiabatic)",
    "fig5b": "computational-basis dephasing anneal at omega_x*t_f = 1e3 (degraded)",
    "fig5c": "computational-basis dephasing anneal at omega_x*t_f = 1e4 (near maximally mixed)",
    "fig6a": "boundary-cancellation orders k=0,1,2: ground-state error vs t_f, closed system",
    "fig6b": "boundary-cancellation orders k=0,1,2: ground-state error vs t_f, coupling 1e-8",
    "fig6c": "boundary-cancellation orders k=0,1,2: ground-state error vs t_f, coupling 1e-4",
    "fig7": "minimum gap across boundary-cancellation orders k=0,1,2,5,10 (schedule-invariant)",
    "fig9a": "isolated-to-cluster ground-state ratio vs bath strength, 100 sweeps (Monte Carlo)",
    "fig9b": "isolated-to-cluster ground-state ratio vs bath strength, 200 sweeps (Monte Carlo)",
    "fig9c": "isolated-to-cluster ground-state ratio vs bath strength, 500 sweeps (Monte Carlo)",
}


def bundled_config_path(name: str) -> Path:
    from importlib.resources import files

    return Path(str(files("annealsim.experiments") / f"{name}.toml"))


def _resolve_config_argument(argument: str) -> Path:
    path = Path(argument)
    if path.is_file():
        return path
    if argument in BUNDLED:
        return bundled_config_path(argument)
    raise SchemaError(
        f"config: {argument!r} is neither a file nor a bundled experiment "
        f"(see `list`)"
    )


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annealsim",
        description="Run annealing-simulation experiments from TOML configs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser(
        "run", help="execute an experiment config and write its CSV output"
    )
    run_cmd.add_argument("config", help="config file path or bundled name")
    run_cmd.add_argument(
        "--force", action="store_true",
        help="write output even if the master-equation validity check fails",
    )

    validate_cmd = commands.add_parser(
        "validate", help="schema-check a config without running it"
    )
    validate_cmd.add_argument("config", help="config file path or bundled name")

    commands.add_parser("list", help="show the bundled experiment configs")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        width = max(len(name) for name in BUNDLED)
        for name, description in BUNDLED.items():
            print(f"{name:<{width}}  {description}")
        return EXIT_OK

    try:
        path = _resolve_config_argument(args.config)
        config = load_config(path, workers_override=_workers_from_env())
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA

    if args.command == "validate":
        print(f"OK: {config.kind} -> {config.output}")
        return EXIT_OK

    failure = run_experiment(config, force=args.force)
    if failure is not None:
        print(failure, file=sys.stderr)
        return EXIT_VALIDITY
    print(f"wrote {config.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
