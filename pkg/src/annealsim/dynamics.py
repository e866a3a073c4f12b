"""Density-matrix evolution under the adiabatic master equations.

Integrates d rho/ds = t_f (-i [H(s) + H_LS, rho] + D[rho]) for the
weak-coupling generator (dissipation in the instantaneous energy eigenbasis),
the singular-coupling generator (dissipation in the computational basis), and
the closed system, with closed-form solutions for the static single-qubit
cases and for the adiabatic limit. Sweeps over total time locate the optimal
evolution time that balances adiabaticity against thermal excitation.

Single-qubit trajectories use a compiled adaptive integrator on the four real
density-matrix components; very long evolutions (oscillation-dominated cost)
switch to an implicit stiff method with analytic Jacobian. General operators
integrate the vectorized density matrix with on-the-fly generator snapshots.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import _kernels
from .hamiltonians import EigenBasis, SingleQubitModel, adiabatic_parameter
from .scl_generator import SclModel, apply_scl_dissipator
from .spectral_bath import (
    SpectralModel,
    build_lamb_table,
    gamma,
    lamb_shift,
    t1_energy,
    t2_computational,
    validity_report,
)
from .wcl_generator import CouplingSet, apply_dissipator, build_snapshot

__all__ = [
    "IntegrationError",
    "IntegratorOptions",
    "Trajectory",
    "SweepResult",
    "CouplingSweepResult",
    "evolve_wcl_qubit",
    "evolve_scl_qubit",
    "evolve_closed_qubit",
    "evolve",
    "analytic_static_dephasing",
    "analytic_static_wcl",
    "analytic_static_scl",
    "analytic_adiabatic_limit",
    "gibbs_ground_population",
    "sweep_tf",
    "optimal_tf_vs_coupling",
]


class IntegrationError(RuntimeError):
    """Integration aborted: step underflow or diagnostics out of bounds."""


_STATUS_MESSAGES = {
    _kernels.STATUS_STEP_UNDERFLOW: "step size underflow",
    _kernels.STATUS_TRACE_DRIFT: "trace drift exceeded bound",
    _kernels.STATUS_POSITIVITY: "positivity floor violated",
}


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and diagnostics bounds for trajectory integration.

    method "auto" uses the explicit compiled pair and switches to the
    implicit stiff path once the expected oscillation count t_f * max gap
    exceeds stiff_threshold; "explicit"/"implicit" force one path.
    """

    rtol: float = 1e-8
    atol: float = 1e-10
    grid_points: int = 201
    max_trace_drift: float = 1e-6
    positivity_floor: float = -1e-4
    method: str = "auto"
    stiff_threshold: float = 2e6

    def __post_init__(self):
        if self.method not in ("auto", "explicit", "implicit"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.grid_points < 2:
            raise ValueError("need at least two grid points")

    @property
    def error_estimate(self) -> float:
        """Heuristic bound on the final-population error (tolerance-based)."""
        return 100.0 * self.rtol + 100.0 * self.atol


@dataclass(frozen=True)
class Trajectory:
    """Density-matrix path on an increasing s-grid with diagnostics.

    basis records which representation `states` uses: "eigen" means entry
    (0,0) is the instantaneous ground-state population, "computational"
    means entry (0,0) is the |0...0> population. ground_population always
    holds the instantaneous ground-state population except on
    computational-basis singular-coupling runs, where it is rho_00 (the two
    agree at the end of the standard interpolation).
    """

    s: np.ndarray
    states: np.ndarray
    ground_population: np.ndarray
    trace_drift: np.ndarray
    min_eigenvalue: np.ndarray
    basis: str
    error_estimate: float
    validity: object = None

    def __post_init__(self):
        if np.any(np.diff(self.s) <= 0):
            raise ValueError("trajectory grid must be strictly increasing")

    @property
    def final_population(self) -> float:
        return float(self.ground_population[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path, metadata: Optional[dict] = None) -> None:
        """Columns: s, p_gs, re_offdiag, im_offdiag, trace_drift, min_eig.

        The off-diagonal written is the (0, 1) entry of the stored state in
        its own basis (ground-excited coherence for eigenbasis runs).
        """
        from .storage import write_table

        meta = {"basis": self.basis, "error_estimate": self.error_estimate}
        meta.update(metadata or {})
        write_table(
            path,
            {
                "s": self.s,
                "p_gs": self.ground_population,
                "re_offdiag": self.states[:, 0, 1].real,
                "im_offdiag": self.states[:, 0, 1].imag,
                "trace_drift": self.trace_drift,
                "min_eig": self.min_eigenvalue,
            },
            meta,
        )


@dataclass(frozen=True)
class SweepResult:
    """Final ground-state population versus total evolution time.

    optimal_tf is None when no sampled or refined time beats the equilibrium
    plateau by more than plateau_margin (the population then only approaches
    its long-time limit monotonically, so there is nothing to optimize).
    """

    t_f: np.ndarray
    final_population: np.ndarray
    gibbs_population: float
    plateau_margin: float
    optimal_tf: Optional[float]
    optimal_population: float

    def to_csv(self, path, metadata: Optional[dict] = None) -> None:
        from .storage import write_table

        meta = {
            "gibbs_population": self.gibbs_population,
            "plateau_margin": self.plateau_margin,
            "optimal_tf": "none" if self.optimal_tf is None else repr(self.optimal_tf),
            "optimal_population": self.optimal_population,
        }
        meta.update(metadata or {})
        write_table(
            path, {"t_f": self.t_f, "p_final": self.final_population}, meta
        )


@dataclass(frozen=True)
class CouplingSweepResult:
    """Optimal evolution time and adiabaticity across coupling strengths."""

    coupling: np.ndarray
    optimal_tf: np.ndarray  # nan where no optimum exists
    optimal_population: np.ndarray
    adiabatic_parameter: np.ndarray  # at the optimum; nan where none
    gibbs_population: float

    def to_csv(self, path, metadata: Optional[dict] = None) -> None:
        from .storage import write_table

        meta = {"gibbs_population": self.gibbs_population}
        meta.update(metadata or {})
        write_table(
            path,
            {
                "coupling": self.coupling,
                "optimal_tf": self.optimal_tf,
                "p_max": self.optimal_population,
                "adiabatic_parameter": self.adiabatic_parameter,
            },
            meta,
        )


# ---------------------------------------------------------------------------
# state conversions and diagnostics


def _qubit_components(rho0, default: np.ndarray) -> np.ndarray:
    """Coerce None / 4-vector / 2x2 Hermitian matrix to (p0, p1, re, im)."""
    if rho0 is None:
        return default.copy()
    arr = np.asarray(rho0)
    if arr.shape == (4,):
        y = arr.astype(float)
    elif arr.shape == (2, 2):
        if np.max(np.abs(arr - arr.conj().T)) > 1e-10:
            raise ValueError("initial density matrix must be Hermitian")
        y = np.array([arr[0, 0].real, arr[1, 1].real, arr[0, 1].real, arr[0, 1].imag])
    else:
        raise ValueError("initial state must be a 2x2 matrix or 4 components")
    if abs(y[0] + y[1] - 1.0) > 1e-8:
        raise ValueError("initial density matrix must have unit trace")
    return y


def _components_to_states(y: np.ndarray) -> np.ndarray:
    states = np.empty((len(y), 2, 2), dtype=complex)
    states[:, 0, 0] = y[:, 0]
    states[:, 1, 1] = y[:, 1]
    states[:, 0, 1] = y[:, 2] + 1j * y[:, 3]
    states[:, 1, 0] = y[:, 2] - 1j * y[:, 3]
    return states


def _qubit_diagnostics(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    drift = y[:, 0] + y[:, 1] - 1.0
    min_eig = 0.5 * (y[:, 0] + y[:, 1]) - np.sqrt(
        0.25 * (y[:, 0] - y[:, 1]) ** 2 + y[:, 2] ** 2 + y[:, 3] ** 2
    )
    return drift, min_eig


def _check_diagnostics(drift, min_eig, options: IntegratorOptions) -> None:
    worst_drift = float(np.max(np.abs(drift)))
    if worst_drift > options.max_trace_drift:
        raise IntegrationError(
            f"trace drift {worst_drift:.3e} exceeds bound {options.max_trace_drift:.1e}"
        )
    floor = float(np.min(min_eig))
    if floor < options.positivity_floor:
        raise IntegrationError(
            f"positivity floor {floor:.3e} below bound {options.positivity_floor:.1e}"
        )


def _schedule_poly(model: SingleQubitModel):
    k = model.schedule.k if model.schedule.kind == "beta" else 0
    return _kernels.schedule_poly(k)


def _lamb_table_for(model: SingleQubitModel, bath: SpectralModel,
                    include_lamb_shift: bool):
    if not include_lamb_shift or bath.coupling == 0.0:
        return np.zeros(2), np.zeros(2), False
    span = 1.25 * max(model.omega_x, model.omega_z)
    table = build_lamb_table(bath, omega_max=span, points=2001)
    return table.grid, table.values, True


# ---------------------------------------------------------------------------
# single-qubit trajectories


def evolve_wcl_qubit(
    model: SingleQubitModel,
    bath: SpectralModel,
    t_f: float,
    rho0=None,
    options: IntegratorOptions = IntegratorOptions(),
    include_lamb_shift: bool = True,
) -> Trajectory:
    """Energy-eigenbasis trajectory of the interpolating qubit.

    States are expressed between instantaneous ground and excited states, so
    ground_population is the (0, 0) entry. rho0 defaults to the instantaneous
    ground state at s=0 and is interpreted in the eigenbasis.
    """
    if t_f <= 0:
        raise ValueError("total time must be positive")
    y0 = _qubit_components(rho0, np.array([1.0, 0.0, 0.0, 0.0]))
    s_grid = np.linspace(0.0, 1.0, options.grid_points)
    coeffs, bnorm = _schedule_poly(model)
    amp = 2.0 * math.pi * bath.coupling
    grid, vals, lamb_on = _lamb_table_for(model, bath, include_lamb_shift)

    delta_max = model.omega_x * max(1.0, model.ratio)
    use_stiff = options.method == "implicit" or (
        options.method == "auto" and t_f * delta_max > options.stiff_threshold
    )
    if not use_stiff:
        y, status, _ = _kernels.integrate_wcl_qubit(
            t_f, model.omega_x, model.ratio, coeffs, bnorm, amp,
            bath.inv_temperature, bath.cutoff, grid, vals, lamb_on,
            y0, s_grid, options.rtol, options.atol,
            options.max_trace_drift, options.positivity_floor,
        )
        if status != _kernels.STATUS_OK:
            raise IntegrationError(
                f"eigenbasis trajectory aborted: {_STATUS_MESSAGES[status]}"
            )
    else:
        y = _integrate_wcl_stiff(
            model, bath, t_f, y0, s_grid, coeffs, bnorm, amp, grid, vals,
            lamb_on, options,
        )

    drift, min_eig = _qubit_diagnostics(y)
    _check_diagnostics(drift, min_eig, options)
    report = validity_report(
        bath, t_f, model.delta_min, model.drive_scale
    ) if bath.coupling > 0 else None
    return Trajectory(
        s=s_grid,
        states=_components_to_states(y),
        ground_population=y[:, 0],
        trace_drift=drift,
        min_eigenvalue=min_eig,
        basis="eigen",
        error_estimate=options.error_estimate,
        validity=report,
    )


def _integrate_wcl_stiff(model, bath, t_f, y0, s_grid, coeffs, bnorm, amp,
                         grid, vals, lamb_on, options) -> np.ndarray:
    """Implicit path for oscillation-dominated long evolutions."""
    rates = _kernels._wcl_rates
    args = (float(t_f), float(model.omega_x), float(model.ratio),
            np.ascontiguousarray(coeffs, dtype=np.float64), float(bnorm),
            float(amp), float(bath.inv_temperature), float(bath.cutoff),
            np.ascontiguousarray(grid, dtype=np.float64),
            np.ascontiguousarray(vals, dtype=np.float64), bool(lamb_on))

    def rhs(s, y):
        geom, fp, fm, om, sig = rates(s, *args)
        return (
            geom * y[2] + fp * y[1] - fm * y[0],
            -geom * y[2] - fp * y[1] + fm * y[0],
            0.5 * geom * (y[1] - y[0]) - sig * y[2] - om * y[3],
            om * y[2] - sig * y[3],
        )

    def jac(s, y):
        geom, fp, fm, om, sig = rates(s, *args)
        return (
            (-fm, fp, geom, 0.0),
            (fm, -fp, -geom, 0.0),
            (-0.5 * geom, 0.5 * geom, -sig, -om),
            (0.0, 0.0, om, -sig),
        )

    sol = solve_ivp(
        rhs, (0.0, 1.0), y0, method="Radau", jac=jac, t_eval=s_grid,
        rtol=options.rtol, atol=min(options.atol, 1e-12),
    )
    if not sol.success:
        raise IntegrationError(f"stiff trajectory failed: {sol.message}")
    return sol.y.T


def evolve_scl_qubit(
    model: SingleQubitModel,
    bath: SpectralModel,
    t_f: float,
    rho0=None,
    options: IntegratorOptions = IntegratorOptions(),
) -> Trajectory:
    """Computational-basis trajectory under zero-frequency dephasing.

    rho0 defaults to the instantaneous ground state at s=0 (the transverse
    superposition), interpreted in the computational basis; the Lamb shift
    is proportional to the identity here and drops out.
    """
    if t_f <= 0:
        raise ValueError("total time must be positive")
    y0 = _qubit_components(rho0, np.array([0.5, 0.5, 0.5, 0.0]))
    s_grid = np.linspace(0.0, 1.0, options.grid_points)
    coeffs, bnorm = _schedule_poly(model)
    amp = 2.0 * math.pi * bath.coupling
    y, status, _ = _kernels.integrate_scl_qubit(
        t_f, model.omega_x, model.ratio, coeffs, bnorm, amp,
        bath.inv_temperature, bath.cutoff, y0, s_grid,
        options.rtol, options.atol,
        options.max_trace_drift, options.positivity_floor,
    )
    if status != _kernels.STATUS_OK:
        raise IntegrationError(
            f"computational-basis trajectory aborted: {_STATUS_MESSAGES[status]}"
        )
    drift, min_eig = _qubit_diagnostics(y)
    _check_diagnostics(drift, min_eig, options)
    report = validity_report(
        bath, t_f, model.delta_min, model.drive_scale
    ) if bath.coupling > 0 else None
    return Trajectory(
        s=s_grid,
        states=_components_to_states(y),
        ground_population=y[:, 0],
        trace_drift=drift,
        min_eigenvalue=min_eig,
        basis="computational",
        error_estimate=options.error_estimate,
        validity=report,
    )


def evolve_closed_qubit(
    model: SingleQubitModel,
    t_f: float,
    rho0=None,
    options: Optional[IntegratorOptions] = None,
) -> Trajectory:
    """Unitary trajectory (zero coupling) in the instantaneous eigenbasis."""
    if options is None:
        options = IntegratorOptions(rtol=1e-12, atol=1e-14)
    closed_bath = SpectralModel(
        coupling=0.0, inv_temperature=1.0, cutoff=1.0
    )
    return evolve_wcl_qubit(
        model, closed_bath, t_f, rho0, options, include_lamb_shift=False
    )


# ---------------------------------------------------------------------------
# general-operator evolution


def evolve(
    generator: Union[None, SclModel, CouplingSet],
    h_fn: Callable[[float], np.ndarray],
    rho0: np.ndarray,
    t_f: float,
    options: IntegratorOptions = IntegratorOptions(),
    s_grid: Optional[np.ndarray] = None,
) -> Trajectory:
    """Integrate the vectorized master equation for any Hamiltonian path.

    generator selects the dissipative part: None for closed evolution, an
    SclModel for computational-basis dephasing, or a CouplingSet for
    energy-eigenbasis dissipation with snapshots rebuilt at every evaluation
    (the spectrum must stay non-degenerate along the path). States stay in
    the computational basis; ground_population tracks the instantaneous
    ground state of h_fn(s).
    """
    if t_f <= 0:
        raise ValueError("total time must be positive")
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    if rho0.shape != (d, d):
        raise ValueError("initial state must be a square matrix")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ValueError("initial density matrix must be Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-8:
        raise ValueError("initial density matrix must have unit trace")
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, options.grid_points)
    else:
        s_grid = np.asarray(s_grid, dtype=float)

    scl_lamb = None
    if isinstance(generator, SclModel):
        scl_lamb = generator.lamb_shift_0

    def rhs(s, y):
        rho = y.reshape(d, d)
        h = np.asarray(h_fn(s), dtype=complex)
        if generator is None:
            total = -1j * (h @ rho - rho @ h)
        elif isinstance(generator, SclModel):
            if scl_lamb is not None:
                h = h + scl_lamb
            total = -1j * (h @ rho - rho @ h) + apply_scl_dissipator(generator, rho)
        else:
            vals, vecs = np.linalg.eigh(h)
            snap = build_snapshot(EigenBasis(vals, vecs), generator, s=s)
            if snap.lamb_shift is not None:
                h = h + vecs @ snap.lamb_shift @ vecs.conj().T
            total = -1j * (h @ rho - rho @ h) + apply_dissipator(
                snap, rho, basis="computational"
            )
        return (t_f * total).ravel()

    sol = solve_ivp(
        rhs, (s_grid[0], s_grid[-1]), rho0.ravel(), t_eval=s_grid,
        rtol=options.rtol, atol=options.atol,
    )
    if not sol.success:
        raise IntegrationError(f"trajectory failed: {sol.message}")
    states = sol.y.T.reshape(len(s_grid), d, d)

    populations = np.empty(len(s_grid))
    drift = np.empty(len(s_grid))
    min_eig = np.empty(len(s_grid))
    for i, s in enumerate(s_grid):
        rho = states[i]
        vals, vecs = np.linalg.eigh(np.asarray(h_fn(s), dtype=complex))
        ground = vecs[:, 0]
        populations[i] = (ground.conj() @ rho @ ground).real
        drift[i] = np.trace(rho).real - 1.0
        min_eig[i] = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    _check_diagnostics(drift, min_eig, options)
    return Trajectory(
        s=s_grid,
        states=states,
        ground_population=populations,
        trace_drift=drift,
        min_eigenvalue=min_eig,
        basis="computational",
        error_estimate=options.error_estimate,
    )


# ---------------------------------------------------------------------------
# closed-form static solutions


def _as_matrix(rho0) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("state must be a 2x2 density matrix")
    return rho


def analytic_static_dephasing(
    omega_z: float, bath: SpectralModel, rho0, t: float
) -> np.ndarray:
    """Longitudinal field with longitudinal coupling: pure dephasing.

    Solves dissipative evolution under H = -(omega_z/2) sigma^z (the s=1
    endpoint of the interpolating family): the coherence rotates at omega_z
    and decays on the computational dephasing time while populations stay
    frozen; the weak- and singular-coupling generators coincide here.
    """
    rho = _as_matrix(rho0)
    t2c = t2_computational(bath)
    phase = np.exp((1j * omega_z - 1.0 / t2c) * t)
    out = rho.copy()
    out[0, 1] = rho[0, 1] * phase
    out[1, 0] = np.conj(out[0, 1])
    return out


def analytic_static_wcl(
    omega_x: float,
    bath: SpectralModel,
    rho0,
    t: float,
    include_lamb_shift: bool = True,
) -> np.ndarray:
    """Transverse field, energy-eigenbasis relaxation: closed form.

    Solves dissipative evolution under H = -(omega_x/2) sigma^x (the s=0
    endpoint of the interpolating family), whose ground state is the even
    superposition. Input and output are in the computational basis.
    Populations in the transverse eigenbasis relax to the Gibbs weights on
    T1 = 1/[gamma(w)(1 + e^(-beta w))]; the coherence decays on T2 = 2 T1
    while rotating at the Lamb-shifted gap.
    """
    rho = _as_matrix(rho0)
    beta = bath.inv_temperature
    # transverse eigenbasis: ground (|0>+|1>)/sqrt2, excited (|0>-|1>)/sqrt2
    v = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    r = v.conj().T @ rho @ v  # (ground, excited) components
    t1 = t1_energy(bath, omega_x)
    p_gibbs_ground = math.exp(beta * omega_x / 2.0) / (
        2.0 * math.cosh(beta * omega_x / 2.0)
    )
    pg = p_gibbs_ground + (r[0, 0].real - p_gibbs_ground) * math.exp(-t / t1)
    gap = omega_x
    if include_lamb_shift:
        gap = omega_x + lamb_shift(bath, omega_x) - lamb_shift(bath, -omega_x)
    coher = r[0, 1] * np.exp((1j * gap - 0.5 / t1) * t)
    out = np.array([[pg, coher], [np.conj(coher), 1.0 - pg]], dtype=complex)
    return v @ out @ v.conj().T


def analytic_static_scl(
    omega_x: float, bath: SpectralModel, rho0, t: float
) -> np.ndarray:
    """Transverse field with computational-basis dephasing: closed form.

    Solves dissipative evolution under H = -(omega_x/2) sigma^x. The x
    component of the Bloch vector decays on the computational dephasing
    time; the (y, z) pair spirals down under the exact 2x2 linear flow,
    solved here by eigendecomposition (the shift Hamiltonian is
    proportional to the identity and drops out).
    """
    rho = _as_matrix(rho0)
    bx = 2.0 * rho[0, 1].real
    by = -2.0 * rho[0, 1].imag
    bz = (rho[0, 0] - rho[1, 1]).real
    rate = 2.0 * gamma(bath, 0.0)

    bx_t = bx * math.exp(-rate * t)
    m = np.array([[-rate, omega_x], [-omega_x, 0.0]])
    vals, vecs = np.linalg.eig(m)
    yz = vecs @ (np.exp(vals * t) * np.linalg.solve(vecs, np.array([by, bz])))
    by_t, bz_t = yz.real

    return 0.5 * np.array(
        [
            [1.0 + bz_t, bx_t - 1j * by_t],
            [bx_t + 1j * by_t, 1.0 - bz_t],
        ],
        dtype=complex,
    )


# ---------------------------------------------------------------------------
# adiabatic-limit closed form


def analytic_adiabatic_limit(
    model: SingleQubitModel,
    bath: SpectralModel,
    t_f: float,
    s: float,
    rho0=(1.0, 0.0j),
    include_lamb_shift: bool = True,
    rel_tol: float = 1e-10,
) -> tuple[float, complex]:
    """Quadrature closed form of the decoupled adiabatic-limit equations.

    Returns (ground population, excited-ground coherence <e_+|rho|e_->) at
    schedule point s, starting from rho0 = (rho_gg(0), rho_+-(0)). Valid when
    the adiabatic parameter is large: the geometric coupling between
    populations and coherences is dropped.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("schedule point must lie in [0, 1]")
    param = adiabatic_parameter(model, t_f)
    if param < 10.0:
        warnings.warn(
            f"adiabatic parameter {param:.3g} < 10; the decoupled closed form "
            "ignores non-adiabatic transitions",
            stacklevel=2,
        )
    p0 = float(rho0[0])
    c0 = complex(rho0[1])
    beta = bath.inv_temperature
    sched = model.schedule

    def f_plus(u: float) -> float:
        th = sched.theta(u)
        lam = float(model.lam(u))
        zeta2 = (1.0 - th) ** 2 / lam**2
        return t_f * zeta2 * gamma(bath, model.omega_x * lam)

    def balance(u: float) -> float:
        return (1.0 + math.exp(-beta * model.omega_x * float(model.lam(u)))) * f_plus(u)

    kw = dict(epsabs=1e-14, epsrel=rel_tol, limit=200)

    def j_integral(upper: float) -> float:
        if upper == 0.0:
            return 0.0
        val, _ = quad(balance, 0.0, upper, **kw)
        return val

    j_s = j_integral(s)
    decay = math.exp(-j_s) * p0
    if bath.coupling > 0.0 and s > 0.0:
        source, _ = quad(
            lambda u: f_plus(u) * math.exp(j_integral(u) - j_s), 0.0, s, **kw
        )
    else:
        source = 0.0
    p_ground = decay + source

    coherence = 0.0j
    if c0 != 0.0:
        table_grid, table_vals, lamb_on = _lamb_table_for(
            model, bath, include_lamb_shift
        )

        def sigma(u: float) -> float:
            th = sched.theta(u)
            lam = float(model.lam(u))
            zeta2 = (1.0 - th) ** 2 / lam**2
            diag = th * model.ratio / lam
            delta = model.omega_x * lam
            return t_f * (
                2.0 * gamma(bath, 0.0) * diag**2
                + 0.5 * (gamma(bath, delta) + gamma(bath, -delta)) * zeta2
            )

        def omega_eff(u: float) -> float:
            th = sched.theta(u)
            lam = float(model.lam(u))
            delta = model.omega_x * lam
            shift = 0.0
            if lamb_on:
                shift = (
                    np.interp(delta, table_grid, table_vals)
                    - np.interp(-delta, table_grid, table_vals)
                ) * (1.0 - th) ** 2 / lam**2
            return t_f * (delta + shift)

        sig_int, _ = quad(sigma, 0.0, s, **kw)
        om_int, _ = quad(omega_eff, 0.0, s, **kw)
        coherence = c0 * np.exp(-(1j * om_int + sig_int))
    return p_ground, coherence


# ---------------------------------------------------------------------------
# sweeps


def gibbs_ground_population(bath: SpectralModel, gap: float) -> float:
    """Two-level Gibbs weight of the ground state at the bath temperature."""
    x = bath.inv_temperature * gap / 2.0
    return math.exp(x) / (2.0 * math.cosh(x))


def _final_population(model, bath, t_f, options, mode) -> float:
    if mode == "wcl":
        return evolve_wcl_qubit(model, bath, t_f, options=options).final_population
    return evolve_scl_qubit(model, bath, t_f, options=options).final_population


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section_max(fn, lo: float, hi: float, rel_tol: float = 1e-3):
    """Maximize fn over log-spaced [lo, hi]; returns (argmax, max)."""
    a, b = math.log(lo), math.log(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(math.exp(c)), fn(math.exp(d))
    while (b - a) > rel_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(math.exp(d))
    if fc >= fd:
        return math.exp(c), fc
    return math.exp(d), fd


def sweep_tf(
    model: SingleQubitModel,
    bath: SpectralModel,
    tf_grid: Sequence[float],
    options: IntegratorOptions = IntegratorOptions(),
    mode: str = "wcl",
    refine: bool = True,
    plateau_margin: float = 2e-3,
    workers: int = 1,
) -> SweepResult:
    """Final ground-state population over total evolution times.

    The grid must span at least three decades so both the short-time and
    equilibrium regimes are visible. The optimum is the grid argmax,
    golden-section refined between its neighbors; it is reported as None
    when even the best population does not exceed the equilibrium plateau
    (Gibbs weight for the energy-eigenbasis generator, one half for the
    computational-basis one) by plateau_margin.
    """
    if mode not in ("wcl", "scl"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    tf_grid = np.asarray(tf_grid, dtype=float)
    if len(tf_grid) < 3 or np.any(np.diff(tf_grid) <= 0):
        raise ValueError("need an increasing grid of at least 3 total times")
    if tf_grid[-1] / tf_grid[0] < 1e3:
        raise ValueError("total-time grid must span at least three decades")

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            finals = np.array(
                list(
                    pool.map(
                        lambda tf: _final_population(model, bath, tf, options, mode),
                        tf_grid,
                    )
                )
            )
    else:
        finals = np.array(
            [_final_population(model, bath, tf, options, mode) for tf in tf_grid]
        )

    if mode == "wcl":
        gibbs = gibbs_ground_population(bath, model.omega_x * float(model.lam(1.0)))
    else:
        gibbs = 0.5

    best = int(np.argmax(finals))
    best_tf, best_p = float(tf_grid[best]), float(finals[best])
    if refine and 0 < best < len(tf_grid) - 1:
        best_tf, best_p = _golden_section_max(
            lambda tf: _final_population(model, bath, tf, options, mode),
            tf_grid[best - 1],
            tf_grid[best + 1],
        )
        if best_p < finals[best]:  # refinement never loses the grid max
            best_tf, best_p = float(tf_grid[best]), float(finals[best])

    optimal_tf = best_tf if best_p > gibbs + plateau_margin else None
    return SweepResult(
        t_f=tf_grid,
        final_population=finals,
        gibbs_population=gibbs,
        plateau_margin=plateau_margin,
        optimal_tf=optimal_tf,
        optimal_population=best_p,
    )


def optimal_tf_vs_coupling(
    model: SingleQubitModel,
    bath: SpectralModel,
    couplings: Sequence[float],
    tf_grid: Sequence[float],
    options: IntegratorOptions = IntegratorOptions(),
    plateau_margin: float = 2e-3,
    workers: int = 1,
) -> CouplingSweepResult:
    """Optimal total time and its adiabaticity across coupling strengths.

    Stronger coupling speeds thermal excitation, so the optimum moves to
    shorter times; past the coupling where the best achievable population
    sinks into the equilibrium plateau the optimum no longer exists and nan
    is recorded.
    """
    couplings = np.asarray(couplings, dtype=float)
    if np.any(couplings < 0):
        raise ValueError("coupling strengths must be non-negative")
    n = len(couplings)
    opt_tf = np.full(n, np.nan)
    opt_p = np.full(n, np.nan)
    params = np.full(n, np.nan)
    gibbs = gibbs_ground_population(bath, model.omega_x * float(model.lam(1.0)))

    def one(i_c):
        i, c = i_c
        sweep = sweep_tf(
            model, replace(bath, coupling=c), tf_grid, options=options,
            mode="wcl", plateau_margin=plateau_margin,
        )
        return i, sweep

    items = list(enumerate(couplings))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(item) for item in items]

    for i, sweep in results:
        opt_p[i] = sweep.optimal_population
        if sweep.optimal_tf is not None:
            opt_tf[i] = sweep.optimal_tf
            params[i] = adiabatic_parameter(model, sweep.optimal_tf)
    return CouplingSweepResult(
        coupling=couplings,
        optimal_tf=opt_tf,
        optimal_population=opt_p,
        adiabatic_parameter=params,
        gibbs_population=gibbs,
    )
