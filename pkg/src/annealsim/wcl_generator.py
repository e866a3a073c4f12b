"""Weak-coupling-limit adiabatic Lindblad generator.

At each schedule point the generator decoheres the system in its
instantaneous energy eigenbasis: each coupling operator A_alpha is split into
jump operators by Bohr frequency,

    L_{alpha,omega} = sum_{(a,b): e_b - e_a = omega} <e_a|A_alpha|e_b> |e_a><e_b|,

so positive omega lowers energy. The dissipator weights each frequency group
with the bath rate matrix gamma_alphabeta(omega) and the Lamb-shift
Hamiltonian collects the principal-value shifts S_alphabeta(omega).

Also provides the closed-form coefficient functions for the single-qubit
interpolating Hamiltonian, used by the fast trajectory integrator and the
analytic solutions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .hamiltonians import DEGENERACY_RTOL, EigenBasis, SingleQubitModel
from .spectral_bath import (
    LambShiftTable,
    SpectralModel,
    build_lamb_table,
    gamma,
)

__all__ = [
    "CouplingSet",
    "GeneratorSnapshot",
    "BohrGroup",
    "DegeneracyError",
    "build_snapshot",
    "apply_dissipator",
    "single_qubit_coefficients",
    "SingleQubitCoefficients",
]


class DegeneracyError(ValueError):
    """The instantaneous spectrum is degenerate; the generator is undefined."""


@dataclass
class CouplingSet:
    """System-bath coupling channels sharing one spectral model.

    operators: Hermitian dimensionless coupling matrices, one per channel.
    bath: the Ohmic spectral model supplying gamma and S.
    rate_fn: optional scalar override omega -> rate for the per-channel decay
        rate (independent identical baths); defaults to the Ohmic gamma.
    include_lamb_shift: whether snapshots carry the Lamb-shift Hamiltonian.
    lamb_table: optional precomputed S(omega) table; built lazily (and cached)
        from the bath when first needed.
    """

    operators: Sequence[np.ndarray]
    bath: SpectralModel
    rate_fn: Optional[Callable[[float], float]] = None
    include_lamb_shift: bool = True
    lamb_table: Optional[LambShiftTable] = None

    def __post_init__(self):
        ops = tuple(np.asarray(a, dtype=complex) for a in self.operators)
        if not ops:
            raise ValueError("need at least one coupling operator")
        dim = ops[0].shape[0]
        for a in ops:
            if a.shape != (dim, dim):
                raise ValueError("coupling operators must share one square shape")
            if np.max(np.abs(a - a.conj().T)) > 1e-12:
                raise ValueError("coupling operators must be Hermitian")
        self.operators = ops

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_channels(self) -> int:
        return len(self.operators)

    def rate(self, omega: float) -> float:
        if self.rate_fn is not None:
            return float(self.rate_fn(omega))
        return gamma(self.bath, omega)

    def gamma_matrix(self, omega: float) -> np.ndarray:
        """gamma_alphabeta(omega); diagonal for independent identical baths."""
        return self.rate(omega) * np.eye(self.n_channels)

    def lamb_values(self, frequencies: np.ndarray) -> np.ndarray:
        """S(omega) per frequency, via a lazily built interpolation table."""
        max_w = float(np.max(np.abs(frequencies))) if len(frequencies) else 1.0
        table = self.lamb_table
        if table is None or max_w > table.grid[-1]:
            # floor the span at a bath-scale width so near-static spectra do
            # not force quadrature at frequencies below roundoff resolution
            span = max(1.25 * max_w, 0.01 * self.bath.cutoff)
            self.lamb_table = table = build_lamb_table(
                self.bath, omega_max=span, points=801
            )
        return np.asarray(table(frequencies), dtype=float)


class BohrGroup(NamedTuple):
    """Jump operators of every channel at one Bohr frequency."""

    omega: float
    operators: tuple  # one matrix per coupling channel
    rates: np.ndarray  # gamma_alphabeta(omega)


@dataclass(frozen=True)
class GeneratorSnapshot:
    """The dissipative generator frozen at one schedule point."""

    s: float
    bohr_groups: tuple
    lamb_shift: Optional[np.ndarray]
    basis: EigenBasis

    @property
    def dim(self) -> int:
        return self.basis.states.shape[0]


def build_snapshot(
    basis: EigenBasis,
    couplings: CouplingSet,
    s: float = 0.0,
    gap_bin_tol: Optional[float] = None,
) -> GeneratorSnapshot:
    """Group eigenpair transitions of each coupling operator by Bohr frequency.

    gap_bin_tol defaults to the shared degeneracy tolerance (DEGENERACY_RTOL
    times the spectral norm). Degenerate energy levels raise DegeneracyError;
    distinct level pairs that share a nonzero Bohr frequency within tolerance
    are merged into one group with a warning (the strict derivation assumes
    all gaps distinct).
    """
    energies = np.asarray(basis.energies, dtype=float)
    states = np.asarray(basis.states, dtype=complex)
    d = energies.shape[0]
    norm = float(np.max(np.abs(energies))) or 1.0
    tol = gap_bin_tol if gap_bin_tol is not None else DEGENERACY_RTOL * norm

    if d > 1 and np.min(np.diff(energies)) < tol:
        raise DegeneracyError(
            f"degenerate levels at s={s}: min gap {np.min(np.diff(energies)):.3e}"
        )

    # coupling operators in the eigenbasis
    in_basis = [states.conj().T @ a @ states for a in couplings.operators]

    # all Bohr frequencies omega_{ab} = e_b - e_a, binned within tol
    bohr = energies[None, :] - energies[:, None]
    order = np.argsort(bohr, axis=None)
    flat = bohr.flatten()[order]
    bins = []  # list of (mean_omega, [(a, b), ...])
    for idx, w in zip(order, flat):
        a, b = divmod(idx, d)
        if bins and abs(w - bins[-1][1][-1]) <= tol:
            bins[-1][0].append((a, b))
            bins[-1][1].append(w)
        else:
            bins.append(([(a, b)], [w]))

    groups = []
    for pairs, ws in bins:
        omega = float(np.mean(ws))
        ops = []
        for mat in in_basis:
            l_op = np.zeros((d, d), dtype=complex)
            for a, b in pairs:
                l_op[a, b] = mat[a, b]
            ops.append(l_op)
        if all(np.max(np.abs(l_op)) < 1e-14 for l_op in ops):
            continue  # no channel couples these transitions
        active = {
            (a, b)
            for a, b in pairs
            if a != b and any(abs(mat[a, b]) > 1e-14 for mat in in_basis)
        }
        if abs(omega) > tol and len(active) > 1:
            warnings.warn(
                f"merged {len(active)} level pairs sharing Bohr frequency "
                f"{omega:.6g} at s={s}; coherence formulas assume distinct gaps",
                stacklevel=2,
            )
        groups.append((omega, tuple(ops)))

    lamb = None
    if couplings.include_lamb_shift:
        freqs = np.array([w for w, _ in groups])
        shifts = couplings.lamb_values(freqs)
        lamb = np.zeros((d, d), dtype=complex)
        for (omega, ops), s_diag in zip(groups, shifts):
            # independent identical baths: S_alphabeta = delta_alphabeta S
            for l_op in ops:
                lamb += s_diag * (l_op.conj().T @ l_op)

    bohr_groups = tuple(
        BohrGroup(omega, ops, couplings.gamma_matrix(omega))
        for omega, ops in groups
    )
    return GeneratorSnapshot(
        s=float(s), bohr_groups=bohr_groups, lamb_shift=lamb, basis=basis
    )


def apply_dissipator(
    snapshot: GeneratorSnapshot, rho: np.ndarray, basis: str = "eigen"
) -> np.ndarray:
    """Lindblad dissipator sum over Bohr groups and channel pairs.

    Returns sum_omega sum_ab gamma_ab(omega) (L_b rho L_a^dag
    - 1/2 {L_a^dag L_b, rho}); Hermitian and traceless for Hermitian rho.

    The jump operators are stored in the instantaneous eigenbasis, so rho
    must be expressed there too (basis="eigen", the default). Pass
    basis="computational" to conjugate in and out with the snapshot's
    eigenvector matrix instead.
    """
    rho = np.asarray(rho)
    d = snapshot.dim
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape} != ({d}, {d})")
    if basis not in ("eigen", "computational"):
        raise ValueError(f"unknown basis {basis!r}")
    if basis == "computational":
        v = snapshot.basis.states
        out = apply_dissipator(snapshot, v.conj().T @ rho @ v)
        return v @ out @ v.conj().T
    out = np.zeros((d, d), dtype=complex)
    for omega, ops, rates in snapshot.bohr_groups:
        n = len(ops)
        for a in range(n):
            la_dag = ops[a].conj().T
            for b in range(n):
                r = rates[a, b]
                if r == 0.0:
                    continue
                lb = ops[b]
                sandwich = lb @ rho @ la_dag
                overlap = la_dag @ lb
                out += r * (sandwich - 0.5 * (overlap @ rho + rho @ overlap))
    return out


class SingleQubitCoefficients(NamedTuple):
    """Dimensionless (per unit s) rate coefficients for the single qubit.

    f_plus / f_minus: relaxation and excitation rates t_f zeta^2 gamma(+-Delta).
    omega_eff: coherent rotation t_f [Delta + (S(Delta) - S(-Delta)) zeta^2].
    sigma_decay: off-diagonal decay t_f [2 gamma(0) (theta ratio / lam)^2
        + (gamma(Delta) + gamma(-Delta)) zeta^2 / 2].
    """

    f_plus: float
    f_minus: float
    omega_eff: float
    sigma_decay: float


def single_qubit_coefficients(
    model: SingleQubitModel,
    s: float,
    bath: SpectralModel,
    t_f: float,
    lamb_table: Optional[LambShiftTable] = None,
    include_lamb_shift: bool = True,
) -> SingleQubitCoefficients:
    """Closed-form master-equation coefficients at schedule point s.

    zeta = (1 - theta)/lam weights the energy-basis off-diagonal coupling,
    theta*ratio/lam the diagonal one. The Lamb shift enters only the coherent
    rotation frequency; pass a table to avoid repeated quadrature.
    """
    th = model.schedule.theta(s)
    lam = float(model.lam(s))
    zeta = (1.0 - th) / lam
    diag = th * model.ratio / lam
    delta = model.omega_x * lam

    g_plus = gamma(bath, delta)
    g_minus = gamma(bath, -delta)
    if include_lamb_shift and bath.coupling != 0.0:
        if lamb_table is not None:
            s_plus, s_minus = lamb_table(delta), lamb_table(-delta)
        else:
            from .spectral_bath import lamb_shift

            s_plus, s_minus = lamb_shift(bath, delta), lamb_shift(bath, -delta)
        shift = (s_plus - s_minus) * zeta**2
    else:
        shift = 0.0

    return SingleQubitCoefficients(
        f_plus=t_f * zeta**2 * g_plus,
        f_minus=t_f * zeta**2 * g_minus,
        omega_eff=t_f * (delta + shift),
        sigma_decay=t_f * (2.0 * gamma(bath, 0.0) * diag**2
                           + 0.5 * (g_plus + g_minus) * zeta**2),
    )
