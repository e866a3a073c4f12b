"""Singular-coupling-limit Lindblad generator.

When the system-bath coupling dominates the system Hamiltonian, the Lindblad
operators are the bare coupling operators themselves and every rate is
evaluated at zero frequency, so decoherence happens in the basis that
diagonalizes the coupling operators rather than the instantaneous energy
eigenbasis. For commuting per-qubit sigma^z channels this gives closed-form
dephasing rates in the computational basis: the Hamming distance over the
single-qubit dephasing time for independent baths, and the squared
Hamming-weight difference over the same time for one collective bath (whose
equal-weight subspaces are decoherence free).
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional

import numpy as np

from .spectral_bath import lamb_shift
from .wcl_generator import CouplingSet

__all__ = [
    "SclModel",
    "apply_scl_dissipator",
    "dissipator_superoperator",
    "independent_dephasing_rate",
    "collective_dephasing_rate",
]

_MODES = ("independent", "collective")


class SclModel:
    """Zero-frequency Lindblad generator built from bare coupling operators.

    couplings: the channels and their shared bath; only the zero-frequency
        rate and shift enter the generator.
    decoherence_mode: "independent" gives each channel its own bath, so the
        rate matrix is gamma(0) times the identity; "collective" couples all
        channels to one common bath, so the rate matrix is gamma(0) times the
        all-ones matrix — equivalent to the single summed operator.
    include_lamb_shift: whether the zero-frequency shift Hamiltonian
        sum_ab S_ab(0) A_a^dag A_b is attached.
    """

    def __init__(
        self,
        couplings: CouplingSet,
        decoherence_mode: str = "independent",
        include_lamb_shift: bool = True,
    ):
        if decoherence_mode not in _MODES:
            raise ValueError(
                f"decoherence_mode must be one of {_MODES}, got {decoherence_mode!r}"
            )
        self.couplings = couplings
        self.decoherence_mode = decoherence_mode
        self.include_lamb_shift = include_lamb_shift

    @property
    def dim(self) -> int:
        return self.couplings.dim

    @cached_property
    def gamma0(self) -> np.ndarray:
        """Rate matrix gamma_ab(0); positive semidefinite in both modes."""
        rate = self.couplings.rate(0.0)
        n = self.couplings.n_channels
        if self.decoherence_mode == "independent":
            return rate * np.eye(n)
        return rate * np.ones((n, n))

    @cached_property
    def lamb_shift_0(self) -> Optional[np.ndarray]:
        """Hermitian shift Hamiltonian sum_ab S_ab(0) A_a^dag A_b, or None."""
        if not self.include_lamb_shift:
            return None
        table = self.couplings.lamb_table
        if table is not None and table.grid[0] <= 0.0 <= table.grid[-1]:
            s0 = float(table(0.0))
        else:
            s0 = lamb_shift(self.couplings.bath, 0.0)
        ops = self.couplings.operators
        if self.decoherence_mode == "collective":
            total = sum(ops)
            return s0 * (total.conj().T @ total)
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for a in ops:
            h += s0 * (a.conj().T @ a)
        return h


def apply_scl_dissipator(model: SclModel, rho: np.ndarray) -> np.ndarray:
    """Dissipator sum_ab gamma_ab(0) (A_b rho A_a^dag - 1/2 {A_a^dag A_b, rho}).

    Hermitian and traceless for Hermitian rho. Expressed in whatever basis
    the coupling operators were given in (normally computational).
    """
    rho = np.asarray(rho)
    d = model.dim
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape} != ({d}, {d})")
    rates = model.gamma0
    ops = model.couplings.operators
    out = np.zeros((d, d), dtype=complex)
    for a in range(len(ops)):
        la_dag = ops[a].conj().T
        for b in range(len(ops)):
            r = rates[a, b]
            if r == 0.0:
                continue
            lb = ops[b]
            overlap = la_dag @ lb
            out += r * (
                lb @ rho @ la_dag - 0.5 * (overlap @ rho + rho @ overlap)
            )
    return out


def dissipator_superoperator(model: SclModel) -> np.ndarray:
    """The dissipator as a dim^2 x dim^2 matrix acting on column-stacked rho.

    The generator is time independent, so integrators can build this once:
    vec(D[rho]) = M @ vec(rho) with Fortran-order (column-stacking) vec.
    """
    d = model.dim
    eye = np.eye(d)
    rates = model.gamma0
    ops = model.couplings.operators
    m = np.zeros((d * d, d * d), dtype=complex)
    for a in range(len(ops)):
        la = ops[a]
        for b in range(len(ops)):
            r = rates[a, b]
            if r == 0.0:
                continue
            lb = ops[b]
            overlap = la.conj().T @ lb
            m += r * (
                np.kron(la.conj(), lb)
                - 0.5 * np.kron(eye, overlap)
                - 0.5 * np.kron(overlap.T, eye)
            )
    return m


def _check_labels(a: int, b: int, n: int) -> None:
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    for label in (a, b):
        if not 0 <= label < 2**n:
            raise ValueError(f"basis label {label} outside [0, 2^{n})")


def independent_dephasing_rate(a: int, b: int, n: int, t2c: float) -> float:
    """Decay rate of rho_ab for independent per-qubit sigma^z baths.

    Equals the Hamming distance between the computational labels divided by
    the single-qubit dephasing time; zero on the diagonal and at most n/t2c.
    """
    _check_labels(a, b, n)
    return (a ^ b).bit_count() / t2c


def collective_dephasing_rate(a: int, b: int, t2c: float) -> float:
    """Decay rate of rho_ab for one collective sigma^z bath.

    Equals the squared Hamming-weight difference over the single-qubit
    dephasing time; zero exactly on equal-weight (decoherence-free) pairs.
    """
    if a < 0 or b < 0:
        raise ValueError("basis labels must be non-negative")
    return (a.bit_count() - b.bit_count()) ** 2 / t2c
