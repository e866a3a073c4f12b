"""Closed-form decoherence and depopulation rates between energy eigenstates.

For a multi-qubit system under energy-eigenbasis dissipation with independent
identical baths, and provided neither the energies nor the energy gaps are
degenerate, the vectorized generator block-decouples: populations obey an
autonomous rate equation whose stationary state is Gibbs, and each coherence
rho_ab decays independently at a pairwise dephasing rate. This module
evaluates those closed forms — the pairwise rate, the ground-state
depopulation rate (which contains no zero-frequency term, so fast
computational-basis dephasing alone never empties the ground state), and the
generic per-level depopulation rate — plus the degeneracy audit that guards
their validity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hamiltonians import DEGENERACY_RTOL, EigenBasis
from .wcl_generator import CouplingSet, DegeneracyError

__all__ = [
    "DegeneracyAudit",
    "RateReport",
    "degeneracy_audit",
    "pairwise_dephasing_rate",
    "ground_depopulation_rate",
    "generic_depopulation_rate",
    "population_rate_matrix",
    "build_rate_report",
]


@dataclass(frozen=True)
class DegeneracyAudit:
    """Energy and gap collisions found in an eigensystem.

    Indices refer to the ascending-energy ordering. energy_pairs holds
    (a, b) with |e_a - e_b| < tolerance; gap_pairs holds ((a, b), (c, d))
    for distinct transitions sharing a Bohr frequency within tolerance
    (positive-frequency side; the negative side mirrors it). The counts are
    always exact; the example tuples are capped so heavily degenerate
    spectra do not enumerate millions of pairs.
    """

    energy_pairs: tuple
    gap_pairs: tuple
    n_energy_collisions: int
    n_gap_collisions: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.n_energy_collisions == 0 and self.n_gap_collisions == 0

    def summary(self) -> str:
        if self.passed:
            return "no degeneracies"
        return (
            f"{self.n_energy_collisions} degenerate energy pair(s), "
            f"{self.n_gap_collisions} shared gap pair(s) at tol {self.tolerance:.2e}"
        )


def _collisions(values, labels, tol, max_examples):
    """Count sorted-value pairs closer than tol; keep the first examples."""
    count = 0
    examples = []
    j = 0
    for i in range(len(values) - 1):
        if j <= i:
            j = i + 1
        while j < len(values) and values[j] - values[i] < tol:
            j += 1
        count += (j - 1) - i
        if len(examples) < max_examples:
            for k in range(i + 1, j):
                examples.append((labels[i], labels[k]))
                if len(examples) >= max_examples:
                    break
    return count, examples


def degeneracy_audit(
    basis: EigenBasis,
    tol: Optional[float] = None,
    max_examples: int = 100,
) -> DegeneracyAudit:
    """Scan an eigensystem for equal energies and equal energy gaps.

    tol defaults to the shared degeneracy tolerance, DEGENERACY_RTOL times
    the spectral norm. The closed-form rate expressions below require the
    audit to pass; they refuse otherwise.
    """
    energies = np.sort(np.asarray(basis.energies, dtype=float))
    d = len(energies)
    if tol is None:
        norm = float(np.max(np.abs(energies))) or 1.0
        tol = DEGENERACY_RTOL * norm

    n_energy, energy_pairs = _collisions(
        energies, list(range(d)), tol, max_examples
    )

    # positive Bohr frequencies of all transitions, sorted so collisions
    # are adjacent; the two-pointer count stays linear after the sort
    gaps = sorted(
        (energies[b] - energies[a], (a, b))
        for a in range(d)
        for b in range(a + 1, d)
    )
    n_gap, gap_pairs = _collisions(
        [g for g, _ in gaps], [p for _, p in gaps], tol, max_examples
    )
    return DegeneracyAudit(
        tuple(energy_pairs), tuple(gap_pairs), n_energy, n_gap, float(tol)
    )


def _checked_eigen_couplings(basis: EigenBasis, couplings: CouplingSet,
                             tol: Optional[float]):
    audit = degeneracy_audit(basis, tol)
    if not audit.passed:
        raise DegeneracyError(
            f"closed-form rates need a non-degenerate spectrum: {audit.summary()}"
        )
    states = np.asarray(basis.states, dtype=complex)
    energies = np.asarray(basis.energies, dtype=float)
    mats = [states.conj().T @ a @ states for a in couplings.operators]
    return energies, mats


def _sideband_rate(energies, mats, couplings, state: int, skip: int) -> float:
    """sum_{c != skip} gamma(e_state - e_c) sum-over-channels |A_{state,c}|^2."""
    total = 0.0
    for c in range(len(energies)):
        if c == skip:
            continue
        gm = couplings.gamma_matrix(float(energies[state] - energies[c]))
        x = np.array([m[state, c] for m in mats])
        total += float(np.real(x @ gm @ x.conj()))
    return total


def _pair_rate(energies, mats, couplings, a: int, b: int) -> float:
    g0 = couplings.gamma_matrix(0.0)
    diff = np.array([m[a, a].real - m[b, b].real for m in mats])
    rate = 0.5 * float(diff @ g0 @ diff)
    rate += 0.5 * _sideband_rate(energies, mats, couplings, a, skip=a)
    rate += 0.5 * _sideband_rate(energies, mats, couplings, b, skip=b)
    return rate


def pairwise_dephasing_rate(
    basis: EigenBasis,
    couplings: CouplingSet,
    a: int,
    b: int,
    tol: Optional[float] = None,
) -> float:
    """Decay rate 1/T2 of the coherence between eigenstates a and b.

    Sum of a zero-frequency term weighting the squared difference of the
    diagonal coupling elements and a sideband term collecting every
    transition out of either state at its gap rate; manifestly non-negative
    for independent baths. Refuses degenerate spectra, where the coherences
    no longer evolve independently.
    """
    if a == b:
        raise ValueError("pairwise rate needs two distinct eigenstates")
    energies, mats = _checked_eigen_couplings(basis, couplings, tol)
    d = len(energies)
    if not (0 <= a < d and 0 <= b < d):
        raise ValueError(f"eigenstate index out of range for dimension {d}")
    return _pair_rate(energies, mats, couplings, a, b)


def ground_depopulation_rate(
    basis: EigenBasis,
    couplings: CouplingSet,
    tol: Optional[float] = None,
) -> float:
    """Rate at which dissipation moves population out of the ground state.

    r_0 = sum_{a>0} gamma(e_a - e_0) e^(-beta (e_a - e_0)) sum_alpha
    |A_{alpha,0a}|^2: every term carries a Boltzmann-suppressed excitation
    gap and the zero-frequency rate never appears, so the computational
    dephasing time does not control ground-state loss. Evaluates the bath
    rate only at the positive gaps.
    """
    energies, mats = _checked_eigen_couplings(basis, couplings, tol)
    beta = couplings.bath.inv_temperature
    rate = 0.0
    for a in range(1, len(energies)):
        gap = float(energies[a] - energies[0])
        weight = sum(abs(m[0, a]) ** 2 for m in mats)
        rate += couplings.rate(gap) * math.exp(-beta * gap) * weight
    return rate


def generic_depopulation_rate(
    basis: EigenBasis,
    couplings: CouplingSet,
    a: int,
    tol: Optional[float] = None,
) -> float:
    """Total rate of population loss from eigenstate a.

    r_a = sum_{c != a} gamma(e_a - e_c) sum_alpha |A_{alpha,ac}|^2; for a=0
    this reduces to ground_depopulation_rate through the detailed-balance
    relation gamma(-w) = e^(-beta w) gamma(w).
    """
    energies, mats = _checked_eigen_couplings(basis, couplings, tol)
    if not 0 <= a < len(energies):
        raise ValueError(f"eigenstate index out of range for dimension {len(energies)}")
    return _sideband_rate(energies, mats, couplings, a, skip=a)


def population_rate_matrix(
    basis: EigenBasis,
    couplings: CouplingSet,
    tol: Optional[float] = None,
) -> np.ndarray:
    """Autonomous rate matrix R of the eigenbasis populations, dp/dt = R p.

    R[a, c] for a != c is the transfer rate c -> a; R[a, a] = -r_a so
    columns sum to zero. Detailed balance R[a,c]/R[c,a] = e^(-beta(e_a-e_c))
    makes the Gibbs distribution stationary.
    """
    energies, mats = _checked_eigen_couplings(basis, couplings, tol)
    d = len(energies)
    rates = np.zeros((d, d))
    for a in range(d):
        for c in range(d):
            if a == c:
                continue
            gm = couplings.gamma_matrix(float(energies[c] - energies[a]))
            x = np.array([m[a, c] for m in mats])
            rates[a, c] = float(np.real(x @ gm @ x.conj()))
    np.fill_diagonal(rates, -rates.sum(axis=0))
    return rates


@dataclass(frozen=True)
class RateReport:
    """All pairwise dephasing and depopulation rates of one eigensystem.

    rate_table is a (d, d) matrix holding 1/T2(a, b) off the diagonal and
    the depopulation rate r_a on it; all entries are non-negative.
    """

    energies: np.ndarray
    rate_table: np.ndarray
    audit: DegeneracyAudit

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def depopulation(self) -> np.ndarray:
        return np.diag(self.rate_table).copy()

    def pair_rate(self, a: int, b: int) -> float:
        if a == b:
            raise ValueError("pair rate needs two distinct eigenstates")
        return float(self.rate_table[a, b])

    def to_csv(self, path, metadata: Optional[dict] = None) -> None:
        """Long format: one row per (a, b) with a <= b; a == b rows hold r_a."""
        from .storage import write_table

        d = self.dim
        rows_a, rows_b, rates, gaps = [], [], [], []
        for a in range(d):
            for b in range(a, d):
                rows_a.append(float(a))
                rows_b.append(float(b))
                rates.append(self.rate_table[a, b])
                gaps.append(self.energies[b] - self.energies[a])
        meta = {
            "dim": d,
            "diagonal_entries": "depopulation rate of state a",
            "off_diagonal_entries": "pairwise dephasing rate 1/T2(a, b)",
        }
        meta.update(metadata or {})
        write_table(
            path,
            {"a": rows_a, "b": rows_b, "rate": rates, "gap": gaps},
            meta,
        )


def build_rate_report(
    basis: EigenBasis,
    couplings: CouplingSet,
    tol: Optional[float] = None,
) -> RateReport:
    """Evaluate every pairwise and depopulation rate; refuses degeneracy."""
    energies, mats = _checked_eigen_couplings(basis, couplings, tol)
    d = len(energies)
    table = np.zeros((d, d))
    for a in range(d):
        table[a, a] = _sideband_rate(energies, mats, couplings, a, skip=a)
        for b in range(a + 1, d):
            rate = _pair_rate(energies, mats, couplings, a, b)
            table[a, b] = table[b, a] = rate
    return RateReport(
        energies=energies.copy(),
        rate_table=table,
        audit=degeneracy_audit(basis, tol),
    )
