"""Annealing schedules, time-dependent Hamiltonians, and benchmark instances.

Conventions (shared with the rest of the package): hbar = 1, energies in GHz,
times in ns; a schedule is a smooth monotone map s in [0,1] -> theta in [0,1].
Multi-qubit computational states are indexed little-endian: bit i of the basis
index is qubit i, and the classical spin value is z_i = 1 - 2*bit_i (so
|0> -> z=+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import betainc
from scipy.special import beta as beta_function

__all__ = [
    "Schedule",
    "SingleQubitModel",
    "IsingInstance",
    "EigenBasis",
    "SpectrumTrack",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "beta_schedule",
    "single_qubit_hamiltonian",
    "adiabatic_parameter",
    "spectrum_track",
    "site_operator",
    "quantum_signature_instance",
    "load_instance",
    "DEGENERACY_RTOL",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Dense-matrix guard: 2^12 x 2^12 complex is ~0.25 GB, a sensible ceiling.
_MAX_DENSE_QUBITS = 12

# Shared relative tolerance (times the spectral norm) below which energies
# or gaps are treated as degenerate, everywhere in the package.
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class Schedule:
    """Interpolation schedule theta(s).

    kind="linear" is theta(s)=s. kind="beta" with order k is the regularized
    incomplete beta function theta_k(s) = B_s(1+k,1+k)/B_1(1+k,1+k), whose
    first k derivatives vanish at both endpoints (k=0 reduces to linear).
    """

    kind: str = "linear"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("linear", "beta"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError(f"schedule order must be a non-negative integer, got {self.k}")
        if self.kind == "linear" and self.k != 0:
            raise ValueError("linear schedule takes no order parameter")

    @staticmethod
    def _check_domain(s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0) or np.any(s > 1.0):
            raise ValueError("schedule argument must lie in [0, 1]")
        return s

    def theta(self, s):
        s = self._check_domain(s)
        if self.kind == "linear":
            out = s
        else:
            out = betainc(self.k + 1, self.k + 1, s)
        return float(out) if out.ndim == 0 else out

    def dtheta(self, s):
        """d theta / d s; for the beta family s^k (1-s)^k / B(1+k, 1+k)."""
        s = self._check_domain(s)
        if self.kind == "linear":
            out = np.ones_like(s)
        else:
            out = (s * (1.0 - s)) ** self.k / beta_function(self.k + 1, self.k + 1)
        return float(out) if out.ndim == 0 else out

    def inverse(self, target: float) -> float:
        """The s with theta(s) = target (theta is strictly increasing)."""
        if not 0.0 <= target <= 1.0:
            raise ValueError("target must lie in [0, 1]")
        if self.kind == "linear":
            return target
        if target in (0.0, 1.0):
            return target
        return brentq(lambda s: self.theta(s) - target, 0.0, 1.0, xtol=1e-15)


def beta_schedule(k: int, s):
    """theta_k(s) = B_s(1+k,1+k)/B_1(1+k,1+k); k=0 is the identity map."""
    return Schedule("beta", k).theta(s)


@dataclass(frozen=True)
class SingleQubitModel:
    """Qubit interpolating from a transverse to a longitudinal field,

        H(s) = -1/2 omega_x (1 - theta(s)) sigma^x - 1/2 omega_z theta(s) sigma^z,

    with energy gap Delta(s) = omega_x * lam(s) where
    lam = sqrt((1-theta)^2 + theta^2 ratio^2) and ratio = omega_z/omega_x.
    """

    omega_x: float
    omega_z: float
    schedule: Schedule = Schedule("linear")

    def __post_init__(self):
        if self.omega_x <= 0 or self.omega_z <= 0:
            raise ValueError("omega_x and omega_z must be positive")

    @property
    def ratio(self) -> float:
        return self.omega_z / self.omega_x

    def lam(self, s):
        th = self.schedule.theta(s)
        return np.sqrt((1.0 - th) ** 2 + (th * self.ratio) ** 2)

    def gap(self, s):
        return self.omega_x * self.lam(s)

    @property
    def lambda_min(self) -> float:
        g = self.ratio
        return g / math.sqrt(1.0 + g * g)

    @property
    def delta_min(self) -> float:
        return self.omega_x * self.lambda_min

    @property
    def theta_min(self) -> float:
        """theta value at the avoided crossing."""
        return 1.0 / (1.0 + self.ratio**2)

    @property
    def s_min(self) -> float:
        """Location of the minimum gap."""
        return self.schedule.inverse(self.theta_min)

    @cached_property
    def drive_scale(self) -> float:
        """max over s and eigenstate pairs of |<a| dH/ds |b>|.

        For the linear schedule the maximum is the off-diagonal element at the
        avoided crossing, omega_x sqrt(1 + ratio^2) / 2; in general it is
        found on a dense grid.
        """
        s = np.linspace(0.0, 1.0, 4001)
        th = self.schedule.theta(s)
        dth = self.schedule.dtheta(s)
        lam = np.sqrt((1.0 - th) ** 2 + (th * self.ratio) ** 2)
        off_diag = dth * self.omega_z / (2.0 * lam)
        diag = 0.5 * self.omega_x * dth * np.abs(
            -(1.0 - th) + th * self.ratio**2
        ) / lam
        return float(max(off_diag.max(), diag.max()))

    def hamiltonian(self, s) -> np.ndarray:
        th = self.schedule.theta(s)
        return (
            -0.5 * self.omega_x * (1.0 - th) * PAULI_X
            - 0.5 * self.omega_z * th * PAULI_Z
        )

    def ground_state(self, s) -> np.ndarray:
        """|eps_-(s)> proportional to (theta*ratio + lam)|0> + (1-theta)|1>."""
        th = self.schedule.theta(s)
        lam = float(self.lam(s))
        v = np.array([th * self.ratio + lam, 1.0 - th], dtype=complex)
        return v / np.linalg.norm(v)

    def excited_state(self, s) -> np.ndarray:
        g = self.ground_state(s)
        return np.array([-g[1].conjugate(), g[0].conjugate()], dtype=complex)


def single_qubit_hamiltonian(model: SingleQubitModel, s) -> np.ndarray:
    return model.hamiltonian(s)


def adiabatic_parameter(model: SingleQubitModel, t_f: float) -> float:
    """2 t_f omega_x lambda_min^3 / ratio; >> 1 means adiabatic."""
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    return 2.0 * t_f * model.omega_x * model.lambda_min**3 / model.ratio


class EigenBasis(NamedTuple):
    """Instantaneous eigendecomposition; states holds eigenvectors as columns."""

    energies: np.ndarray
    states: np.ndarray


def _gauge_fix(states: np.ndarray) -> np.ndarray:
    """Rotate each column's phase so its largest-magnitude entry is real > 0."""
    idx = np.argmax(np.abs(states), axis=0)
    lead = states[idx, np.arange(states.shape[1])]
    phase = np.where(np.abs(lead) == 0, 1.0, lead / np.abs(lead))
    return states / phase


@dataclass(frozen=True)
class SpectrumTrack:
    """Eigensystem along an s grid with continuity-fixed eigenvector phases."""

    s: np.ndarray
    energies: np.ndarray        # (n_s, d), ascending per row
    states: np.ndarray          # (n_s, d, d), eigenvectors as columns
    min_gap: float              # min over s of energies[:,1] - energies[:,0]
    s_at_min_gap: float
    degenerate_points: tuple    # (s, level) pairs with near-degenerate gaps

    @property
    def flagged(self) -> bool:
        return len(self.degenerate_points) > 0

    def basis_at(self, index: int) -> EigenBasis:
        return EigenBasis(self.energies[index], self.states[index])


# Adjacent levels closer than this (relative to the spectral norm) are treated
# as one subspace when checking continuity: inside such a block the
# eigenvector basis is gauge, not physics, so per-level overlaps are
# meaningless and refinement could never terminate.
_BLOCK_RTOL = 1e-8
# Blocks tighter than this are exactly degenerate for practical purposes and
# may be basis-rotated for continuity without disturbing eigen-residuals.
_ROTATE_RTOL = 1e-11
# Eigenvalues may move at most this fraction of the spectral span per grid
# step before the interval is refined regardless of overlaps.
_MAX_LEVEL_DRIFT = 0.05


def _block_slices(merge_pair) -> list:
    """Contiguous level blocks; merge_pair[i] joins levels i and i+1."""
    d = len(merge_pair) + 1
    blocks, start = [], 0
    for i in range(d - 1):
        if not merge_pair[i]:
            blocks.append(slice(start, i + 1))
            start = i + 1
    blocks.append(slice(start, d))
    return blocks


def spectrum_track(
    h_fn: Callable[[float], np.ndarray],
    grid: Sequence[float],
    overlap_floor: float = 0.9,
    degeneracy_rtol: float = DEGENERACY_RTOL,
    max_refinements: int = 16,
) -> SpectrumTrack:
    """Track the instantaneous eigensystem of h_fn(s) along the grid.

    The grid is refined by midpoint insertion until consecutive same-level
    eigenvector overlaps all exceed overlap_floor (degenerate blocks are
    compared as subspaces via principal angles), then a sequential pass
    phase-aligns each level with its predecessor — sign continuity for real
    Hamiltonians, a basis rotation inside exactly degenerate blocks.
    Near-degenerate adjacent eigenvalues (gap < degeneracy_rtol * spectral
    norm) are flagged, not repaired.
    """
    s_values = [float(s) for s in grid]
    if len(s_values) < 2 or any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("grid must be strictly increasing with >= 2 points")

    cache: dict = {}
    span_seen = [0.0]  # largest spectral span encountered on the grid

    def eig(s):
        if s not in cache:
            h = np.asarray(h_fn(s), dtype=complex)
            vals, vecs = np.linalg.eigh(h)
            cache[s] = (vals, _gauge_fix(vecs))
            span_seen[0] = max(span_seen[0], float(np.ptp(vals)))
        return cache[s]

    def continuity_ok(a, b):
        (ea, va), (eb, vb) = eig(a), eig(b)
        if ea.size == 1:
            return True
        span = span_seen[0]
        drift = np.abs(eb - ea)
        if span > 0 and drift.max() > _MAX_LEVEL_DRIFT * span:
            return False
        # Merge level pairs whose gap is degenerate, or small enough that the
        # pair may genuinely cross inside the interval: there per-level
        # overlap is gauge-ambiguous and only the subspace is well defined.
        tol = _BLOCK_RTOL * max(np.max(np.abs(ea)), np.max(np.abs(eb)))
        gap = np.minimum(np.diff(ea), np.diff(eb))
        merge = (gap <= tol) | (gap <= 2.0 * (drift[:-1] + drift[1:]))
        for blk in _block_slices(merge):
            cross = va[:, blk].conj().T @ vb[:, blk]
            if blk.stop - blk.start == 1:
                smallest = abs(cross[0, 0])
            else:
                smallest = np.linalg.svd(cross, compute_uv=False)[-1]
            if smallest <= overlap_floor:
                return False
        return True

    for _ in range(max_refinements):
        inserts = [
            0.5 * (a + b)
            for a, b in zip(s_values, s_values[1:])
            if not continuity_ok(a, b)
        ]
        if not inserts:
            break
        s_values = sorted(s_values + inserts)
        if len(s_values) > 20000:
            raise RuntimeError("grid refinement exploded; spectrum too irregular")
    else:
        raise RuntimeError(
            "eigenvector continuity not reached after "
            f"{max_refinements} grid refinements (crossing too sharp?)"
        )

    n_s = len(s_values)
    d = eig(s_values[0])[0].shape[0]
    energies = np.empty((n_s, d))
    states = np.empty((n_s, d, d), dtype=complex)
    degenerate = []
    for j, s in enumerate(s_values):
        vals, vecs = eig(s)
        if j > 0:
            vecs = vecs.copy()
            norm = max(np.max(np.abs(vals)), np.max(np.abs(energies[j - 1])))
            rot_tol = _ROTATE_RTOL * norm
            merge = (np.diff(energies[j - 1]) <= rot_tol) & (np.diff(vals) <= rot_tol)
            for blk in _block_slices(merge):
                cross = states[j - 1][:, blk].conj().T @ vecs[:, blk]
                if blk.stop - blk.start == 1:
                    z = cross[0, 0]
                    if abs(z) > 0:
                        vecs[:, blk] *= z.conjugate() / abs(z)
                else:
                    # closest unitary to cross^dagger: aligns the degenerate
                    # basis with the previous point
                    u, _, vh = np.linalg.svd(cross)
                    vecs[:, blk] = vecs[:, blk] @ (u @ vh).conj().T
        energies[j] = vals
        states[j] = vecs
        norm = np.max(np.abs(vals)) or 1.0
        for level, gap in enumerate(np.diff(vals)):
            if gap < degeneracy_rtol * norm:
                degenerate.append((s, level))

    first_gaps = energies[:, 1] - energies[:, 0]
    j_min = int(np.argmin(first_gaps))
    return SpectrumTrack(
        s=np.array(s_values),
        energies=energies,
        states=states,
        min_gap=float(first_gaps[j_min]),
        s_at_min_gap=s_values[j_min],
        degenerate_points=tuple(degenerate),
    )


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-qubit operator at `site` in an n-qubit register.

    Little-endian: site 0 acts on the least-significant bit of the basis index.
    """
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} qubits")
    lower = np.eye(2**site)
    upper = np.eye(2 ** (n - site - 1))
    return np.kron(upper, np.kron(op, lower))


@dataclass(frozen=True)
class IsingInstance:
    """Transverse-field Ising annealing instance,

        H(s) = -A(s) sum_i sigma^x_i + B(s) H_Ising,
        H_Ising = -sum_i h_i sigma^z_i + sum_{i<j} J_ij sigma^z_i sigma^z_j,

    with A = 1 - theta(s) and B = theta(s). Couplings are stored as
    (i, j, J_ij) triples with i < j; J < 0 is ferromagnetic.
    """

    n: int
    fields: tuple
    couplings: tuple
    schedule: Schedule = Schedule("linear")

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        fields = tuple(float(h) for h in self.fields)
        if len(fields) != self.n:
            raise ValueError(f"expected {self.n} local fields, got {len(fields)}")
        seen = set()
        couplings = []
        for i, j, val in self.couplings:
            i, j = int(i), int(j)
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"bad coupling pair ({i}, {j})")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling ({i}, {j})")
            seen.add((i, j))
            couplings.append((i, j, float(val)))
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "couplings", tuple(sorted(couplings)))

    def a(self, s):
        return 1.0 - self.schedule.theta(s)

    def b(self, s):
        return self.schedule.theta(s)

    @cached_property
    def _classical_energies(self) -> np.ndarray:
        states = np.arange(2**self.n)
        z = 1.0 - 2.0 * ((states[:, None] >> np.arange(self.n)) & 1)
        energy = -(z @ np.asarray(self.fields))
        for i, j, val in self.couplings:
            energy += val * z[:, i] * z[:, j]
        return energy

    def classical_energies(self) -> np.ndarray:
        """H_Ising diagonal over all 2^n computational states."""
        return self._classical_energies.copy()

    def ground_states(self) -> np.ndarray:
        """Indices of the classical ground manifold (exact enumeration)."""
        energies = self._classical_energies
        return np.flatnonzero(np.isclose(energies, energies.min(), atol=1e-12))

    @cached_property
    def _transverse(self) -> np.ndarray:
        total = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for i in range(self.n):
            total += site_operator(PAULI_X, i, self.n)
        return total

    def hamiltonian(self, s) -> np.ndarray:
        if self.n > _MAX_DENSE_QUBITS:
            raise ValueError(
                f"dense Hamiltonian limited to {_MAX_DENSE_QUBITS} qubits"
            )
        return -self.a(s) * self._transverse + self.b(s) * np.diag(
            self._classical_energies.astype(complex)
        )


def quantum_signature_instance(schedule: Schedule = Schedule("linear")) -> IsingInstance:
    """8-spin instance with a 17-fold degenerate classical ground manifold.

    Four core spins (h=+1) form a ferromagnetic ring, each coupled
    ferromagnetically to one outer spin (h=-1). Sixteen ground states form a
    single-spin-flip-connected cluster (core up, outer free); the seventeenth
    (all spins down) is isolated, at least 4 flips from the cluster.
    """
    ring = [(0, 1, -1.0), (1, 2, -1.0), (2, 3, -1.0), (0, 3, -1.0)]
    spokes = [(i, i + 4, -1.0) for i in range(4)]
    return IsingInstance(
        n=8,
        fields=(1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0),
        couplings=tuple(ring + spokes),
        schedule=schedule,
    )


def load_instance(path) -> IsingInstance:
    """Read an IsingInstance from a TOML file.

    Expected fields: n (int), schedule ("linear" or "beta"), schedule_k
    (int, beta only), fields (list of [i, h_i]), couplings (list of
    [i, j, J_ij]). Omitted field/coupling entries default to zero.
    """
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    try:
        n = int(raw["n"])
    except KeyError:
        raise ValueError(f"{path}: missing qubit count 'n'") from None
    kind = raw.get("schedule", "linear")
    schedule = Schedule(kind, int(raw.get("schedule_k", 0)))
    fields = [0.0] * n
    for entry in raw.get("fields", []):
        i, h = entry
        if not 0 <= int(i) < n:
            raise ValueError(f"{path}: field index {i} out of range")
        fields[int(i)] = float(h)
    couplings = [(int(i), int(j), float(v)) for i, j, v in raw.get("couplings", [])]
    return IsingInstance(n=n, fields=tuple(fields), couplings=tuple(couplings),
                         schedule=schedule)
