"""Path-integral Monte Carlo annealing with an explicit dephasing bath.

The transverse-field Ising Hamiltonian is mapped onto a classical spin
lattice with an extra periodic imaginary-time dimension of n_tau slices;
Metropolis sweeps then sample the instantaneous Gibbs state as the schedule
parameter advances. Independent Ohmic baths coupled to each qubit through
its z operator are integrated out exactly, leaving a long-range
ferromagnetic kernel 1/sin^2(pi |tau - tau'| / n_tau) along the time-like
direction with overall strength alpha. At alpha = 0 the method behaves like
simulated quantum annealing; as alpha grows the slices of each worldline
lock together and updates degenerate into classical bit flips, so tuning
alpha interpolates between quantum-annealing-like and classical-annealing-
like sampling statistics.

The ratio experiment drives an instance whose classical ground manifold
splits into a connected cluster and an isolated state, and estimates the
per-state occupation ratio between them with bootstrap errors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .hamiltonians import IsingInstance

__all__ = [
    "QmcConfig",
    "TrotterLattice",
    "AnnealResult",
    "EnsembleResult",
    "GroundPartition",
    "RatioEstimate",
    "j_perp",
    "bath_kernel",
    "total_action",
    "action_delta",
    "metropolis_sweep",
    "anneal_run",
    "anneal_ensemble",
    "sample_lattice_states",
    "ground_state_partition",
    "pi_pc_experiment",
    "write_ratio_table",
]

# transverse amplitude floor applied on the final sweeps: the time-like
# coupling diverges logarithmically as A -> 0, so the last step is evaluated
# at a tiny positive amplitude, freezing the slices together as intended
A_FLOOR = 1e-6


@dataclass(frozen=True)
class QmcConfig:
    """Monte Carlo parameters shared by every run of an experiment.

    beta is the simulation inverse temperature (dimensionless), n_tau the
    number of imaginary-time slices, sweeps the number of schedule steps
    (one full-lattice Metropolis sweep each), alpha the bath-kernel
    strength, runs the repetition count for ensembles, and seed the root of
    the per-run random streams.
    """

    beta: float = 10.0
    n_tau: int = 64
    sweeps: int = 500
    alpha: float = 0.0
    runs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("inverse temperature must be positive")
        if self.n_tau < 2:
            raise ValueError("need at least two imaginary-time slices")
        if self.sweeps < 1:
            raise ValueError("need at least one sweep")
        if self.alpha < 0:
            raise ValueError("bath strength must be non-negative")
        if self.runs < 1:
            raise ValueError("need at least one run")


@dataclass
class TrotterLattice:
    """Classical +-1 spins mu[i, tau], periodic along the tau axis."""

    spins: np.ndarray

    def __post_init__(self):
        spins = np.asarray(self.spins, dtype=np.int8)
        if spins.ndim != 2 or spins.shape[1] < 2:
            raise ValueError("lattice must be (qubits, slices) with >= 2 slices")
        if not np.all(np.abs(spins) == 1):
            raise ValueError("lattice entries must be +-1")
        self.spins = spins

    @classmethod
    def random(cls, n: int, n_tau: int, rng: np.random.Generator) -> "TrotterLattice":
        spins = (rng.integers(0, 2, size=(n, n_tau)) * 2 - 1).astype(np.int8)
        return cls(spins)

    @property
    def n(self) -> int:
        return self.spins.shape[0]

    @property
    def n_tau(self) -> int:
        return self.spins.shape[1]

    def slice_state(self, tau: int) -> int:
        """Classical bit state of one slice; bit i set where mu[i] = -1."""
        bits = 0
        for i in range(self.n):
            if self.spins[i, tau] < 0:
                bits |= 1 << i
        return bits

    def slice_agreement(self) -> float:
        """Mean over qubits of the majority fraction along the worldline.

        1.0 means every worldline is uniform (slices fully locked); 0.5 is
        the floor for even n_tau with maximally disordered worldlines.
        """
        up = (self.spins > 0).sum(axis=1)
        majority = np.maximum(up, self.n_tau - up)
        return float(np.mean(majority / self.n_tau))

    def copy(self) -> "TrotterLattice":
        return TrotterLattice(self.spins.copy())


def j_perp(beta: float, a_value: float, n_tau: int) -> float:
    """Nearest-neighbor time-like coupling -(1/2) ln tanh(beta A / n_tau).

    Positive for any finite positive argument, divergent as A -> 0 (slices
    freeze together) and vanishing as A -> infinity (slices decouple).
    """
    x = beta * a_value / n_tau
    if x <= 0.0:
        raise ValueError("time-like coupling needs beta * A / n_tau > 0")
    return -0.5 * math.log(math.tanh(x))


def bath_kernel(n_tau: int) -> np.ndarray:
    """Distance kernel k[d] = 1 / sin^2(pi d / n_tau), k[0] = 0.

    Symmetric under d -> n_tau - d, so k[(t' - t) % n_tau] depends only on
    the cyclic distance between slices.
    """
    if n_tau < 2:
        raise ValueError("need at least two imaginary-time slices")
    kern = np.zeros(n_tau)
    for d in range(1, n_tau):
        kern[d] = 1.0 / math.sin(math.pi * d / n_tau) ** 2
    return kern


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True, nogil=True)
def _site_delta(spins, i, t, hv, nptr, nidx, nj, pref, jp, alpha, kern):
    """Action change for flipping mu[i, t] at fixed schedule parameters."""
    ntau = spins.shape[1]
    mu = spins[i, t]
    field = -hv[i]
    for p in range(nptr[i], nptr[i + 1]):
        field += nj[p] * spins[nidx[p], t]
    delta = -2.0 * mu * field * pref
    tm = t - 1 if t > 0 else ntau - 1
    tp = t + 1 if t < ntau - 1 else 0
    delta += 2.0 * jp * mu * (spins[i, tm] + spins[i, tp])
    if alpha > 0.0:
        acc = 0.0
        for t2 in range(ntau):
            if t2 != t:
                acc += kern[(t2 - t) % ntau] * spins[i, t2]
        delta += 2.0 * alpha * mu * acc
    return delta


@njit(cache=True, nogil=True)
def _sweep(spins, hv, nptr, nidx, nj, pref, jp, alpha, kern, u):
    """One fixed-scan Metropolis pass; returns the acceptance count."""
    nq, ntau = spins.shape
    accepted = 0
    r = 0
    for i in range(nq):
        for t in range(ntau):
            delta = _site_delta(
                spins, i, t, hv, nptr, nidx, nj, pref, jp, alpha, kern
            )
            if delta <= 0.0 or u[r] < math.exp(-delta):
                spins[i, t] = -spins[i, t]
                accepted += 1
            r += 1
    return accepted


@njit(cache=True, nogil=True)
def _anneal(spins, hv, nptr, nidx, nj, beta, thetas, alpha, kern, uu, a_floor):
    ntau = spins.shape[1]
    for k in range(thetas.shape[0]):
        theta = thetas[k]
        a_value = 1.0 - theta
        if a_value < a_floor:
            a_value = a_floor
        jp = -0.5 * math.log(math.tanh(beta * a_value / ntau))
        pref = beta * theta / ntau
        _sweep(spins, hv, nptr, nidx, nj, pref, jp, alpha, kern, uu[k])
    return 0


@njit(cache=True, nogil=True)
def _sample_chain(spins, hv, nptr, nidx, nj, pref, jp, alpha, kern, uu,
                  burn_in, thin, out):
    n_samples = out.shape[0]
    k = 0
    for rep in range(burn_in):
        _sweep(spins, hv, nptr, nidx, nj, pref, jp, alpha, kern, uu[k])
        k += 1
    for m in range(n_samples):
        for rep in range(thin):
            _sweep(spins, hv, nptr, nidx, nj, pref, jp, alpha, kern, uu[k])
            k += 1
        out[m] = spins
    return 0


# ---------------------------------------------------------------------------
# instance plumbing


def _adjacency(instance: IsingInstance):
    """CSR neighbor arrays (pointers, indices, couplings) plus local fields."""
    n = instance.n
    degree = np.zeros(n, dtype=np.int64)
    for i, j, _ in instance.couplings:
        degree[i] += 1
        degree[j] += 1
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(degree)
    idx = np.zeros(ptr[-1], dtype=np.int64)
    val = np.zeros(ptr[-1])
    fill = ptr[:-1].copy()
    for i, j, coupling in instance.couplings:
        idx[fill[i]], val[fill[i]] = j, coupling
        fill[i] += 1
        idx[fill[j]], val[fill[j]] = i, coupling
        fill[j] += 1
    fields = np.asarray(instance.fields, dtype=float)
    return fields, ptr, idx, val


def _schedule_params(instance: IsingInstance, config: QmcConfig, s: float):
    theta = float(instance.schedule.theta(s))
    a_value = max(1.0 - theta, A_FLOOR)
    jp = j_perp(config.beta, a_value, config.n_tau)
    pref = config.beta * theta / config.n_tau
    return pref, jp


def _check_lattice(lattice: TrotterLattice, instance: IsingInstance,
                   config: QmcConfig) -> None:
    if lattice.n != instance.n:
        raise ValueError(
            f"lattice has {lattice.n} qubits, instance has {instance.n}"
        )
    if lattice.n_tau != config.n_tau:
        raise ValueError(
            f"lattice has {lattice.n_tau} slices, config says {config.n_tau}"
        )


def total_action(lattice: TrotterLattice, s: float, instance: IsingInstance,
                 config: QmcConfig) -> float:
    """Full dimensionless action of a lattice configuration at point s.

    Slice-wise classical energy scaled by beta * theta / n_tau, minus the
    time-like nearest-neighbor coupling over the periodic rings, minus the
    long-range bath kernel over all distinct slice pairs of each worldline.
    """
    _check_lattice(lattice, instance, config)
    spins = lattice.spins.astype(float)
    fields, ptr, idx, val = _adjacency(instance)
    pref, jp = _schedule_params(instance, config, s)

    classical = -fields @ spins  # per-slice field energy
    for i, j, coupling in instance.couplings:
        classical += coupling * spins[i] * spins[j]
    action = pref * float(classical.sum())
    action -= jp * float((spins * np.roll(spins, -1, axis=1)).sum())
    if config.alpha > 0.0:
        kern = bath_kernel(config.n_tau)
        for d in range(1, config.n_tau):
            pairs = float((spins * np.roll(spins, -d, axis=1)).sum())
            action -= 0.5 * config.alpha * kern[d] * pairs  # each pair twice
    return action


def action_delta(lattice: TrotterLattice, site: tuple, s: float,
                 instance: IsingInstance, config: QmcConfig) -> float:
    """Action change for flipping the spin at site = (qubit, slice)."""
    _check_lattice(lattice, instance, config)
    i, tau = site
    if not (0 <= i < lattice.n and 0 <= tau < lattice.n_tau):
        raise ValueError(f"site {site} outside the lattice")
    fields, ptr, idx, val = _adjacency(instance)
    pref, jp = _schedule_params(instance, config, s)
    return float(
        _site_delta(
            lattice.spins, i, tau, fields, ptr, idx, val, pref, jp,
            config.alpha, bath_kernel(config.n_tau),
        )
    )


def metropolis_sweep(lattice: TrotterLattice, s: float,
                     instance: IsingInstance, config: QmcConfig,
                     rng: np.random.Generator) -> int:
    """One in-place fixed-scan Metropolis sweep; returns accepted flips."""
    _check_lattice(lattice, instance, config)
    fields, ptr, idx, val = _adjacency(instance)
    pref, jp = _schedule_params(instance, config, s)
    u = rng.random(lattice.n * lattice.n_tau)
    return int(
        _sweep(
            lattice.spins, fields, ptr, idx, val, pref, jp,
            config.alpha, bath_kernel(config.n_tau), u,
        )
    )


# ---------------------------------------------------------------------------
# annealing runs


@dataclass(frozen=True)
class AnnealResult:
    """Readout of one annealing run.

    state: classical bit state of a uniformly random slice at the end
    (unbiased sample of the diagonal distribution). lattice: the final
    lattice, for slice-agreement diagnostics.
    """

    state: int
    lattice: TrotterLattice


def _anneal_arrays(instance, config, rng, fields, ptr, idx, val, kern, thetas):
    spins = (rng.integers(0, 2, size=(instance.n, config.n_tau)) * 2 - 1).astype(
        np.int8
    )
    uu = rng.random((config.sweeps, instance.n * config.n_tau))
    _anneal(
        spins, fields, ptr, idx, val, config.beta, thetas, config.alpha,
        kern, uu, A_FLOOR,
    )
    t_read = int(rng.integers(0, config.n_tau))
    return spins, t_read


def _theta_grid(instance: IsingInstance, config: QmcConfig) -> np.ndarray:
    """Schedule values for each sweep: s covers [0, 1] inclusive."""
    if config.sweeps == 1:
        s = np.array([1.0])
    else:
        s = np.arange(config.sweeps) / (config.sweeps - 1)
    return np.asarray(instance.schedule.theta(s), dtype=float)


def anneal_run(instance: IsingInstance, config: QmcConfig,
               rng: np.random.Generator) -> AnnealResult:
    """Anneal one random lattice from s=0 to s=1 and read out a slice."""
    fields, ptr, idx, val = _adjacency(instance)
    kern = bath_kernel(config.n_tau)
    thetas = _theta_grid(instance, config)
    spins, t_read = _anneal_arrays(
        instance, config, rng, fields, ptr, idx, val, kern, thetas
    )
    lattice = TrotterLattice(spins)
    return AnnealResult(state=lattice.slice_state(t_read), lattice=lattice)


@dataclass(frozen=True)
class EnsembleResult:
    """Readout states and slice-agreement fractions of independent runs."""

    states: np.ndarray
    slice_agreement: np.ndarray

    @property
    def runs(self) -> int:
        return len(self.states)


def anneal_ensemble(instance: IsingInstance, config: QmcConfig,
                    workers: int = 1) -> EnsembleResult:
    """config.runs independent annealing runs with derived per-run seeds.

    Each run owns its lattice and random stream (child sequences spawned
    from config.seed), so results are bit-for-bit reproducible for any
    worker count; workers > 1 threads the compiled annealing loop.
    """
    fields, ptr, idx, val = _adjacency(instance)
    kern = bath_kernel(config.n_tau)
    thetas = _theta_grid(instance, config)
    children = np.random.SeedSequence(config.seed).spawn(config.runs)
    states = np.zeros(config.runs, dtype=np.int64)
    agreement = np.zeros(config.runs)

    def one(r: int) -> None:
        rng = np.random.default_rng(children[r])
        spins, t_read = _anneal_arrays(
            instance, config, rng, fields, ptr, idx, val, kern, thetas
        )
        lattice = TrotterLattice(spins)
        states[r] = lattice.slice_state(t_read)
        agreement[r] = lattice.slice_agreement()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(config.runs)))
    else:
        for r in range(config.runs):
            one(r)
    return EnsembleResult(states=states, slice_agreement=agreement)


def sample_lattice_states(instance: IsingInstance, config: QmcConfig,
                          s: float, n_samples: int, rng: np.random.Generator,
                          thin: int = 1, burn_in: int = 0) -> np.ndarray:
    """Fixed-s Metropolis chain returning (n_samples, n, n_tau) snapshots.

    Diagnostics utility: the empirical distribution over snapshots should
    match exp(-action)/Z, which the tests verify against exhaustive
    enumeration on small lattices.
    """
    fields, ptr, idx, val = _adjacency(instance)
    pref, jp = _schedule_params(instance, config, s)
    kern = bath_kernel(config.n_tau)
    spins = TrotterLattice.random(instance.n, config.n_tau, rng).spins
    total = burn_in + thin * n_samples
    uu = rng.random((total, instance.n * config.n_tau))
    out = np.zeros((n_samples, instance.n, config.n_tau), dtype=np.int8)
    _sample_chain(
        spins, fields, ptr, idx, val, pref, jp, config.alpha, kern, uu,
        burn_in, thin, out,
    )
    return out


# ---------------------------------------------------------------------------
# ratio experiment


@dataclass(frozen=True)
class GroundPartition:
    """Classical ground manifold split by single-flip connectivity.

    cluster: states in connected components of size > 1; isolated: states
    whose component is a singleton. degeneracy is the manifold size.
    """

    cluster: tuple
    isolated: tuple
    degeneracy: int


def ground_state_partition(instance: IsingInstance) -> GroundPartition:
    """Partition the exact ground manifold by single-spin-flip adjacency."""
    states = [int(g) for g in instance.ground_states()]
    members = set(states)
    seen: set = set()
    cluster, isolated = [], []
    for start in states:
        if start in seen:
            continue
        component = []
        stack = [start]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            component.append(x)
            for bit in range(instance.n):
                y = x ^ (1 << bit)
                if y in members and y not in seen:
                    stack.append(y)
        if len(component) > 1:
            cluster.extend(component)
        else:
            isolated.extend(component)
    return GroundPartition(
        cluster=tuple(sorted(cluster)),
        isolated=tuple(sorted(isolated)),
        degeneracy=len(states),
    )


@dataclass(frozen=True)
class RatioEstimate:
    """Isolated-to-cluster per-state occupation ratio at one bath strength.

    p_isolated and p_cluster are per-state frequencies (hit counts divided
    by the number of states in each part). diverged flags a zero cluster
    count, where the ratio is infinite.
    """

    alpha: float
    p_isolated: float
    p_cluster: float
    ratio: float
    error_two_sigma: float
    ground_state_rate: float
    runs: int
    diverged: bool = False


def _classify(states: np.ndarray, partition: GroundPartition) -> np.ndarray:
    """0 = other, 1 = isolated, 2 = cluster."""
    codes = np.zeros(len(states), dtype=np.int8)
    isolated = np.isin(states, partition.isolated)
    cluster = np.isin(states, partition.cluster)
    codes[isolated] = 1
    codes[cluster] = 2
    return codes


def _ratio_from_codes(codes: np.ndarray, partition: GroundPartition):
    p_i = float(np.mean(codes == 1)) / len(partition.isolated)
    p_c = float(np.mean(codes == 2)) / len(partition.cluster)
    if p_c == 0.0:
        return p_i, p_c, math.inf
    return p_i, p_c, p_i / p_c


def pi_pc_experiment(
    instance: IsingInstance,
    config: QmcConfig,
    alphas: Sequence[float],
    workers: int = 1,
    bootstrap_resamples: int = 100,
) -> list:
    """RatioEstimate per bath strength, bootstrap errors over the runs.

    Every alpha cell reuses config.seed, so cells share initial lattices
    and proposal randomness and differ only through the bath term; the
    bootstrap uses its own derived stream. Requires an instance whose
    ground manifold has both a cluster and an isolated part.
    """
    partition = ground_state_partition(instance)
    if not partition.isolated or not partition.cluster:
        raise ValueError(
            "ratio experiment needs both cluster and isolated ground states; "
            f"found {len(partition.cluster)} cluster, "
            f"{len(partition.isolated)} isolated"
        )
    boot_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(1,))
    )
    estimates = []
    for alpha in alphas:
        cell = replace(config, alpha=float(alpha))
        result = anneal_ensemble(instance, cell, workers=workers)
        codes = _classify(result.states, partition)
        p_i, p_c, ratio = _ratio_from_codes(codes, partition)
        idx = boot_rng.integers(0, cell.runs, size=(bootstrap_resamples, cell.runs))
        resampled = np.array(
            [_ratio_from_codes(codes[row], partition)[2] for row in idx]
        )
        finite = resampled[np.isfinite(resampled)]
        if len(finite) < len(resampled):
            error = math.inf
        else:
            error = 2.0 * float(np.std(resampled))
        estimates.append(
            RatioEstimate(
                alpha=float(alpha),
                p_isolated=p_i,
                p_cluster=p_c,
                ratio=ratio,
                error_two_sigma=error,
                ground_state_rate=float(np.mean(codes != 0)),
                runs=cell.runs,
                diverged=not math.isfinite(ratio),
            )
        )
    return estimates


def write_ratio_table(path, estimates: Sequence[RatioEstimate],
                      metadata: Optional[dict] = None) -> None:
    """Columns: alpha, p_i, p_c, ratio, err_2sigma, gs_rate, runs."""
    from .storage import write_table

    meta = dict(metadata or {})
    write_table(
        path,
        {
            "alpha": [e.alpha for e in estimates],
            "p_i": [e.p_isolated for e in estimates],
            "p_c": [e.p_cluster for e in estimates],
            "ratio": [e.ratio for e in estimates],
            "err_2sigma": [e.error_two_sigma for e in estimates],
            "gs_rate": [e.ground_state_rate for e in estimates],
            "runs": [float(e.runs) for e in estimates],
        },
        meta,
    )
