"""End-to-end acceptance suite: one test per advertised capability.

Each test prints a single pass/FAIL line (written straight to the real
stderr so it is visible live under pytest capture) with the measured
numbers and elapsed time, then asserts every claimed threshold. Tests are
numbered by increasing cost; all model/bath constants are the package-wide
reference point (omega_x = omega_z = 1, coupling 1e-4, temperature 2.23,
cutoff 8*pi) unless a test sweeps them.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from annealsim.dynamics import (
    IntegratorOptions,
    analytic_static_dephasing,
    analytic_static_scl,
    analytic_static_wcl,
    evolve_closed_qubit,
    evolve_scl_qubit,
    evolve_wcl_qubit,
    gibbs_ground_population,
    optimal_tf_vs_coupling,
    sweep_tf,
)
from annealsim.hamiltonians import (
    EigenBasis,
    IsingInstance,
    PAULI_X,
    PAULI_Z,
    Schedule,
    SingleQubitModel,
    adiabatic_parameter,
    quantum_signature_instance,
    site_operator,
)
from annealsim.multiqubit_analysis import (
    degeneracy_audit,
    ground_depopulation_rate,
    pairwise_dephasing_rate,
    population_rate_matrix,
)
from annealsim.scl_generator import (
    SclModel,
    apply_scl_dissipator,
    independent_dephasing_rate,
)
from annealsim.spectral_bath import SpectralModel, gamma, t1_energy, t2_computational
from annealsim.sqa_eb import QmcConfig, pi_pc_experiment
from annealsim.wcl_generator import CouplingSet, apply_dissipator, build_snapshot

MODEL = SingleQubitModel(1.0, 1.0)
BATH = SpectralModel(coupling=1e-4, inv_temperature=1.0 / 2.23, cutoff=8 * math.pi)

COUPLING_DOUBLING = tuple(6.390253038871435e-05 * 2**m for m in range(10))
ALPHA_GRID = (0.0, 1e-4, 3e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2)


def _report(name: str, clauses, elapsed: float) -> None:
    """One pass/FAIL line per acceptance test, printed to the real stderr."""
    ok = all(passed for _, passed in clauses)
    failed = [label for label, passed in clauses if not passed]
    verdict = "pass" if ok else f"FAIL ({'; '.join(failed)})"
    print(f"ACCEPT {name}: {verdict} [{elapsed:.1f}s]", file=sys.__stderr__,
          flush=True)
    assert ok, f"{name}: failing clauses: {failed}"


def _constant_liouvillian(h_total, dissipate):
    """Vectorize d rho/dt = -i[h, rho] + D(rho) for time-independent h."""
    d = h_total.shape[0]
    G = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        unit = np.zeros((d, d), dtype=complex)
        unit[divmod(col, d)] = 1.0
        G[:, col] = (
            -1j * (h_total @ unit - unit @ h_total) + dissipate(unit)
        ).ravel()
    return G


def _integrate_constant(G, rho0, times):
    sol = solve_ivp(
        lambda t, y: G @ y,
        (0.0, times[-1]),
        rho0.ravel().astype(complex),
        t_eval=times,
        method="DOP853",
        rtol=1e-10,
        atol=1e-13,
    )
    assert sol.success
    d = rho0.shape[0]
    return sol.y.T.reshape(len(times), d, d)


def _wcl_liouvillian(h, couplings):
    vals, vecs = np.linalg.eigh(h)
    snap = build_snapshot(EigenBasis(vals, vecs), couplings)
    h_total = h
    if snap.lamb_shift is not None:
        h_total = h + vecs @ snap.lamb_shift @ vecs.conj().T
    return _constant_liouvillian(
        h_total, lambda rho: apply_dissipator(snap, rho, basis="computational")
    )


def _numeric_min_gap(model: SingleQubitModel) -> float:
    def gap(s):
        energies = np.linalg.eigvalsh(model.hamiltonian(s))
        return float(energies[1] - energies[0])

    coarse = np.linspace(0.0, 1.0, 201)
    best = min(coarse, key=gap)
    result = minimize_scalar(
        gap, bounds=(max(0.0, best - 0.01), min(1.0, best + 0.01)),
        method="bounded", options={"xatol": 1e-12},
    )
    return float(result.fun)


def _random_instance(rng, n):
    return IsingInstance(
        n=n,
        fields=tuple(rng.normal(size=n)),
        couplings=tuple(
            (i, j, float(rng.normal())) for i in range(n) for j in range(i + 1, n)
        ),
    )


def _z_couplings(n, **kwargs):
    ops = [site_operator(PAULI_Z, i, n) for i in range(n)]
    return CouplingSet(ops, BATH, **kwargs)


RHO0 = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])


def test_01_static_closed_forms_match_integrated_trajectories():
    """Time-independent problems: integration vs closed-form solutions.

    Three regimes, each compared at max-entry error 1e-6 over five decay
    times with the integration itself finishing under one second.
    """
    clauses = []
    budgets = []

    # longitudinal field, longitudinal coupling: pure dephasing
    G = _wcl_liouvillian(-0.5 * PAULI_Z, CouplingSet([PAULI_Z], BATH))
    times = np.linspace(0.0, 5.0 * t2_computational(BATH), 8)
    t0 = time.perf_counter()
    states = _integrate_constant(G, RHO0, times)
    budgets.append(time.perf_counter() - t0)
    err = max(
        np.max(np.abs(r - analytic_static_dephasing(1.0, BATH, RHO0, t)))
        for t, r in zip(times, states)
    )
    clauses.append((f"dephasing err {err:.1e}", err < 1e-6))

    # transverse field, longitudinal coupling: eigenbasis relaxation
    G = _wcl_liouvillian(-0.5 * PAULI_X, CouplingSet([PAULI_Z], BATH))
    t1 = t1_energy(BATH, 1.0)
    times = np.linspace(0.0, 5.0 * t1, 8)
    t0 = time.perf_counter()
    states = _integrate_constant(G, RHO0, times)
    budgets.append(time.perf_counter() - t0)
    err = max(
        np.max(np.abs(r - analytic_static_wcl(1.0, BATH, RHO0, t)))
        for t, r in zip(times, states)
    )
    clauses.append((f"relaxation err {err:.1e}", err < 1e-6))

    # closed-form structure: coherence lifetime is twice the relaxation time
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    out = analytic_static_wcl(1.0, BATH, RHO0, 2.0 * t1, include_lamb_shift=False)
    c_ratio = abs(plus.conj() @ out @ minus) / abs(plus.conj() @ RHO0 @ minus)
    t2_dev = abs(c_ratio - math.exp(-1.0))
    clauses.append((f"T2=2T1 dev {t2_dev:.1e}", t2_dev < 1e-12))

    # closed-form structure: populations land on the Gibbs weights
    late = analytic_static_wcl(1.0, BATH, RHO0, 50.0 * t1)
    p_plus = (plus.conj() @ late @ plus).real
    gibbs_dev = abs(p_plus - gibbs_ground_population(BATH, 1.0))
    clauses.append((f"Gibbs asymptote dev {gibbs_dev:.1e}", gibbs_dev < 1e-12))

    # transverse field, computational-basis dephasing
    scl = SclModel(CouplingSet([PAULI_Z], BATH))
    G = _constant_liouvillian(
        -0.5 * PAULI_X + scl.lamb_shift_0,
        lambda rho: apply_scl_dissipator(scl, rho),
    )
    t2c = t2_computational(BATH)
    times = np.linspace(0.0, 5.0 * t2c, 8)
    t0 = time.perf_counter()
    states = _integrate_constant(G, RHO0, times)
    budgets.append(time.perf_counter() - t0)
    err = max(
        np.max(np.abs(r - analytic_static_scl(1.0, BATH, RHO0, t)))
        for t, r in zip(times, states)
    )
    clauses.append((f"computational dephasing err {err:.1e}", err < 1e-6))

    # half-life identity rho_01(T2c) = 1/2 e^{-1} starting from |+>
    plus_state = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    coh = analytic_static_scl(1.0, BATH, plus_state, t2c)[0, 1].real
    half_dev = abs(coh - 0.5 * math.exp(-1.0))
    clauses.append((f"coherence half-life dev {half_dev:.1e}", half_dev < 1e-12))

    worst = max(budgets)
    clauses.append((f"slowest integration {worst:.2f}s", worst < 1.0))
    _report("static-closed-forms", clauses, sum(budgets))


def test_02_oscillation_damping_and_thermal_recovery():
    """Fast anneal: bath damps the nonadiabatic oscillations; slow anneal:
    the population dips into the thermal dip and relaxation recovers it,
    more strongly the longer the anneal."""
    t0 = time.perf_counter()
    opts = IntegratorOptions(grid_points=401)
    closed_opts = IntegratorOptions(rtol=1e-12, atol=1e-14, grid_points=401)
    tf_osc = 10.0 * math.sqrt(2.0)

    closed = evolve_closed_qubit(MODEL, tf_osc, options=closed_opts)
    open_tr = evolve_wcl_qubit(MODEL, BATH, tf_osc, options=opts)
    tail = closed.s >= 0.6
    amp_closed = float(np.ptp(closed.ground_population[tail]))
    amp_open = float(np.ptp(open_tr.ground_population[tail]))

    slow = evolve_wcl_qubit(MODEL, BATH, 5e3, options=opts)
    slower = evolve_wcl_qubit(MODEL, BATH, 5e4, options=opts)
    rec_slow = slow.final_population - float(slow.ground_population.min())
    rec_slower = slower.final_population - float(slower.ground_population.min())

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"damped amplitude {amp_open:.6f} < {amp_closed:.6f}",
         amp_open < amp_closed),
        (f"dip present (min {slow.ground_population.min():.4f} < final "
         f"{slow.final_population:.4f})", rec_slow > 0.0),
        (f"recovery grows {rec_slower:.5f} > {rec_slow:.5f}",
         rec_slower > rec_slow),
        (f"runtime {elapsed:.0f}s < 300s", elapsed < 300.0),
    ]
    _report("damping-and-recovery", clauses, elapsed)


def test_03_optimal_anneal_time_peak_and_gibbs_plateau():
    """Final population vs total time: a unique interior maximum at an
    adiabatic parameter of order ten, then decay onto the equilibrium
    plateau, which matches the independent Gibbs value to 1e-3."""
    t0 = time.perf_counter()
    sweep = sweep_tf(MODEL, BATH, np.logspace(0.0, 4.0, 17), mode="wcl",
                     refine=True, workers=4)
    finals = sweep.final_population
    peak_idx = int(np.argmax(finals))
    unique_max = (
        0 < peak_idx < len(finals) - 1
        and bool(np.all(np.diff(finals[: peak_idx + 1]) > 0))
        and bool(np.all(finals[peak_idx + 1:] < finals[peak_idx]))
    )
    param = (adiabatic_parameter(MODEL, sweep.optimal_tf)
             if sweep.optimal_tf is not None else float("nan"))
    plateau = evolve_wcl_qubit(MODEL, BATH, 2e9).final_population
    plateau_dev = abs(plateau - sweep.gibbs_population)

    elapsed = time.perf_counter() - t0
    clauses = [
        ("unique interior maximum", unique_max),
        (f"optimum exists (t_f {sweep.optimal_tf})",
         sweep.optimal_tf is not None),
        (f"peak population {sweep.optimal_population:.5f} > 0.95",
         sweep.optimal_population > 0.95),
        (f"adiabatic parameter {param:.2f} in [3, 15]", 3.0 <= param <= 15.0),
        (f"plateau dev {plateau_dev:.2e} < 1e-3", plateau_dev < 1e-3),
        (f"runtime {elapsed:.0f}s < 900s", elapsed < 900.0),
    ]
    _report("population-peak-and-plateau", clauses, elapsed)


def test_04_optimal_time_trend_across_coupling_strengths():
    """Doubling the system-bath coupling: the optimal-time adiabatic
    parameter shrinks monotonically but never below one, and at the
    strongest coupling no anneal time beats the Gibbs plateau."""
    t0 = time.perf_counter()
    span_min = COUPLING_DOUBLING[0] / (BATH.cutoff * BATH.inv_temperature)
    result = optimal_tf_vs_coupling(MODEL, BATH, COUPLING_DOUBLING,
                                    np.logspace(0.0, 6.0, 25), workers=4)
    params = [p for p in result.adiabatic_parameter if not np.isnan(p)]
    have = len(params)
    monotone = all(b <= a + 1e-9 for a, b in zip(params, params[1:]))
    strongest_has_none = bool(np.isnan(result.optimal_tf[-1]))
    gibbs_dev = abs(result.optimal_population[-1] - result.gibbs_population)

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"grid spans down to {span_min:.3g} in coupling/(cutoff*beta)",
         abs(span_min - 5.67e-6) < 1e-9),
        (f"{have} optima found before trend ends", 1 <= have < 10),
        (f"parameters monotone non-increasing "
         f"({params[0]:.3f} -> {params[-1]:.3f})", monotone),
        ("parameter never below 1", all(p >= 1.0 for p in params)),
        ("no optimum at the strongest coupling", strongest_has_none),
        (f"strongest-coupling max matches plateau to {gibbs_dev:.2e} < 2e-3",
         gibbs_dev < 2e-3),
        (f"runtime {elapsed:.0f}s < 1800s", elapsed < 1800.0),
    ]
    _report("coupling-sweep-trend", clauses, elapsed)


def test_05_computational_dephasing_population_thresholds():
    """Computational-basis dephasing anneals: still near-adiabatic at
    t_f = 1e2, visibly degraded at 1e3, fully depolarized at 1e4."""
    t0 = time.perf_counter()
    p_fast = evolve_scl_qubit(MODEL, BATH, 1e2).final_population
    p_mid = evolve_scl_qubit(MODEL, BATH, 1e3).final_population
    p_slow = evolve_scl_qubit(MODEL, BATH, 1e4).final_population

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"t_f=1e2 population {p_fast:.6f} > 0.95", p_fast > 0.95),
        (f"t_f=1e3 population {p_mid:.6f} < 0.9", p_mid < 0.9),
        (f"t_f=1e4 population {p_slow:.6f} within 1e-2 of 1/2",
         abs(p_slow - 0.5) < 1e-2),
        (f"runtime {elapsed:.0f}s < 120s", elapsed < 120.0),
    ]
    _report("dephasing-anneal-thresholds", clauses, elapsed)


def test_06_boundary_cancellation_error_hierarchy():
    """Schedules with vanishing endpoint derivatives: each extra order cuts
    the closed-system error by decades at fixed t_f; with a bath the
    ordering survives but the relative gain collapses. The minimum gap is
    schedule-independent."""
    t0 = time.perf_counter()
    t_f = 120.0
    closed_err, open_err = [], []
    for k in (0, 1, 2):
        model_k = SingleQubitModel(1.0, 1.0, Schedule("beta", k))
        closed_err.append(1.0 - evolve_closed_qubit(model_k, t_f).final_population)
        open_err.append(1.0 - evolve_wcl_qubit(model_k, BATH, t_f).final_population)
    closed_drop = all(b < a for a, b in zip(closed_err, closed_err[1:]))
    open_drop = all(b < a for a, b in zip(open_err, open_err[1:]))
    rel_closed = (closed_err[0] - closed_err[2]) / closed_err[0]
    rel_open = (open_err[0] - open_err[2]) / open_err[0]

    gaps = [
        _numeric_min_gap(SingleQubitModel(1.0, 1.0, Schedule("beta", k)))
        for k in (0, 1, 2, 5, 10)
    ]
    gap_spread = float(np.ptp(gaps))

    elapsed = time.perf_counter() - t0
    clauses = [
        ("closed errors strictly decrease "
         + " > ".join(f"{e:.2e}" for e in closed_err), closed_drop),
        ("open errors strictly decrease "
         + " > ".join(f"{e:.2e}" for e in open_err), open_drop),
        (f"relative gain shrinks with bath ({rel_open:.4f} < {rel_closed:.4f})",
         rel_open < rel_closed),
        (f"min gap spread across orders {gap_spread:.1e} < 1e-8",
         gap_spread < 1e-8),
        (f"runtime {elapsed:.0f}s < 600s", elapsed < 600.0),
    ]
    _report("boundary-cancellation", clauses, elapsed)


def test_07_eigenbasis_generator_property_suite():
    """Fifty random non-degenerate 2-3 qubit instances: population/coherence
    block decoupling, closed-form pair rates vs full-generator decay,
    zero-frequency-rate independence of depopulation, Gibbs stationarity."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    s_point = 0.43
    count = 0
    worst_block = worst_fit = worst_gibbs = 0.0
    r0_identical = True
    while count < 50:
        n = 2 + (count % 2)
        instance = _random_instance(rng, n)
        vals, vecs = np.linalg.eigh(instance.hamiltonian(s_point))
        basis = EigenBasis(vals, vecs)
        if not degeneracy_audit(basis).passed:
            continue
        count += 1
        d = 2**n

        # (i) vectorized dissipator leaves populations and coherences in
        # autonomous blocks
        snap = build_snapshot(basis, _z_couplings(n, include_lamb_shift=False),
                              s=s_point)
        g = _constant_liouvillian(np.zeros((d, d)),
                                  lambda rho: apply_dissipator(snap, rho))
        diag_idx = [a * d + a for a in range(d)]
        off_idx = [a * d + b for a in range(d) for b in range(d) if a != b]
        worst_block = max(
            worst_block,
            float(np.max(np.abs(g[np.ix_(diag_idx, off_idx)]))),
            float(np.max(np.abs(g[np.ix_(off_idx, diag_idx)]))),
        )

        # (ii) closed-form pair rate vs decay of the exact propagator
        couplings = _z_couplings(n)
        a, b = 0, d - 1
        rate = pairwise_dephasing_rate(basis, couplings, a, b)
        G = _wcl_liouvillian(instance.hamiltonian(s_point), couplings)
        rho0 = vecs @ np.full((d, d), 1.0 / d, dtype=complex) @ vecs.conj().T
        t_end = 0.25 / rate
        rho_end = (expm(G * t_end) @ rho0.ravel()).reshape(d, d)
        coh0 = abs(vecs[:, a].conj() @ rho0 @ vecs[:, b])
        coh1 = abs(vecs[:, a].conj() @ rho_end @ vecs[:, b])
        fitted = -math.log(coh1 / coh0) / t_end
        worst_fit = max(worst_fit, abs(fitted - rate) / rate)

        # (iii) ground depopulation never touches the zero-frequency rate
        norm = float(np.max(np.abs(vals)))

        def boosted(omega, _norm=norm):
            if abs(omega) < 1e-9 * _norm:
                return 1.5 * gamma(BATH, 0.0)
            return gamma(BATH, omega)

        r0 = ground_depopulation_rate(basis, couplings)
        r0_boost = ground_depopulation_rate(
            basis, _z_couplings(n, rate_fn=boosted)
        )
        r0_identical = r0_identical and (r0 == r0_boost)

        # (iv) the population rate matrix keeps the Gibbs state stationary
        rates = population_rate_matrix(basis, couplings)
        gibbs = np.exp(-BATH.inv_temperature * (vals - vals[0]))
        gibbs /= gibbs.sum()
        worst_gibbs = max(worst_gibbs, float(np.max(np.abs(rates @ gibbs))))

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"block decoupling {worst_block:.1e} < 1e-10", worst_block < 1e-10),
        (f"pair-rate fit {worst_fit:.1e} < 1e-4 relative", worst_fit < 1e-4),
        ("depopulation bit-identical under zero-frequency boost", r0_identical),
        (f"Gibbs stationarity {worst_gibbs:.1e} < 1e-8", worst_gibbs < 1e-8),
        (f"runtime {elapsed:.0f}s < 600s", elapsed < 600.0),
    ]
    _report("eigenbasis-generator-properties", clauses, elapsed)


def test_08_computational_dephasing_rate_formulas():
    """Exhaustive bit-mismatch rate check on two and three qubits, plus
    decoherence-free fixed-weight blocks under collective coupling."""
    t0 = time.perf_counter()
    t2c = t2_computational(BATH)
    worst_rel = 0.0
    for n in (2, 3):
        d = 2**n
        model = SclModel(_z_couplings(n))
        psi = np.ones(d) + 0.1 * np.exp(1j * np.arange(d))
        psi /= np.linalg.norm(psi)
        rho0 = np.outer(psi, psi.conj())
        t_end = 0.3 * t2c
        G = _constant_liouvillian(
            np.zeros((d, d)), lambda rho: apply_scl_dissipator(model, rho)
        )
        rho = _integrate_constant(G, rho0, np.array([0.0, t_end]))[-1]
        for a in range(d):
            for b in range(d):
                if a == b:
                    continue
                fitted = -math.log(abs(rho[a, b]) / abs(rho0[a, b])) / t_end
                expected = independent_dephasing_rate(a, b, n, t2c)
                worst_rel = max(worst_rel, abs(fitted - expected)
                                / max(expected, 1e-12))

    worst_dfs = 0.0
    rng = np.random.default_rng(7)
    for n in (2, 3):
        collective = SclModel(_z_couplings(n), decoherence_mode="collective")
        for weight in range(n + 1):
            states = [i for i in range(2**n) if bin(i).count("1") == weight]
            block = rng.normal(size=(len(states), len(states)))
            block = block @ block.T
            rho = np.zeros((2**n, 2**n), dtype=complex)
            for i, a in enumerate(states):
                for j, b in enumerate(states):
                    rho[a, b] = block[i, j] / np.trace(block)
            worst_dfs = max(
                worst_dfs,
                float(np.max(np.abs(apply_scl_dissipator(collective, rho)))),
            )

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"entrywise rates match to {worst_rel:.1e} < 1e-6 relative",
         worst_rel < 1e-6),
        (f"fixed-weight blocks decoherence-free to {worst_dfs:.1e} < 1e-12",
         worst_dfs < 1e-12),
        (f"runtime {elapsed:.0f}s < 120s", elapsed < 120.0),
    ]
    _report("computational-rate-formulas", clauses, elapsed)


def test_09_bath_assisted_ground_state_statistics():
    """Bath-integrated path-integral Monte Carlo at desk scale (1e4 runs,
    beta 10, 64 slices): the isolated/cluster ratio starts below one
    without a bath, crosses or saturates at one as the bath strengthens,
    and is non-monotone at short anneals; ground-state hits dominate
    everywhere; the reference instance has a 17-fold ground manifold."""
    t0 = time.perf_counter()
    instance = quantum_signature_instance()
    degeneracy = len(instance.ground_states())

    base = dict(beta=10.0, n_tau=64, runs=10000, seed=1234)
    est_500 = pi_pc_experiment(instance, QmcConfig(sweeps=500, **base),
                               ALPHA_GRID, workers=8)
    est_100 = pi_pc_experiment(instance, QmcConfig(sweeps=100, **base),
                               ALPHA_GRID, workers=8)

    # no bath, long anneal: the isolated state is strongly suppressed
    zero = est_500[0]
    below_margin = 1.0 - zero.ratio - 1.5 * zero.error_two_sigma  # 3 sigma

    # bath on: the ratio reaches one (crosses it, or saturates onto it)
    crosses = any(e.ratio >= 1.0 for e in est_500[1:])
    last = est_500[-1]
    saturates = abs(last.ratio - 1.0) <= last.error_two_sigma

    # short anneals: interior maximum above both endpoints by two sigma
    ratios_100 = [e.ratio for e in est_100]
    sigmas_100 = [e.error_two_sigma / 2.0 for e in est_100]
    m = int(np.argmax(ratios_100[1:-1])) + 1
    margins = []
    for endpoint in (0, len(ratios_100) - 1):
        diff = ratios_100[m] - ratios_100[endpoint]
        comb = math.hypot(sigmas_100[m], sigmas_100[endpoint])
        margins.append(diff - 2.0 * comb)
    nonmonotone = all(margin > 0 for margin in margins)

    gs_min = min(e.ground_state_rate for e in list(est_500) + list(est_100))

    elapsed = time.perf_counter() - t0
    clauses = [
        (f"ground degeneracy {degeneracy} == 17", degeneracy == 17),
        (f"no-bath ratio {zero.ratio:.3f} below 1 by 3 sigma "
         f"(margin {below_margin:.3f})", below_margin > 0),
        (f"ratio reaches 1 (max {max(e.ratio for e in est_500):.2f})",
         crosses or saturates),
        (f"short-anneal interior max {ratios_100[m]:.2f} at alpha "
         f"{ALPHA_GRID[m]:g} beats endpoints {ratios_100[0]:.2f}/"
         f"{ratios_100[-1]:.2f} by 2 sigma", nonmonotone),
        (f"ground-state rate {gs_min:.3f} > 0.9 everywhere", gs_min > 0.9),
        (f"runtime {elapsed:.0f}s < 3600s", elapsed < 3600.0),
    ]
    _report("bath-assisted-statistics", clauses, elapsed)


def test_10_qualitative_reproduction_scope():
    """The quantitative sweeps above are matched through the stated
    inequality and tolerance criteria; no exact curve digitization is
    claimed, because integrator step-size policy and Monte Carlo proposal
    details behind the reference data are unspecified."""
    here = sys.modules[__name__]
    quantitative = [
        "test_02_oscillation_damping_and_thermal_recovery",
        "test_03_optimal_anneal_time_peak_and_gibbs_plateau",
        "test_04_optimal_time_trend_across_coupling_strengths",
        "test_05_computational_dephasing_population_thresholds",
        "test_06_boundary_cancellation_error_hierarchy",
        "test_09_bath_assisted_ground_state_statistics",
    ]
    present = [hasattr(here, name) for name in quantitative]
    clauses = [
        ("every figure-level check runs in this suite", all(present)),
    ]
    _report("qualitative-scope", clauses, 0.0)
