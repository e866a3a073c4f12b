"""Ohmic bath spectral functions: decay rates, Lamb shifts, regime diagnostics.

Conventions: hbar = 1, frequencies in GHz, times in ns (so omega * t is
dimensionless). The bath spectral-density model is Ohmic with exponential
cutoff at inverse temperature beta,

    gamma(omega) = 2 pi * coupling * omega * exp(-|omega|/cutoff)
                   / (1 - exp(-beta * omega)),

continuously extended by gamma(0) = 2 pi * coupling / beta. `coupling` is the
dimensionless product of the Ohmic friction and the squared system-bath
coupling. gamma satisfies detailed balance exactly:
gamma(-omega) = exp(-beta omega) * gamma(omega).

The Lamb shift is the principal-value transform

    S(omega) = PV integral dw' gamma(w') / (omega - w')

over the window |w'| <= 20 * cutoff (the integrand is exponentially small
beyond).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

__all__ = [
    "SpectralModel",
    "LambShiftTable",
    "CorrelationTime",
    "ValidityReport",
    "QuadratureError",
    "gamma",
    "lamb_shift",
    "build_lamb_table",
    "bath_correlation_time",
    "validity_report",
    "t1_energy",
    "t2_energy",
    "t2_computational",
]

# omega_c * beta below which the tau_B = beta/(2 pi) closed form is flagged:
# corrections are O(1/(omega_c beta)), ~10% at the threshold.
CUTOFF_PRODUCT_THRESHOLD = 10.0


class QuadratureError(RuntimeError):
    """Principal-value quadrature failed to converge; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual estimate {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SpectralModel:
    """Ohmic bath parameters.

    coupling: dimensionless system-bath strength (eta g^2 in the conventions
        above); must be >= 0 (0 = closed system).
    inv_temperature: beta in 1/GHz (= ns).
    cutoff: omega_c in GHz.
    """

    coupling: float
    inv_temperature: float
    cutoff: float

    def __post_init__(self):
        if self.coupling < 0:
            raise ValueError(f"coupling must be >= 0, got {self.coupling}")
        if self.inv_temperature <= 0:
            raise ValueError(
                f"inv_temperature must be > 0, got {self.inv_temperature}"
            )
        if self.cutoff <= 0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")


def gamma(model: SpectralModel, omega):
    """Bath decay rate gamma(omega); scalar in, scalar out, array in, array out.

    Stable for all omega: the omega -> 0 limit 2 pi coupling / beta is taken
    analytically, and large negative omega underflows cleanly to 0.
    """
    w = np.asarray(omega, dtype=float)
    c2pi = 2.0 * math.pi * model.coupling
    beta = model.inv_temperature
    with np.errstate(over="ignore", invalid="ignore"):
        den = -np.expm1(-beta * w)
        safe = np.where(w == 0.0, 1.0, den)
        out = np.where(
            w == 0.0,
            c2pi / beta,
            c2pi * w * np.exp(-np.abs(w) / model.cutoff) / safe,
        )
    if out.ndim == 0:
        return float(out)
    return out


def _pv_quad(model: SpectralModel, w: float, rel_tol: float):
    """PV integral of gamma(x)/(w - x) over |x| <= 20 cutoff.

    Returns (value, error_estimate). The integrand has a derivative kink at
    x = 0 (the |x| in the cutoff factor), so the pole window is kept clear of
    the origin and the outer pieces are split there. At w = 0 the kink sits on
    the pole and the antisymmetrized form is used instead.
    """
    window = 20.0 * model.cutoff
    if abs(w) > 0.9 * window:
        raise ValueError(
            f"frequency {w} outside the quadrature window (+-{window:.3g})"
        )
    g = lambda x: gamma(model, x)
    kw = dict(epsabs=1e-15, epsrel=rel_tol, limit=300)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            # S is continuous at 0; frequencies at roundoff scale take the
            # antisymmetrized branch to keep the pole window well-conditioned
            if abs(w) < 1e-12:
                val, err = quad(lambda x: (g(x) - g(-x)) / x, 0.0, window, **kw)
                return -val, err
            half = min(1.0, abs(w) / 2.0, (window - abs(w)) / 2.0)
            lo, hi = w - half, w + half
            tot, err = 0.0, 0.0
            # PV over the pole window; the subtracted-constant term integrates
            # to zero exactly on the symmetric window.
            v, e = quad(g, lo, hi, weight="cauchy", wvar=w, **kw)
            tot -= v
            err += e
            for a, b in ((-window, lo), (hi, window)):
                pts = [0.0] if a < 0.0 < b else None
                v, e = quad(lambda x: g(x) / (w - x), a, b, points=pts, **kw)
                tot += v
                err += e
            return tot, err
        except IntegrationWarning as exc:
            raise QuadratureError(f"Lamb shift quadrature at omega={w}: {exc}",
                                  residual=rel_tol) from exc


def lamb_shift(model: SpectralModel, omega: float, rel_tol: float = 1e-8,
               return_error: bool = False):
    """Lamb shift S(omega) by adaptive principal-value quadrature.

    With return_error=True, returns (value, error_bound) where error_bound is
    the summed quadrature residual estimate.
    """
    if model.coupling == 0.0:
        return (0.0, 0.0) if return_error else 0.0
    val, err = _pv_quad(model, float(omega), rel_tol)
    scale = max(abs(val), 2.0 * math.pi * model.coupling / model.inv_temperature)
    if err > max(1e-12 * scale, 100.0 * rel_tol * scale):
        raise QuadratureError(
            f"Lamb shift quadrature did not converge at omega={omega}", err
        )
    if return_error:
        return val, err
    return val


@dataclass(frozen=True)
class LambShiftTable:
    """Precomputed S(omega) on a frequency grid, for fast interpolation.

    grid: sampled frequencies in GHz, strictly increasing.
    values: S(omega) per grid frequency.
    quadrature_tol: relative tolerance the table was built with.
    """

    grid: np.ndarray
    values: np.ndarray
    quadrature_tol: float = 1e-8

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing with >= 2 points")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __call__(self, omega):
        """Linear interpolation; raises outside the tabulated range."""
        w = np.asarray(omega, dtype=float)
        if np.any(w < self.grid[0]) or np.any(w > self.grid[-1]):
            raise ValueError(
                f"frequency outside table range [{self.grid[0]}, {self.grid[-1]}]"
            )
        out = np.interp(w, self.grid, self.values)
        return float(out) if out.ndim == 0 else out

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("omega,S,tol\n")
            for w, s in zip(self.grid, self.values):
                fh.write(f"{float(w)!r},{float(s)!r},{float(self.quadrature_tol)!r}\n")

    @classmethod
    def from_csv(cls, path):
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        return cls(grid=data[:, 0], values=data[:, 1],
                   quadrature_tol=float(data[0, 2]))


def build_lamb_table(model: SpectralModel, omega_max: float,
                     points: int = 801, rel_tol: float = 1e-8) -> LambShiftTable:
    """Tabulate S on a symmetric grid [-omega_max, omega_max].

    S is linear in the coupling, so the table is computed once at unit
    coupling and scaled; repeated builds over a coupling sweep share the
    expensive quadrature via the cache below.
    """
    unit = _unit_lamb_values(model.inv_temperature, model.cutoff,
                             float(omega_max), int(points), float(rel_tol))
    return LambShiftTable(
        grid=np.linspace(-omega_max, omega_max, points),
        values=unit * model.coupling,
        quadrature_tol=rel_tol,
    )


_UNIT_TABLE_CACHE: dict = {}


def _unit_lamb_values(beta, cutoff, omega_max, points, rel_tol):
    key = (beta, cutoff, omega_max, points, rel_tol)
    if key not in _UNIT_TABLE_CACHE:
        unit_model = SpectralModel(1.0, beta, cutoff)
        grid = np.linspace(-omega_max, omega_max, points)
        _UNIT_TABLE_CACHE[key] = np.array(
            [_pv_quad(unit_model, w, rel_tol)[0] for w in grid]
        )
    return _UNIT_TABLE_CACHE[key]


class CorrelationTime(NamedTuple):
    value: float          # tau_B = beta / (2 pi), ns
    cutoff_product: float  # omega_c * beta
    valid: bool           # False when the closed form is outside its regime


def bath_correlation_time(model: SpectralModel) -> CorrelationTime:
    """Bath correlation time tau_B = beta/(2 pi).

    The closed form holds for cutoff * beta >> 1; the returned flag is False
    (and a warning is emitted) when cutoff * beta < 10.
    """
    product = model.cutoff * model.inv_temperature
    valid = product >= CUTOFF_PRODUCT_THRESHOLD
    if not valid:
        warnings.warn(
            f"cutoff * inv_temperature = {product:.3g} < "
            f"{CUTOFF_PRODUCT_THRESHOLD}; tau_B = beta/(2 pi) is unreliable",
            stacklevel=2,
        )
    return CorrelationTime(model.inv_temperature / (2.0 * math.pi), product, valid)


@dataclass(frozen=True)
class ValidityReport:
    """Dimensionless ratios for the three master-equation validity conditions.

    Each ratio must be << 1 for the weak-coupling adiabatic master equation to
    be trustworthy; the pass flags use ratio < 1. The drive-side ratio is
    max(adiabatic, bath_slowness): the drive rate h/t_f must be small against
    both the squared gap and the squared inverse bath correlation time.
    """

    weak_coupling: float   # gamma(Delta_min) / Delta_min
    markov: float          # sqrt(gamma(Delta_min) * tau_B)
    adiabatic: float       # h / (t_f * Delta_min^2)
    bath_slowness: float   # h * tau_B^2 / t_f
    tau_b: float

    @property
    def slow_drive(self) -> float:
        return max(self.adiabatic, self.bath_slowness)

    @property
    def weak_coupling_ok(self) -> bool:
        return self.weak_coupling < 1.0

    @property
    def markov_ok(self) -> bool:
        return self.markov < 1.0

    @property
    def slow_drive_ok(self) -> bool:
        return self.slow_drive < 1.0

    @property
    def bath_ok(self) -> bool:
        """t_f-independent conditions (coupling weak, bath memory short)."""
        return self.weak_coupling_ok and self.markov_ok

    @property
    def ok(self) -> bool:
        return self.bath_ok and self.slow_drive_ok

    def ratios(self) -> dict:
        return {
            "weak_coupling": self.weak_coupling,
            "markov": self.markov,
            "slow_drive": self.slow_drive,
        }


def validity_report(model: SpectralModel, t_f: float, delta_min: float,
                    drive_scale: float) -> ValidityReport:
    """Evaluate the validity ratios at minimum gap delta_min and drive scale h.

    drive_scale is the largest matrix element of the s-derivative of the
    Hamiltonian between instantaneous eigenstates. The effective squared
    coupling is inferred from the rate itself, g^2 = gamma(delta_min)/tau_B,
    which only uses quantities the model exposes.
    """
    if t_f <= 0 or delta_min <= 0 or drive_scale <= 0:
        raise ValueError("t_f, delta_min, and drive_scale must all be positive")
    tau_b = model.inv_temperature / (2.0 * math.pi)
    g_at_gap = gamma(model, delta_min)
    return ValidityReport(
        weak_coupling=g_at_gap / delta_min,
        markov=math.sqrt(g_at_gap * tau_b),
        adiabatic=drive_scale / (t_f * delta_min**2),
        bath_slowness=drive_scale * tau_b**2 / t_f,
        tau_b=tau_b,
    )


def t1_energy(model: SpectralModel, gap: float) -> float:
    """Relaxation time between energy eigenstates split by `gap`.

    1/T1 = gamma(gap) * (1 + exp(-beta gap)): excitation plus decay rates for
    a two-level system coupled through a purely off-diagonal operator.
    """
    if gap <= 0:
        raise ValueError("gap must be positive")
    return 1.0 / (gamma(model, gap) * (1.0 + math.exp(-model.inv_temperature * gap)))


def t2_energy(model: SpectralModel, gap: float) -> float:
    """Energy-basis dephasing time; T2 = 2 T1 for off-diagonal coupling."""
    return 2.0 * t1_energy(model, gap)


def t2_computational(model: SpectralModel) -> float:
    """Computational-basis dephasing time 1/(2 gamma(0)) for sigma^z coupling."""
    if model.coupling == 0.0:
        return math.inf
    return model.inv_temperature / (4.0 * math.pi * model.coupling)
