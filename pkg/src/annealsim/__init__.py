"""Open-system adiabatic quantum computation simulator.

Two adiabatic master equations (decoherence in the instantaneous energy
eigenbasis vs. the computational basis), analytic single-qubit solutions,
multi-qubit decoherence-rate formulas, and a path-integral Monte Carlo
annealer with an explicit Ohmic bath, plus a batch CLI for the bundled
experiments.
"""

__version__ = "0.1.0"
