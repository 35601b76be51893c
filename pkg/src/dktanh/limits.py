"""Closed-form limiting models of the tanh sweep: Rabi and Landau-Zener.

Short times freeze the detuning at its crossing value kappa, giving a
constant-Hamiltonian (Rabi) problem; expanding tanh to first order instead
gives the linear-sweep (Landau-Zener) problem, solved by Weber parabolic
cylinder functions of imaginary order.  Both solvers are independent of the
hypergeometric machinery and of the numeric integrator, which makes them
useful cross-checks; ``tanh_to_*_consistency`` quantify how well they shadow
the full model on a stated window.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .integrator import IntegrationSpec, _integrate, _tanh_rhs, populations
from .model import ModelParams, coupling
from .specfun import pcf_d

__all__ = [
    "DegenerateSlopeError",
    "IllConditionedError",
    "RabiSetup",
    "LZSetup",
    "ConsistencyReport",
    "rabi_setup",
    "rabi_amplitudes",
    "rabi_probabilities",
    "lz_setup",
    "lz_variable",
    "lz_amplitudes",
    "lz_probabilities",
    "linear_model_evolve",
    "tanh_to_lz_consistency",
    "tanh_to_rabi_consistency",
]

_EXP_IPI4 = cmath.exp(0.25j * math.pi)


class DegenerateSlopeError(ValueError):
    """Linear-sweep slope alpha*P is not positive."""


class IllConditionedError(ArithmeticError):
    """The initial-condition system for the D-function pair is numerically
    singular."""


class RabiSetup(NamedTuple):
    detuning: float  # frozen detuning, = kappa
    theta: complex  # coupling i*delta + kappa
    frequency: complex  # generalized frequency sqrt(detuning^2 + theta^2)


class LZSetup(NamedTuple):
    slope: float  # alpha * P
    lam: complex  # control parameter theta^2 / (4 * slope)
    crossing_time: float  # -kappa / slope, where the linear detuning vanishes


def rabi_setup(p: ModelParams) -> RabiSetup:
    th = coupling(p)
    freq = cmath.sqrt(p.kappa * p.kappa + th * th)
    return RabiSetup(p.kappa, th, freq)


def rabi_amplitudes(t: float, p: ModelParams) -> tuple[complex, complex]:
    """Constant-detuning amplitudes from (1, 0) at t = 0.

    c1 = cos(w t/2) - i (kappa/w) sin(w t/2), c2 = -i (theta/w) sin(w t/2)
    with the complex generalized frequency w; the removable w = 0 point is
    filled by the series limit sin(w t/2)/w -> t/2.
    """
    k, th, w = rabi_setup(p)
    half_t = 0.5 * float(t)
    if w == 0:
        s = complex(half_t)
        cosw = 1.0 + 0j
    else:
        s = cmath.sin(w * half_t) / w
        cosw = cmath.cos(w * half_t)
    return cosw - 1j * k * s, -1j * th * s


def rabi_probabilities(t: float, p: ModelParams) -> tuple[float, float]:
    """(|c1|^2, |c2|^2) of the constant-detuning evolution; beta is ignored
    (the short-time regime sits at the sweep midpoint)."""
    c1, c2 = rabi_amplitudes(t, p)
    return (
        c1.real**2 + c1.imag**2,
        c2.real**2 + c2.imag**2,
    )


def lz_setup(p: ModelParams, *, raw_lambda: bool = False) -> LZSetup:
    """Linear-sweep data: slope alpha*P, control parameter, crossing time.

    The control parameter defaults to theta^2/(4*alpha*P), the value for
    which the D-function pair solves the linear-sweep equation (verified
    against the integrator).  ``raw_lambda=True`` selects the unnormalised
    variant theta^2/alpha instead, kept as a documented alternative.
    """
    slope = p.alpha * p.P
    if slope <= 0.0:
        raise DegenerateSlopeError(f"alpha*P must be positive, got {slope!r}")
    th = coupling(p)
    lam = th * th / (p.alpha if raw_lambda else 4.0 * slope)
    return LZSetup(slope, lam, -p.kappa / slope)


def lz_variable(t: float, p: ModelParams) -> complex:
    """Rotated sweep coordinate z = sqrt(alpha P) (t - t_c) e^{i pi/4}; it
    vanishes at the crossing time t_c where the linear detuning is zero."""
    setup = lz_setup(p)
    return math.sqrt(setup.slope) * (float(t) - setup.crossing_time) * _EXP_IPI4


def _lz_rows(t: float, p: ModelParams, nu: complex, q: complex) -> np.ndarray:
    z = lz_variable(t, p)
    return np.array(
        [
            [pcf_d(nu, z), pcf_d(nu, -z)],
            [q * pcf_d(nu - 1, z), -q * pcf_d(nu - 1, -z)],
        ],
        dtype=complex,
    )


def lz_amplitudes(
    t: float, t0: float, p: ModelParams, *, raw_lambda: bool = False
) -> tuple[complex, complex]:
    """Linear-sweep amplitudes (C1, C2) with (C1, C2)(t0) = (1, 0).

    The amplitude-1 solutions are D_nu(+/-z) with nu = -i*lam; the paired
    amplitude-2 solutions follow from the first-order system as
    +/- q D_{nu-1}(+/-z) with q = theta e^{i pi/4} / (2 sqrt(alpha P)).
    """
    setup = lz_setup(p, raw_lambda=raw_lambda)
    th = coupling(p)
    if th == 0:
        # decoupled: amplitude 1 only picks up the dynamical phase
        tau = float(t) - setup.crossing_time
        tau0 = float(t0) - setup.crossing_time
        return cmath.exp(-0.25j * setup.slope * (tau * tau - tau0 * tau0)), 0j
    nu = -1j * setup.lam
    q = th * _EXP_IPI4 / (2.0 * math.sqrt(setup.slope))
    m0 = _lz_rows(t0, p, nu, q)
    if np.linalg.cond(m0) > 1e12:
        raise IllConditionedError(
            f"initial-condition system at t0 = {t0} is numerically singular"
        )
    coeffs = np.linalg.solve(m0, np.array([1.0, 0.0], dtype=complex))
    c1, c2 = _lz_rows(t, p, nu, q) @ coeffs
    return complex(c1), complex(c2)


def lz_probabilities(
    t: float, t0: float, p: ModelParams, *, raw_lambda: bool = False
) -> tuple[float, float]:
    """(survival, transition) = (|C1|^2, |C2|^2); the pair sums to 1 (to
    rounding) only in the lossless delta = 0 case."""
    c1, c2 = lz_amplitudes(t, t0, p, raw_lambda=raw_lambda)
    return (
        c1.real**2 + c1.imag**2,
        c2.real**2 + c2.imag**2,
    )


def _linear_rhs(p: ModelParams):
    slope, kappa = p.alpha * p.P, p.kappa
    half_th = complex(0.5 * p.kappa, 0.5 * p.delta)

    def f(t, y1, y2):
        half_xi = 0.5 * (slope * t + kappa)
        return (
            -1j * (half_xi * y1 + half_th * y2),
            -1j * (half_th * y1 - half_xi * y2),
        )

    return f


def linear_model_evolve(p: ModelParams, spec: IntegrationSpec, psi0) -> np.ndarray:
    """Numeric propagation of the linear-sweep model (detuning alpha*P*t +
    kappa); the ground-truth partner for the D-function amplitudes."""
    psi = np.asarray(psi0, dtype=complex).reshape(2)
    y1, y2 = _integrate(
        _linear_rhs(p), spec.t0, spec.t1, complex(psi[0]), complex(psi[1]),
        spec.rel_tol, spec.abs_tol, spec.max_steps,
    )
    return np.array([y1, y2], dtype=complex)


@dataclass(frozen=True)
class ConsistencyReport:
    """Deviation of a limiting model from the full tanh dynamics."""

    max_deviation: float  # sup over grid and both populations
    linearization_bound: float  # max |tanh(u) - u| over the compared window
    window: tuple[float, float]
    n_points: int


def _tanh_populations(p: ModelParams, t0: float, ts: np.ndarray) -> np.ndarray:
    out = np.empty((ts.size, 2))
    state = {"i": 0}

    def sink(t, y1, y2):
        out[state["i"]] = populations((y1, y2))
        state["i"] += 1

    _integrate(
        _tanh_rhs(p), t0, float(ts[-1]), 1.0 + 0j, 0j, 1e-11, 1e-11, 1_000_000,
        checkpoints=list(ts), sink=sink,
    )
    return out


def _linearization_bound(p: ModelParams, window: float) -> float:
    u = p.alpha * window + abs(p.beta)
    return u - math.tanh(u)


def tanh_to_lz_consistency(
    p: ModelParams, window: float, n_points: int = 81
) -> ConsistencyReport:
    """Compare full-model populations against the linear-sweep closed form on
    t in [-window, window], starting both from state 1 at -window.

    A nonzero sweep phase acts as a pure time translation of the linear
    model: P tanh(alpha t + beta) + kappa ~ alpha P (t + beta/alpha) + kappa
    (the coupling is untouched, so the shift must not fold into kappa).
    """
    ts = np.linspace(-window, window, n_points)
    full = _tanh_populations(p, -window, ts)
    shift = p.beta / p.alpha
    p_lin = replace(p, beta=0.0)
    lz = np.array(
        [lz_probabilities(t + shift, -window + shift, p_lin) for t in ts]
    )
    return ConsistencyReport(
        float(np.max(np.abs(full - lz))),
        _linearization_bound(p, window),
        (-window, window),
        n_points,
    )


def tanh_to_rabi_consistency(
    p: ModelParams, window: float, n_points: int = 81
) -> ConsistencyReport:
    """Compare full-model populations against the frozen-detuning closed form
    on t in [-window, window] (constant H, so the closed form translates to a
    start at -window)."""
    ts = np.linspace(-window, window, n_points)
    full = _tanh_populations(p, -window, ts)
    rabi = np.array([rabi_probabilities(t + window, p) for t in ts])
    return ConsistencyReport(
        float(np.max(np.abs(full - rabi))),
        _linearization_bound(p, window),
        (-window, window),
        n_points,
    )
