"""Ground-truth propagation of i d(psi)/dt = H(t) psi for the two-level model.

Embedded Dormand-Prince 5(4) on the complex amplitude pair, with PI-free
standard step control.  This module is the oracle everything analytic is
checked against, so it deliberately integrates the first-order two-component
system straight from the Hamiltonian and shares no code with the
hypergeometric solution.

The stepper works on plain Python complex scalars (a 2-vector is too small
for numpy to pay off) and supports backward integration and exact passage
through requested output times in a single pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import ModelParams

__all__ = [
    "IntegrationSpec",
    "IntegratorError",
    "StepLimitError",
    "StepUnderflowError",
    "evolve",
    "evolve_dense",
    "propagator_numeric",
    "populations",
]


class IntegratorError(RuntimeError):
    pass


# Error control is per unit step: accepted steps satisfy
# ||local error|| <= tol * h / span, so the accumulated error over the whole
# interval stays at the tolerance itself rather than tolerance * step count.
# That is what lets a rel_tol = 1e-10 run keep the Hermitian norm drift below
# 1e-9 end to end.


class StepLimitError(IntegratorError):
    """max_steps exceeded before reaching the end of the interval."""


class StepUnderflowError(IntegratorError):
    """Required step shrank to the rounding floor (stiffness signal)."""


@dataclass(frozen=True)
class IntegrationSpec:
    """Interval and accuracy settings for one propagation."""

    t0: float
    t1: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise ValueError("integration endpoints must be finite")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (1e-14 <= v <= 1e-2):
                raise ValueError(f"{name} must lie in [1e-14, 1e-2], got {v!r}")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# b - bhat (5th-order value minus 4th-order estimate)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

Rhs = Callable[[float, complex, complex], tuple[complex, complex]]


def _error_norm(e1, e2, y1, y2, z1, z2, rtol, atol):
    s1 = atol + rtol * max(abs(y1), abs(z1))
    s2 = atol + rtol * max(abs(y2), abs(z2))
    return math.sqrt(0.5 * ((abs(e1) / s1) ** 2 + (abs(e2) / s2) ** 2))


def _initial_step(f: Rhs, t0, y1, y2, direction, span, rtol, atol):
    f1, f2 = f(t0, y1, y2)
    s1 = atol + rtol * abs(y1)
    s2 = atol + rtol * abs(y2)
    d0 = math.sqrt(0.5 * ((abs(y1) / s1) ** 2 + (abs(y2) / s2) ** 2))
    d1 = math.sqrt(0.5 * ((abs(f1) / s1) ** 2 + (abs(f2) / s2) ** 2))
    h0 = 1e-6 * span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    g1, g2 = f(t0 + direction * h0, y1 + direction * h0 * f1, y2 + direction * h0 * f2)
    d2 = (
        math.sqrt(0.5 * ((abs(g1 - f1) / s1) ** 2 + (abs(g2 - f2) / s2) ** 2)) / h0
    )
    dm = max(d1, d2)
    h1 = span / 100.0 if dm <= 1e-15 else (0.01 / dm) ** 0.2
    return min(100.0 * h0, h1, span), f1, f2


def _integrate(
    f: Rhs,
    t0: float,
    t1: float,
    y1: complex,
    y2: complex,
    rtol: float,
    atol: float,
    max_steps: int,
    checkpoints: Sequence[float] = (),
    sink=None,
):
    """Advance (y1, y2) from t0 to t1, stopping exactly at each checkpoint.

    Checkpoints must be sorted in the direction of integration and lie inside
    [t0, t1]; ``sink(t, y1, y2)`` is invoked at each one.
    """
    if t1 == t0:
        for tc in checkpoints:
            sink(tc, y1, y2)
        return y1, y2
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    stops = list(checkpoints) + [t1]
    istop = 0
    # skip checkpoints that coincide with the start
    while istop < len(stops) - 1 and stops[istop] == t0:
        sink(t0, y1, y2)
        istop += 1

    t = t0
    h, k11, k12 = _initial_step(f, t0, y1, y2, direction, span, rtol, atol)
    nsteps = 0
    while True:
        target = stops[istop]
        remaining = abs(target - t)
        hit = h >= remaining
        hstep = remaining if hit else h
        hd = direction * hstep

        # stages (k1 carried over: first-same-as-last)
        a1, a2 = k11, k12
        b1, b2 = f(t + _C2 * hd, y1 + hd * _A21 * a1, y2 + hd * _A21 * a2)
        c1, c2 = f(
            t + _C3 * hd,
            y1 + hd * (_A31 * a1 + _A32 * b1),
            y2 + hd * (_A31 * a2 + _A32 * b2),
        )
        d1, d2 = f(
            t + _C4 * hd,
            y1 + hd * (_A41 * a1 + _A42 * b1 + _A43 * c1),
            y2 + hd * (_A41 * a2 + _A42 * b2 + _A43 * c2),
        )
        e1_, e2_ = f(
            t + _C5 * hd,
            y1 + hd * (_A51 * a1 + _A52 * b1 + _A53 * c1 + _A54 * d1),
            y2 + hd * (_A51 * a2 + _A52 * b2 + _A53 * c2 + _A54 * d2),
        )
        g1, g2 = f(
            t + hd,
            y1 + hd * (_A61 * a1 + _A62 * b1 + _A63 * c1 + _A64 * d1 + _A65 * e1_),
            y2 + hd * (_A61 * a2 + _A62 * b2 + _A63 * c2 + _A64 * d2 + _A65 * e2_),
        )
        z1 = y1 + hd * (_B1 * a1 + _B3 * c1 + _B4 * d1 + _B5 * e1_ + _B6 * g1)
        z2 = y2 + hd * (_B1 * a2 + _B3 * c2 + _B4 * d2 + _B5 * e2_ + _B6 * g2)
        tnew = target if hit else t + hd
        k71, k72 = f(tnew, z1, z2)
        err1 = hd * (_E1 * a1 + _E3 * c1 + _E4 * d1 + _E5 * e1_ + _E6 * g1 + _E7 * k71)
        err2 = hd * (_E1 * a2 + _E3 * c2 + _E4 * d2 + _E5 * e2_ + _E6 * g2 + _E7 * k72)
        # per-unit-step normalisation (local error ~ h^5, so err ~ h^4 here)
        err = _error_norm(err1, err2, y1, y2, z1, z2, rtol, atol) * (span / hstep)

        nsteps += 1
        if nsteps > max_steps:
            raise StepLimitError(
                f"exceeded {max_steps} steps at t = {t} (interval {t0} -> {t1})"
            )

        if err <= 1.0:
            t, y1, y2 = tnew, z1, z2
            k11, k12 = k71, k72
            if hit:
                while istop < len(stops) - 1 and stops[istop] == t:
                    sink(t, y1, y2)
                    istop += 1
                if t == stops[-1] and istop == len(stops) - 1:
                    return y1, y2
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.25))
            h = min(hstep * factor, span)
        else:
            h = hstep * max(0.2, 0.9 * err ** -0.25)

        if h < 16.0 * math.ulp(max(abs(t), span)):
            raise StepUnderflowError(
                f"step size underflow at t = {t} (h = {h}); system looks stiff"
            )


def _tanh_rhs(p: ModelParams) -> Rhs:
    P, alpha, beta, kappa = p.P, p.alpha, p.beta, p.kappa
    half_th = complex(0.5 * p.kappa, 0.5 * p.delta)

    def f(t, y1, y2):
        half_xi = 0.5 * (P * math.tanh(alpha * t + beta) + kappa)
        return (
            -1j * (half_xi * y1 + half_th * y2),
            -1j * (half_th * y1 - half_xi * y2),
        )

    return f


def _as_state(psi0) -> tuple[complex, complex]:
    psi = np.asarray(psi0, dtype=complex).reshape(2)
    if not np.all(np.isfinite(psi.view(float))):
        raise ValueError("initial state must be finite")
    return complex(psi[0]), complex(psi[1])


def evolve(p: ModelParams, spec: IntegrationSpec, psi0) -> np.ndarray:
    """Propagate psi0 from spec.t0 to spec.t1 through the tanh model."""
    y1, y2 = _as_state(psi0)
    y1, y2 = _integrate(
        _tanh_rhs(p), spec.t0, spec.t1, y1, y2, spec.rel_tol, spec.abs_tol,
        spec.max_steps,
    )
    return np.array([y1, y2], dtype=complex)


def evolve_dense(p: ModelParams, spec: IntegrationSpec, ts, psi0) -> np.ndarray:
    """One integration pass recording the state at every time in ``ts``.

    ``ts`` must be monotone in the direction of integration and lie inside
    [t0, t1]; the stepper lands on each requested time exactly, so the
    recorded values carry the full step-wise error control.
    """
    ts = np.asarray(ts, dtype=float)
    direction = 1.0 if spec.t1 >= spec.t0 else -1.0
    ds = np.diff(ts) * direction
    if ts.size and (np.any(ds < 0)):
        raise ValueError("output times must be monotone in the integration direction")
    lo, hi = sorted((spec.t0, spec.t1))
    if ts.size and (ts.min() < lo or ts.max() > hi):
        raise ValueError("output times must lie inside [t0, t1]")
    out = np.empty((ts.size, 2), dtype=complex)
    idx = {"i": 0}

    def sink(t, y1, y2):
        i = idx["i"]
        out[i, 0] = y1
        out[i, 1] = y2
        idx["i"] = i + 1

    y1, y2 = _as_state(psi0)
    _integrate(
        _tanh_rhs(p), spec.t0, spec.t1, y1, y2, spec.rel_tol, spec.abs_tol,
        spec.max_steps, checkpoints=list(ts), sink=sink,
    )
    return out


def propagator_numeric(p: ModelParams, spec: IntegrationSpec) -> np.ndarray:
    """Numeric propagator U(t1, t0): columns are the evolved basis states."""
    col1 = evolve(p, spec, (1.0, 0.0))
    col2 = evolve(p, spec, (0.0, 1.0))
    return np.column_stack([col1, col2])


def populations(psi) -> tuple[float, float]:
    """Squared moduli (|psi1|^2, |psi2|^2); they may exceed 1 when delta > 0."""
    psi = np.asarray(psi, dtype=complex).reshape(2)
    return (
        float(psi[0].real**2 + psi[0].imag**2),
        float(psi[1].real**2 + psi[1].imag**2),
    )
