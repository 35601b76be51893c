"""Exact propagator of the tanh-sweep model via Gauss hypergeometric functions.

Outline of the construction.  The gauge-transformed first amplitude obeys a
second-order equation that the variable change x(t) = (1 + tanh(alpha t +
beta))/2 maps onto the hypergeometric equation.  Two Frobenius branches give
two independent solutions R1, T1 for amplitude 1; the first-order system then
fixes the matching amplitude-2 solutions as

    R2 = (i/c) x(1-x) dR1/dx,      T2 = (i/c) x(1-x) dT1/dx,

with c = theta/(4 alpha).  The propagator between x0 and x is the
fundamental-matrix ratio M(x) M(x0)^{-1} times the scalar gauge factor
exp(chi*ln(x/x0) + sigma_hat*ln((1-x)/(1-x0))), and its determinant is
identically 1.  All complex powers are principal (x and 1-x are positive).

The decoupled case theta = 0 is handled in closed form.  All other parameter
degeneracies reduce to the hypergeometric c-parameter ``gamma`` landing on an
integer; ``hyper_params`` rejects those within 1e-9 so callers can perturb.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .specfun import hyp2f1

__all__ = [
    "DegenerateParameterError",
    "HyperParams",
    "BasisSolutions",
    "x_of_t",
    "hyper_params",
    "basis_solutions",
    "analytic_propagator",
    "transition_probabilities",
]

X_CLAMP = 1e-15


class DegenerateParameterError(ValueError):
    """Hypergeometric parameters sit (numerically) on a degenerate set."""


@dataclass(frozen=True)
class HyperParams:
    """Derived complex data of the hypergeometric reduction.

    mu and nu are the branch-1 indicial exponents at x = 0 and x = 1, chosen
    so that both vanish in the decoupled limit c -> 0; chi and sigma_hat are
    the gauge exponents, with chi + sigma_hat = i*P/(2*alpha) and
    sigma_hat - chi = i*kappa/(2*alpha).
    """

    a: complex
    b: complex
    c: complex
    mu: complex
    nu: complex
    rho: complex
    omega: complex
    gamma: complex
    chi: complex
    sigma_hat: complex


@dataclass(frozen=True)
class BasisSolutions:
    """Values of the two basis solution pairs at one point x."""

    r1: complex
    t1: complex
    r2: complex
    t2: complex


def _aligned_sqrt(w: complex, ref: complex) -> complex:
    """Square root of w on the branch aligned with ref (Re(conj(ref)*s) >= 0).

    With ref equal to the sum of the two indicial roots this makes the
    "minus" root (ref - s)/2 the one that vanishes as the product of roots
    goes to zero.  Falls back to the principal branch when ref = 0.
    """
    s = cmath.sqrt(w)
    if ref == 0:
        return s
    d = (ref.conjugate() * s).real
    if d < 0.0 or (d == 0.0 and (ref.conjugate() * s).imag < 0.0):
        return -s
    return s


def _log_x_parts(u: float) -> tuple[float, float]:
    # log x and log(1-x) for x = 1/(1 + exp(-2u)), full relative accuracy at
    # both saturated ends
    if u >= 0.0:
        lx = -math.log1p(math.exp(-2.0 * u))
        return lx, -2.0 * u + lx
    lomx = -math.log1p(math.exp(2.0 * u))
    return 2.0 * u + lomx, lomx


def x_of_t(t: float, p: ModelParams) -> float:
    """Sweep variable x = (1 + tanh(alpha t + beta))/2, clamped away from the
    endpoints to [1e-15, 1 - 1e-15]."""
    lx, _ = _log_x_parts(p.alpha * float(t) + p.beta)
    return min(max(math.exp(lx), X_CLAMP), 1.0 - X_CLAMP)


def hyper_params(p: ModelParams) -> HyperParams:
    """Map model parameters to the hypergeometric data.

    Raises DegenerateParameterError when gamma is within 1e-9 of an integer:
    nonpositive integers and integers >= 2 are series poles of one basis
    branch, and gamma = 1 collapses the two branches (zero Wronskian).
    Callers that must proceed can perturb delta by ~1e-9.
    """
    ia = 1j / (2.0 * p.alpha)
    a = 1.0 + ia * (p.P - p.kappa)
    b = 2.0 * (1.0 + ia * p.P)
    c = complex(p.kappa, p.delta) / (4.0 * p.alpha)

    s_mu = _aligned_sqrt((1.0 - a) ** 2 - 4.0 * c * c, 1.0 - a)
    mu = 0.5 * ((1.0 - a) - s_mu)
    s_nu = _aligned_sqrt((1.0 + a - b) ** 2 - 4.0 * c * c, 1.0 + a - b)
    nu = 0.5 * ((1.0 + a - b) - s_nu)

    rho = mu + nu
    omega = mu + nu + b - 1.0
    gamma = 2.0 * mu + a
    if abs(gamma - round(gamma.real)) < 1e-9:
        raise DegenerateParameterError(
            f"hypergeometric index gamma = {gamma} is within 1e-9 of an integer; "
            "perturb the model parameters (e.g. delta += 1e-9)"
        )
    chi = 0.5j * (p.P - p.kappa) / (2.0 * p.alpha)
    sigma_hat = 0.5j * (p.P + p.kappa) / (2.0 * p.alpha)
    return HyperParams(a, b, c, mu, nu, rho, omega, gamma, chi, sigma_hat)


def basis_solutions(
    x: float, hp: HyperParams, *, one_minus_x: float | None = None
) -> BasisSolutions:
    """Evaluate both basis solution pairs at x in (0, 1).

    ``one_minus_x`` may carry a higher-accuracy value of 1-x near the
    saturated end of the sweep.
    """
    if one_minus_x is None:
        one_minus_x = 1.0 - x
    if not (0.0 < x < 1.0) or not (0.0 < one_minus_x < 1.0):
        raise ValueError(f"x must lie strictly inside (0, 1), got {x!r}")
    return _basis_from_logs(math.log(x), math.log(one_minus_x), hp)


# floor for log(x), log(1-x): keeps exp() away from a hard underflow to zero
# at absurdly saturated sweep arguments while changing nothing physical
_LOG_FLOOR = -700.0


# scans re-evaluate the same expansion point for every output time, so a
# small memo on the pure evaluation halves the cost of dense maps
@functools.lru_cache(maxsize=1024)
def _basis_from_logs(lx: float, lomx: float, hp: HyperParams) -> BasisSolutions:
    lx = max(lx, _LOG_FLOOR)
    lomx = max(lomx, _LOG_FLOOR)
    # x may round to exactly 1.0 deep in saturation; the hypergeometric
    # evaluation then runs entirely off the accurate 1-x value
    x = math.exp(lx)
    one_minus_x = math.exp(lomx)
    mu, nu, rho, om, ga, c = hp.mu, hp.nu, hp.rho, hp.omega, hp.gamma, hp.c
    mub = 1.0 + mu - ga  # second indicial root at x = 0
    ic = 1j / c  # = 4j*alpha/theta, the amplitude-2 prefactor

    f1 = hyp2f1(rho, om, ga, x, one_minus_z=one_minus_x)
    f1p = hyp2f1(rho + 1, om + 1, ga + 1, x, one_minus_z=one_minus_x)
    f2 = hyp2f1(rho - ga + 1, om - ga + 1, 2 - ga, x, one_minus_z=one_minus_x)
    f2p = hyp2f1(rho - ga + 2, om - ga + 2, 3 - ga, x, one_minus_z=one_minus_x)

    w_r = cmath.exp(mu * lx + nu * lomx)
    w_t = cmath.exp(mub * lx + nu * lomx)
    xox = x * one_minus_x
    r1 = w_r * f1
    r2 = ic * w_r * ((mu * one_minus_x - nu * x) * f1 + xox * (rho * om / ga) * f1p)
    t1 = w_t * f2
    t2 = ic * w_t * (
        (mub * one_minus_x - nu * x) * f2
        + xox * ((rho - ga + 1) * (om - ga + 1) / (2 - ga)) * f2p
    )
    return BasisSolutions(r1, t1, r2, t2)


def _gauge(hp: HyperParams, lx, lomx, lx0, lomx0) -> complex:
    return cmath.exp(hp.chi * (lx - lx0) + hp.sigma_hat * (lomx - lomx0))


def analytic_propagator(
    t: float, t0: float, p: ModelParams, hp: HyperParams | None = None
) -> np.ndarray:
    """Exact evolution matrix U(t, t0) of the tanh model.

    U(t0, t0) = I; composition U(t2, t0) = U(t2, t1) U(t1, t0) and det U = 1
    hold by construction.  ``hp`` may be passed to amortise the parameter map
    over many evaluations.
    """
    u = p.alpha * float(t) + p.beta
    u0 = p.alpha * float(t0) + p.beta
    lx, lomx = _log_x_parts(u)
    lx0, lomx0 = _log_x_parts(u0)

    if p.kappa == 0.0 and p.delta == 0.0:
        # decoupled: diagonal phase evolution only
        chi = 0.25j * p.P / p.alpha
        g = cmath.exp(chi * (lx - lx0) + chi * (lomx - lomx0))
        return np.array([[g, 0.0], [0.0, 1.0 / g]], dtype=complex)

    if hp is None:
        hp = hyper_params(p)
    bx = _basis_from_logs(lx, lomx, hp)
    b0 = _basis_from_logs(lx0, lomx0, hp)
    g = _gauge(hp, lx, lomx, lx0, lomx0)

    det0 = b0.r1 * b0.t2 - b0.t1 * b0.r2
    u11 = g * (bx.r1 * b0.t2 - bx.t1 * b0.r2) / det0
    u12 = g * (bx.t1 * b0.r1 - bx.r1 * b0.t1) / det0
    u21 = g * (bx.r2 * b0.t2 - bx.t2 * b0.r2) / det0
    u22 = g * (bx.t2 * b0.r1 - bx.r2 * b0.t1) / det0
    return np.array([[u11, u12], [u21, u22]], dtype=complex)


def transition_probabilities(U: np.ndarray) -> tuple[float, float]:
    """(survival, transition) = (|U22|^2, |U12|^2) for a start in state 2.

    The two sum to 1 exactly when U is unitary (delta = 0); with loss present
    either can exceed 1.
    """
    U = np.asarray(U, dtype=complex)
    u22 = complex(U[1, 1])
    u12 = complex(U[0, 1])
    return (
        u22.real**2 + u22.imag**2,
        u12.real**2 + u12.imag**2,
    )
