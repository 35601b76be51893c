"""Two-level tanh-sweep model: parameters, Hamiltonian, complex spectrum, zones.

The Hamiltonian is the symmetric traceless matrix

    H(t) = 1/2 * [[xi(t), theta], [theta, -xi(t)]]

with detuning xi(t) = P*tanh(alpha*t + beta) + kappa and constant coupling
theta = 1j*delta + kappa.  A nonzero ``delta`` (spontaneous-emission channel)
makes H non-Hermitian, so eigenvalues are complex and the state norm is not
conserved.  Everything in this module is a cheap pure function; array inputs
for ``t`` broadcast in the scalar helpers that support them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModelParams",
    "EnergyPair",
    "PolarEnergy",
    "Zone",
    "ZoneLabel",
    "detuning",
    "coupling",
    "hamiltonian",
    "eigenenergies",
    "energy_polar",
    "classify_zone",
    "asymptotic_window",
]

DEFAULT_GAP_THRESHOLD = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the swept two-level system.

    P      : detuning amplitude (angular frequency)
    alpha  : sweep rate, must be positive (1/time)
    beta   : dimensionless sweep phase
    kappa  : shift, enters both the detuning offset and the real part of the
             coupling (angular frequency)
    delta  : imaginary coupling magnitude; delta > 0 switches on loss
             (angular frequency)
    """

    P: float
    alpha: float
    beta: float = 0.0
    kappa: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("P", "alpha", "beta", "kappa", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"ModelParams.{name} must be finite, got {v!r}")
        if self.alpha <= 0.0:
            raise ValueError(f"sweep rate alpha must be positive, got {self.alpha!r}")


class EnergyPair(NamedTuple):
    e_plus: complex
    e_minus: complex


class PolarEnergy(NamedTuple):
    modulus: float
    phi: float
    re_e: float
    im_e: float


class Zone(str, Enum):
    ALLOWED = "allowed"
    FORBIDDEN = "forbidden"


class ZoneLabel(NamedTuple):
    label: Zone
    gap: float


def detuning(t, p: ModelParams):
    """Instantaneous detuning P*tanh(alpha*t + beta) + kappa.

    Monotone nondecreasing in t (for P >= 0) with range [kappa-P, kappa+P],
    crossing kappa at t = -beta/alpha.  Accepts scalar or ndarray ``t``.
    """
    return p.P * np.tanh(p.alpha * np.asarray(t, dtype=float) + p.beta) + p.kappa


def coupling(p: ModelParams) -> complex:
    """Constant off-diagonal element theta = 1j*delta + kappa."""
    return complex(p.kappa, p.delta)


def hamiltonian(t: float, p: ModelParams) -> np.ndarray:
    """2x2 Hamiltonian at time t.  Exactly traceless and symmetric; Hermitian
    iff delta == 0."""
    xi = float(detuning(t, p))
    th = coupling(p)
    return 0.5 * np.array([[xi, th], [th, -xi]], dtype=complex)


def _discriminant(xi: float, p: ModelParams) -> complex:
    # xi^2 + theta^2, written so Im = 2*kappa*delta exactly (no roundoff from
    # squaring the complex coupling).
    re = xi * xi + p.kappa * p.kappa - p.delta * p.delta
    im = 2.0 * p.kappa * p.delta
    return complex(re, im)


def _principal_root(z: complex) -> complex:
    # Principal square root, normalised so Re >= 0 with ties broken toward
    # Im >= 0 (guards against a negative-zero imaginary part flipping the
    # branch on the negative real axis).
    if z == 0:
        return 0j
    r = np.sqrt(complex(z.real, z.imag if z.imag != 0.0 else 0.0))
    if r.real < 0.0 or (r.real == 0.0 and r.imag < 0.0):
        r = -r
    return complex(r)


def eigenenergies(t: float, p: ModelParams) -> EnergyPair:
    """Eigenvalues +/- sqrt(xi^2 + theta^2)/2 of the Hamiltonian.

    e_plus is the branch with Re >= 0 (ties: Im >= 0), so 2*Re(e_plus) is the
    real spectral gap.
    """
    xi = float(detuning(t, p))
    ep = 0.5 * _principal_root(_discriminant(xi, p))
    return EnergyPair(ep, -ep)


def energy_polar(t: float, p: ModelParams) -> PolarEnergy:
    """Polar decomposition of e_plus.

    With Z = xi^2 + kappa^2 - delta^2 + 2j*kappa*delta this returns
    (|Z|^(1/2), arg(Z)/2, Re e_plus, Im e_plus); the half-angle phi satisfies
    tan(2*phi) = 2*kappa*delta / (xi^2 + kappa^2 - delta^2) away from the
    branch axis.  At the exceptional point Z = 0 the convention is phi = 0.
    """
    xi = float(detuning(t, p))
    z = _discriminant(xi, p)
    if z == 0:
        return PolarEnergy(0.0, 0.0, 0.0, 0.0)
    im = z.imag if z.imag != 0.0 else 0.0
    modulus = math.sqrt(abs(z))
    phi = 0.5 * math.atan2(im, z.real)
    return PolarEnergy(
        modulus,
        phi,
        0.5 * modulus * math.cos(phi),
        0.5 * modulus * math.sin(phi),
    )


def classify_zone(
    t: float, p: ModelParams, gap_threshold: float = DEFAULT_GAP_THRESHOLD
) -> ZoneLabel:
    """Label (t, p) as Allowed/Forbidden from the real spectral gap.

    Forbidden means the gap 2*|Re e_plus| is below ``gap_threshold``, which for
    exact arithmetic is the region where Z is real and <= 0, i.e. kappa*delta
    = 0 and xi^2 + kappa^2 <= delta^2.
    """
    if gap_threshold <= 0.0:
        raise ValueError("gap_threshold must be positive")
    ep = eigenenergies(t, p).e_plus
    gap = 2.0 * abs(ep.real)
    label = Zone.FORBIDDEN if gap < gap_threshold else Zone.ALLOWED
    return ZoneLabel(label, gap)


def asymptotic_window(p: ModelParams) -> tuple[float, float]:
    """Finite stand-in for t = -/+ infinity.

    Returns (-T, T) with T = 10*(1+|beta|)/alpha; beyond it the sweep
    argument satisfies |alpha*t + beta| >= 10, where tanh is saturated to 1
    within 5e-9 (2e^-20 at the edge).
    """
    half = 10.0 * (1.0 + abs(p.beta)) / p.alpha
    return (-half, half)
