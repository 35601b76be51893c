"""Self-verification corpus: every closed form against its independent oracle.

``run_verify`` executes the dual-route checks (closed-form spectrum vs direct
eigendecomposition, hypergeometric propagator vs adaptive integration on the
figure presets, Rabi and linear-crossing limits vs their reference
integrations) and reports one row per case.  The random spectral corpus is
seeded, so a fixed seed reproduces the output byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .integrator import IntegrationSpec, evolve, populations
from .limits import linear_model_evolve, lz_probabilities, lz_setup, rabi_probabilities
from .model import ModelParams
from .scan import run_compare

__all__ = ["VerifyCase", "eigen_deviation", "run_verify", "write_verify_csv"]


@dataclass(frozen=True)
class VerifyCase:
    name: str
    max_deviation: float
    bar: float
    passed: bool


def eigen_deviation(n_draws: int, seed: int) -> float:
    """Max |closed-form eigenvalue - direct eigendecomposition| over a random
    parameter/time corpus (|P|, |kappa|, |delta| <= 100, |t| <= 50)."""
    rng = np.random.default_rng(seed)
    P = rng.uniform(-100, 100, n_draws)
    kappa = rng.uniform(-100, 100, n_draws)
    delta = rng.uniform(-100, 100, n_draws)
    alpha = rng.uniform(0.2, 5.0, n_draws)
    beta = rng.uniform(-5.0, 5.0, n_draws)
    t = rng.uniform(-50, 50, n_draws)

    xi = P * np.tanh(alpha * t + beta) + kappa
    theta = kappa + 1j * delta
    e = 0.5 * np.sqrt(xi**2 + theta**2 + 0j)
    flip = (e.real < 0) | ((e.real == 0) & (e.imag < 0))
    e = np.where(flip, -e, e)

    H = np.empty((n_draws, 2, 2), dtype=complex)
    H[:, 0, 0] = 0.5 * xi
    H[:, 0, 1] = 0.5 * theta
    H[:, 1, 0] = 0.5 * theta
    H[:, 1, 1] = -0.5 * xi
    lam = np.linalg.eigvals(H)
    d = np.minimum(np.abs(lam - e[:, None]), np.abs(lam + e[:, None]))
    return float(d.max())


def _closed_form_deviation(kind: str, p: ModelParams, window, n: int) -> float:
    """Worst scaled deviation of a limiting-model closed form from its own
    reference integration over a time grid."""
    t0, t1 = window
    ts = np.linspace(t0, t1, n)
    worst = 0.0
    for t in ts:
        if kind == "rabi":
            closed = rabi_probabilities(t - t0, p)
            ref = (
                populations(evolve(p, IntegrationSpec(t0, t, 1e-11, 1e-11), (1, 0)))
                if t != t0
                else (1.0, 0.0)
            )
        else:
            closed = lz_probabilities(t, t0, p)
            ref = (
                populations(
                    linear_model_evolve(p, IntegrationSpec(t0, t, 1e-11, 1e-11), (1, 0))
                )
                if t != t0
                else (1.0, 0.0)
            )
        worst = max(
            worst,
            max(
                abs(closed[k] - ref[k]) / max(1.0, abs(ref[k]))
                for k in (0, 1)
            ),
        )
    return worst


def run_verify(quick: bool = False, seed: int = 0) -> list[VerifyCase]:
    cases: list[VerifyCase] = []

    n_draws = 2000 if quick else 10_000
    eig_dev = eigen_deviation(n_draws, seed)
    cases.append(VerifyCase("eigenvalues-random", eig_dev, 1e-12, eig_dev < 1e-12))

    n_pts = 60 if quick else 200
    compare_points = [
        ("fig2-delta0", ModelParams(8, 1, 0, 5, 0.0), (-10.0, 10.0)),
        ("fig2-delta1", ModelParams(8, 1, 0, 5, 1.0), (-10.0, 10.0)),
    ]
    if not quick:
        compare_points += [
            ("fig3-delta0", ModelParams(8, 1, 0, 10, 0.0), (-10.0, 10.0)),
            ("fig3-delta1", ModelParams(8, 1, 0, 10, 1.0), (-10.0, 10.0)),
            ("fig4-delta0", ModelParams(8, 1, 7, 5, 0.0), (-80.0, 80.0)),
            ("fig4-delta1", ModelParams(8, 1, 7, 5, 1.0), (-80.0, 80.0)),
        ]
    for name, p, window in compare_points:
        report = run_compare(p, window, n=n_pts, bar=1e-6)
        cases.append(VerifyCase(name, report.max_deviation, 1e-6, report.passed))

    n_rabi = 41 if quick else 81
    for delta in (0.0, 0.3):
        p = ModelParams(0.0, 1.0, 0.0, 0.3, delta)
        dev = _closed_form_deviation("rabi", p, (0.0, 40.0), n_rabi)
        cases.append(VerifyCase(f"rabi-delta{delta:g}", dev, 1e-8, dev < 1e-8))

    n_lz = 30 if quick else 60
    p = ModelParams(4.0, 1.0, 0.0, 0.3, 0.3)
    s = lz_setup(p)
    half = 8.0 / np.sqrt(s.slope)
    dev = _closed_form_deviation(
        "lz", p, (s.crossing_time - half, s.crossing_time + half), n_lz
    )
    cases.append(VerifyCase("lz-fig8", dev, 1e-5, dev < 1e-5))
    return cases


def write_verify_csv(path, cases: list[VerifyCase]) -> Path:
    path = Path(path)
    lines = ["case,max_deviation,bar,passed"]
    for c in cases:
        lines.append(f"{c.name},{c.max_deviation:.12e},{c.bar:.12e},{int(c.passed)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
