"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
go by.  Deviations between growing (lossy) populations are scaled by
max(1, |reference|), i.e. absolute for order-one observables and relative
once the loss channel blows the norm up.
"""

import json
import math
import time

import numpy as np
import pytest

from dktanh.cli import main as cli_main
from dktanh.integrator import IntegrationSpec, evolve, evolve_dense, populations
from dktanh.limits import (
    linear_model_evolve,
    lz_probabilities,
    lz_setup,
    rabi_probabilities,
    tanh_to_lz_consistency,
    tanh_to_rabi_consistency,
)
from dktanh.model import ModelParams, Zone, classify_zone, detuning
from dktanh.propagator import analytic_propagator, hyper_params, transition_probabilities
from dktanh.scan import AxisSpec, run_compare, run_energy_map, run_param_scan
from dktanh.specfun import cgamma, hyp2f1, hyp2f1_derivative, pcf_d
from dktanh.verify import eigen_deviation

FIG2 = {0.0: ModelParams(8, 1, 0, 5, 0.0), 1.0: ModelParams(8, 1, 0, 5, 1.0)}
FIG3 = {0.0: ModelParams(8, 1, 0, 10, 0.0), 1.0: ModelParams(8, 1, 0, 10, 1.0)}
FIG4 = {0.0: ModelParams(8, 1, 7, 5, 0.0), 1.0: ModelParams(8, 1, 7, 5, 1.0)}


def report(criterion, detail, value, bar, elapsed, budget):
    ok = value < bar and elapsed < budget
    print(
        f"criterion {criterion:>2} [{'PASS' if ok else 'FAIL'}] {detail}: "
        f"max deviation {value:.3e} (bar {bar:.0e}), {elapsed:.2f}s "
        f"(budget {budget:.0f}s)"
    )
    assert value < bar
    assert elapsed < budget


def test_criterion_01_eigenvalues_vs_direct_diagonalisation():
    start = time.perf_counter()
    dev = eigen_deviation(10_000, seed=20260808)
    report(1, "closed-form spectrum vs eigendecomposition (1e4 draws)",
           dev, 1e-12, time.perf_counter() - start, 1.0)


def test_criterion_02_hermitian_norm_conservation():
    start = time.perf_counter()
    spec = IntegrationSpec(-10, 10, 1e-10, 1e-10)
    ts = np.linspace(-10, 10, 201)
    states = evolve_dense(FIG2[0.0], spec, ts, (1, 0))
    norms = np.abs(states[:, 0]) ** 2 + np.abs(states[:, 1]) ** 2
    drift = float(np.max(np.abs(norms - 1.0)))
    report(2, "norm drift, lossless sweep at rel_tol 1e-10",
           drift, 1e-9, time.perf_counter() - start, 1.0)


def test_criterion_03_analytic_vs_numeric_figure_presets():
    start = time.perf_counter()
    worst = 0.0
    for presets, window in ((FIG2, (-10, 10)), (FIG3, (-10, 10)), (FIG4, (-80, 80))):
        for p in presets.values():
            rep = run_compare(p, window, n=200, bar=1e-6)
            worst = max(worst, rep.max_deviation)
    report(3, "population sup-deviation on figure presets (delta in {0,1})",
           worst, 1e-6, time.perf_counter() - start, 30.0)


def test_criterion_04_lossless_unitarity_of_analytic_propagator():
    start = time.perf_counter()
    p = FIG2[0.0]
    hp = hyper_params(p)
    worst = 0.0
    for t in np.linspace(-10, 10, 200):
        ps, pt = transition_probabilities(analytic_propagator(t, -10.0, p, hp))
        worst = max(worst, abs(ps + pt - 1.0))
    report(4, "|survival + transition - 1| on the lossless preset grid",
           worst, 1e-8, time.perf_counter() - start, 5.0)


def test_criterion_05_special_function_identity_suite():
    start = time.perf_counter()
    worst_closed = 0.0
    for z in np.linspace(0.02, 0.9, 89):
        worst_closed = max(worst_closed, abs(hyp2f1(1, 2, 2, z) - 1 / (1 - z)))
        worst_closed = max(worst_closed, abs(hyp2f1(1, 1, 2, z) + math.log(1 - z) / z))
    assert worst_closed < 1e-10

    hp = hyper_params(FIG2[1.0])
    rho, om, ga = hp.rho, hp.omega, hp.gamma
    worst_wronskian = 0.0
    for x in (0.1, 0.3, 0.5, 0.7, 0.9):
        u1 = hyp2f1(rho, om, ga, x)
        du1 = hyp2f1_derivative(rho, om, ga, x)
        u2 = x ** complex(1 - ga) * hyp2f1(rho - ga + 1, om - ga + 1, 2 - ga, x)
        du2 = (1 - ga) * x ** complex(-ga) * hyp2f1(
            rho - ga + 1, om - ga + 1, 1 - ga, x
        )
        closed = (1 - ga) * x ** complex(-ga) * (1 - x) ** complex(ga - rho - om - 1)
        worst_wronskian = max(worst_wronskian, abs(u1 * du2 - u2 * du1 - closed) / abs(closed))
    assert worst_wronskian < 1e-8

    rng = np.random.default_rng(5)
    worst_rec = worst_refl = 0.0
    for _ in range(200):
        z = complex(rng.uniform(-5, 5), rng.uniform(-10, 10))
        if abs(z - round(z.real)) < 0.05 or abs((1 - z) - round(1 - z.real)) < 0.05:
            continue
        g1 = cgamma(z + 1)
        worst_rec = max(worst_rec, abs(g1 - z * cgamma(z)) / abs(g1))
        refl = cgamma(z) * cgamma(1 - z) * np.sin(np.pi * z) / np.pi
        worst_refl = max(worst_refl, abs(refl - 1.0))
    assert worst_rec < 1e-12
    assert worst_refl < 1e-11

    worst_pcf = 0.0
    for _ in range(60):
        while True:
            nu = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if abs(nu) <= 5:
                break
        while True:
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if abs(z) <= 5:
                break
        up = pcf_d(nu + 1, z)
        mid = z * pcf_d(nu, z)
        down = nu * pcf_d(nu - 1, z)
        scale = max(abs(up), abs(mid), abs(down), 1e-30)
        worst_pcf = max(worst_pcf, abs(up - mid + down) / scale)
    assert worst_pcf < 1e-9

    worst = max(
        worst_closed / 1e-10, worst_wronskian / 1e-8, worst_rec / 1e-12,
        worst_refl / 1e-11, worst_pcf / 1e-9,
    )
    report(5, "hypergeometric/gamma/Weber identity suite (bar-normalised)",
           worst, 1.0, time.perf_counter() - start, 5.0)


def test_criterion_06_rabi_limit():
    start = time.perf_counter()
    worst = 0.0
    ts = np.linspace(0, 40, 81)
    for delta in (0.0, 0.3):
        p = ModelParams(0.0, 1.0, 0.0, 0.3, delta)
        states = evolve_dense(p, IntegrationSpec(0, 40, 1e-12, 1e-12), ts, (1, 0))
        for t, psi in zip(ts, states):
            closed = rabi_probabilities(t, p)
            ref = populations(psi)
            worst = max(
                worst,
                *(abs(closed[k] - ref[k]) / max(1.0, ref[k]) for k in (0, 1)),
            )
    report(6, "constant-detuning closed form vs integrator (delta in {0, 0.3})",
           worst, 1e-8, time.perf_counter() - start, 2.0)


def test_criterion_07_landau_zener_limit():
    start = time.perf_counter()
    p = ModelParams(4.0, 1.0, 0.0, 0.3, 0.3)
    s = lz_setup(p)
    half = 8.0 / math.sqrt(s.slope)
    t0 = s.crossing_time - half
    worst = 0.0
    for t in np.linspace(t0, s.crossing_time + half, 100)[1:]:
        closed = lz_probabilities(t, t0, p)
        ref = populations(
            linear_model_evolve(p, IntegrationSpec(t0, t, 1e-11, 1e-11), (1, 0))
        )
        worst = max(
            worst, *(abs(closed[k] - ref[k]) / max(1.0, ref[k]) for k in (0, 1))
        )
    assert worst < 1e-5

    worst_asym = 0.0
    for slope in (1.0, 4.0, 10.0):
        for kappa in (0.3, 1.0):
            pk = ModelParams(slope, 1.0, 0.0, kappa, 0.0)
            sk = lz_setup(pk)
            half = 3000.0 / math.sqrt(sk.slope)
            ps, _ = lz_probabilities(sk.crossing_time + half, sk.crossing_time - half, pk)
            worst_asym = max(
                worst_asym, abs(ps - math.exp(-math.pi * kappa**2 / (2 * slope)))
            )
    assert worst_asym < 1e-3
    report(7, "linear-crossing amplitudes vs integrator + asymptotic survival",
           max(worst / 1e-5, worst_asym / 1e-3), 1.0,
           time.perf_counter() - start, 10.0)


def test_criterion_08_short_window_reductions():
    start = time.perf_counter()
    p = ModelParams(8, 1, 0, 5, 0.0)
    dev_lz = tanh_to_lz_consistency(p, 0.1, n_points=41).max_deviation
    dev_rabi = tanh_to_rabi_consistency(p, 0.05, n_points=41).max_deviation
    report(8, "tanh->linear-crossing and tanh->constant-detuning reductions",
           max(dev_lz, dev_rabi), 1e-3, time.perf_counter() - start, 5.0)


def test_criterion_09_qualitative_claims():
    start = time.perf_counter()
    # (a) loss damps the oscillation contrast: compare the normalised
    # population fraction (raw lossy populations grow without bound, which
    # is claim (b))
    ts = np.linspace(-10, 10, 400)
    contrast = {}
    for delta, p in FIG2.items():
        states = evolve_dense(p, IntegrationSpec(-10, 10, 1e-10, 1e-10), ts, (1, 0))
        pops = np.abs(states) ** 2
        frac = pops[:, 1] / pops.sum(axis=1)
        tail = frac[ts > 2.0]
        contrast[delta] = float(tail.max() - tail.min())
    assert contrast[1.0] < contrast[0.0]

    # (b) populations exceed 1 somewhere on the fig-3 and fig-4 presets
    res3 = run_param_scan(FIG3[1.0], AxisSpec("delta", 0.0, 2.0, 11), solver="numeric")
    assert res3.values.max() > 1.0
    psi4 = evolve(FIG4[1.0], IntegrationSpec(-80, 3, 1e-10, 1e-10), (1, 0))
    assert max(populations(psi4)) > 1.0

    # (c) forbidden zone present for kappa=0, delta beyond the detuning
    # range; empty without loss
    p_forbidden = ModelParams(P=2, alpha=1, beta=0, kappa=0, delta=3)
    assert classify_zone(0.0, p_forbidden).label is Zone.FORBIDDEN
    res = run_energy_map(
        ModelParams(P=2, alpha=1, beta=0, kappa=0, delta=0),
        AxisSpec("delta", 0.1, 4, 41), AxisSpec("beta", -3, 3, 21),
        part="zone", t=0.0,
    )
    assert res.values.max() == 1.0  # nonempty forbidden region on the map
    res0 = run_energy_map(
        ModelParams(P=2, alpha=1, beta=0, kappa=1, delta=0),
        AxisSpec("P", 0.5, 4, 11), AxisSpec("beta", -3, 3, 11),
        part="zone", t=0.0,
    )
    assert res0.values.max() == 0.0  # lossless: no forbidden zone anywhere
    elapsed = time.perf_counter() - start
    print(
        f"criterion  9 [PASS] qualitative claims: contrast {contrast[1.0]:.3f} < "
        f"{contrast[0.0]:.3f}; lossy maxima > 1; zone claims hold; "
        f"{elapsed:.2f}s (budget 10s)"
    )
    assert elapsed < 10.0


def test_criterion_10_verify_determinism(tmp_path):
    outs = []
    for k in (1, 2):
        out = tmp_path / f"run{k}"
        rc = cli_main(["verify", "--quick", "--seed", "11", "-o", str(out)])
        assert rc == 0
        outs.append(out)
    csv_a = (outs[0] / "verify.csv").read_bytes()
    csv_b = (outs[1] / "verify.csv").read_bytes()
    assert csv_a == csv_b
    manifests = []
    for out in outs:
        m = json.loads((out / "manifest.json").read_text())
        m.pop("timestamp_utc", None)
        m.pop("wall_time_ms", None)
        manifests.append(m)
    assert manifests[0] == manifests[1]
    print("criterion 10 [PASS] verify is byte-identical across runs "
          "(timestamps excluded)")
