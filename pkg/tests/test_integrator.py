import numpy as np
import pytest
from scipy.linalg import expm

from dktanh.integrator import (
    IntegrationSpec,
    StepLimitError,
    evolve,
    evolve_dense,
    populations,
    propagator_numeric,
)
from dktanh.model import ModelParams, hamiltonian

FIG2_LOSSLESS = ModelParams(P=8, alpha=1, beta=0, kappa=5, delta=0)
FIG2_LOSSY = ModelParams(P=8, alpha=1, beta=0, kappa=5, delta=1)


class TestSpecValidation:
    def test_tolerance_bounds(self):
        with pytest.raises(ValueError):
            IntegrationSpec(0, 1, rel_tol=1e-15)
        with pytest.raises(ValueError):
            IntegrationSpec(0, 1, abs_tol=0.1)

    def test_max_steps_positive(self):
        with pytest.raises(ValueError):
            IntegrationSpec(0, 1, max_steps=0)

    def test_endpoints_finite(self):
        with pytest.raises(ValueError):
            IntegrationSpec(0, np.inf)


class TestEvolve:
    def test_zero_hamiltonian_is_identity(self):
        p = ModelParams(P=0, alpha=1)
        psi0 = np.array([0.3 + 0.1j, 0.2 - 0.5j])
        psi = evolve(p, IntegrationSpec(-4, 9), psi0)
        assert np.array_equal(psi, psi0)

    def test_hermitian_norm_conservation(self):
        spec = IntegrationSpec(-10, 10, 1e-10, 1e-10)
        ts = np.linspace(-10, 10, 201)
        states = evolve_dense(FIG2_LOSSLESS, spec, ts, (1, 0))
        norms = np.abs(states[:, 0]) ** 2 + np.abs(states[:, 1]) ** 2
        assert np.max(np.abs(norms - 1.0)) < 100 * spec.rel_tol

    def test_constant_hamiltonian_matches_matrix_exponential(self):
        # P = 0 freezes the Hamiltonian; scipy expm is the oracle
        p = ModelParams(P=0, alpha=1, beta=0, kappa=0.3, delta=0.3)
        H = hamiltonian(0.0, p)
        for t in (0.5, 4.0, 11.0):
            exact = expm(-1j * H * t) @ np.array([1.0, 0.0])
            psi = evolve(p, IntegrationSpec(0, t, 1e-12, 1e-12), (1, 0))
            assert np.max(np.abs(psi - exact)) < 1e-10

    def test_time_reversal(self):
        psi0 = np.array([0.6, 0.8j])
        fwd = evolve(FIG2_LOSSY, IntegrationSpec(-3, 4, 1e-11, 1e-11), psi0)
        back = evolve(FIG2_LOSSY, IntegrationSpec(4, -3, 1e-11, 1e-11), fwd)
        assert np.max(np.abs(back - psi0)) < 1e-8

    def test_self_convergence(self):
        coarse = evolve(FIG2_LOSSY, IntegrationSpec(-10, 10, 1e-8, 1e-8), (1, 0))
        fine = evolve(FIG2_LOSSY, IntegrationSpec(-10, 10, 5e-9, 5e-9), (1, 0))
        p_coarse = populations(coarse)
        p_fine = populations(fine)
        scale = max(1.0, *p_fine)
        assert abs(p_coarse[0] - p_fine[0]) / scale < 1e-8
        assert abs(p_coarse[1] - p_fine[1]) / scale < 1e-8

    def test_step_limit_raises(self):
        with pytest.raises(StepLimitError):
            evolve(FIG2_LOSSY, IntegrationSpec(-10, 10, 1e-12, 1e-12, max_steps=10), (1, 0))


class TestDenseOutput:
    def test_matches_individual_evolutions(self):
        ts = np.array([-2.0, 0.0, 1.5, 3.0])
        dense = evolve_dense(FIG2_LOSSY, IntegrationSpec(-2, 3, 1e-11, 1e-11), ts, (1, 0))
        for t, row in zip(ts, dense):
            single = (
                evolve(FIG2_LOSSY, IntegrationSpec(-2, t, 1e-11, 1e-11), (1, 0))
                if t != -2.0
                else np.array([1.0, 0.0])
            )
            assert np.max(np.abs(row - single)) < 1e-9

    def test_rejects_out_of_range_times(self):
        with pytest.raises(ValueError):
            evolve_dense(FIG2_LOSSY, IntegrationSpec(0, 1), [0.5, 2.0], (1, 0))

    def test_rejects_unordered_times(self):
        with pytest.raises(ValueError):
            evolve_dense(FIG2_LOSSY, IntegrationSpec(0, 1), [0.8, 0.2], (1, 0))


class TestPropagator:
    def test_identity_at_zero_interval(self):
        U = propagator_numeric(FIG2_LOSSY, IntegrationSpec(2.0, 2.0))
        assert np.allclose(U, np.eye(2))

    def test_unitary_when_lossless(self):
        U = propagator_numeric(FIG2_LOSSLESS, IntegrationSpec(-10, 10, 1e-10, 1e-10))
        assert np.max(np.abs(U.conj().T @ U - np.eye(2))) < 1e-8

    def test_composition(self):
        kw = dict(rel_tol=1e-11, abs_tol=1e-11)
        U20 = propagator_numeric(FIG2_LOSSY, IntegrationSpec(-6, 5, **kw))
        U21 = propagator_numeric(FIG2_LOSSY, IntegrationSpec(1, 5, **kw))
        U10 = propagator_numeric(FIG2_LOSSY, IntegrationSpec(-6, 1, **kw))
        assert np.max(np.abs(U20 - U21 @ U10)) < 1e-8

    def test_determinant_is_one_even_with_loss(self):
        # traceless generator: det U = 1 independent of Hermiticity
        for p in (FIG2_LOSSLESS, FIG2_LOSSY):
            U = propagator_numeric(p, IntegrationSpec(-10, 10, 1e-11, 1e-11))
            assert abs(np.linalg.det(U) - 1.0) < 1e-7

    def test_lossy_run_exceeds_unit_population(self):
        # high shift pumps the norm above 1 (fig-3 regime)
        p = ModelParams(P=8, alpha=1, beta=0, kappa=10, delta=1)
        psi = evolve(p, IntegrationSpec(-10, 10, 1e-10, 1e-10), (1, 0))
        assert max(populations(psi)) > 1.0


class TestPopulations:
    def test_basis_state(self):
        assert populations((1, 0)) == (1.0, 0.0)

    def test_balanced_state(self):
        p1, p2 = populations(((1 + 1j) / 2, (1 - 1j) / 2))
        assert p1 == pytest.approx(0.5)
        assert p2 == pytest.approx(0.5)
