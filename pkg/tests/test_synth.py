"""Tests for the synthetic data generators."""

import numpy as np
import pytest

from cdmd import (
    IntegrationOverflow,
    InvalidInput,
    LorenzParams,
    NoiseSpec,
    add_noise,
    dft_power_spectrum,
    lorenz_rk4,
    random_linear_system,
    simulate,
    synth_line_noise,
    synth_video,
    well_posed_initial_state,
)
from cdmd.linalg import effective_rank, unit_eigenvalue_certificate
from cdmd.synth import LinearSystemSpec


class TestRandomLinearSystem:
    def test_distinct_eigenvalues_and_real_rank(self):
        spec = random_linear_system(10, 7, seed=1)
        sep = np.abs(spec.eigenvalues[:, None] - spec.eigenvalues[None, :])
        np.fill_diagonal(sep, np.inf)
        assert np.min(sep) >= 1e-3
        A = spec.matrix
        assert np.isrealobj(A)
        assert np.linalg.matrix_rank(A) == 7

    def test_prescribed_diag(self):
        spec = random_linear_system(2, 2, placement="prescribed", prescribed=[2.0, 3.0])
        assert sorted(np.linalg.eigvals(spec.matrix).real.round(9)) == [2.0, 3.0]

    def test_determinism(self):
        a = random_linear_system(8, 5, seed=7)
        b = random_linear_system(8, 5, seed=7)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvector_matrix, b.eigenvector_matrix)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            random_linear_system(3, 5)
        with pytest.raises(InvalidInput):
            random_linear_system(3, 2, placement="prescribed")
        with pytest.raises(InvalidInput):
            random_linear_system(3, 2, prescribed=[1j, 2.0])  # not conjugate-closed

    def test_mixed_placement_straddles_unit_circle(self):
        spec = random_linear_system(10, 6, placement="mixed_stable_unstable", seed=3)
        mods = np.abs(spec.eigenvalues)
        assert np.any(mods < 1.0) and np.any(mods > 1.0)

    def test_random_bias(self):
        spec = random_linear_system(5, 3, seed=9, bias="random")
        assert spec.bias.shape == (5,)


class TestSimulate:
    def test_golden_affine_values(self):
        spec = LinearSystemSpec(
            n=2, r=2, eigenvalues=np.array([2.0, 3.0]),
            eigenvector_matrix=np.eye(2, dtype=complex), bias=np.array([1.0, 2.0]),
        )
        X = simulate(spec, np.array([1.0, 1.0]), 3)
        assert np.array_equal(X, [[1, 3, 7, 15], [1, 5, 17, 53]])

    def test_pure_forcing_powers(self):
        spec = LinearSystemSpec(
            n=1, r=0, eigenvalues=np.empty(0), eigenvector_matrix=np.empty((1, 0)),
            bias=np.array([1.0]),
        )
        X = simulate(spec, np.array([0.0]), 3, forcing_lambda=2.0)
        assert np.array_equal(X, [[0.0, 1.0, 2.0, 4.0]])

    def test_constant_trajectory(self):
        spec = LinearSystemSpec(
            n=2, r=2, eigenvalues=np.array([1.0, 0.5]),
            eigenvector_matrix=np.eye(2, dtype=complex),
        )
        X = simulate(spec, np.array([3.0, 0.0]), 5)
        assert np.allclose(X, np.outer([3.0, 0.0], np.ones(6)))

    def test_real_output_without_complex_forcing(self):
        spec = random_linear_system(6, 4, seed=15, bias="random")
        X = simulate(spec, well_posed_initial_state(spec, seed=16), 10)
        assert np.isrealobj(X)

    def test_forcing_requires_bias(self):
        spec = random_linear_system(4, 2, seed=17)
        with pytest.raises(InvalidInput):
            simulate(spec, well_posed_initial_state(spec, seed=18), 5, forcing_lambda=0.5)


class TestWellPosedInitialState:
    def test_excites_every_mode(self):
        spec = random_linear_system(9, 6, seed=21)
        x1 = well_posed_initial_state(spec, seed=22)
        coords = np.linalg.pinv(spec.eigenvector_matrix) @ x1
        assert np.all(np.abs(coords) > 1e-3)

    def test_affine_trajectory_has_expected_rank(self):
        spec = random_linear_system(10, 5, seed=23, bias="random")
        x1 = well_posed_initial_state(spec, seed=24)
        X = simulate(spec, x1, 20)
        assert effective_rank(X[:, :-1]).r == 6  # modes + background offset

    def test_determinism(self):
        spec = random_linear_system(6, 4, seed=25)
        assert np.array_equal(
            well_posed_initial_state(spec, seed=26), well_posed_initial_state(spec, seed=26)
        )


class TestAddNoise:
    def test_zero_eta_identity(self):
        X = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(add_noise(X, NoiseSpec(eta=0.0)), X)

    def test_moments(self):
        Z = add_noise(np.zeros((1000, 1000)), NoiseSpec(eta=1.0, seed=5))
        assert abs(Z.mean()) < 3.3 / 1000
        assert abs(Z.std() - 1.0) < 0.01

    def test_determinism(self):
        X = np.zeros((4, 4))
        a = add_noise(X, NoiseSpec(eta=0.1, seed=8))
        b = add_noise(X, NoiseSpec(eta=0.1, seed=8))
        assert np.array_equal(a, b)

    def test_negative_eta_rejected(self):
        with pytest.raises(InvalidInput):
            NoiseSpec(eta=-1.0)


class TestLorenzRk4:
    def test_shape_and_initial_column(self):
        X = lorenz_rk4(LorenzParams())
        assert X.shape == (3, 4800)
        assert np.array_equal(X[:, 0], [6.7673, 6.1253, 25.8706])

    def test_equilibrium_is_stationary(self):
        p = LorenzParams()
        fp = np.array([np.sqrt(p.beta * (p.rho - 1)), np.sqrt(p.beta * (p.rho - 1)), p.rho - 1])
        X = lorenz_rk4(LorenzParams(x0=fp, steps=50))
        assert np.max(np.abs(X - fp[:, None])) < 1e-9

    def test_fourth_order_convergence(self):
        # Global error over [0, 0.1] should scale as dt^4 within a factor 2.
        ref = lorenz_rk4(LorenzParams(dt=1e-5, steps=10001))[:, -1]
        errs = []
        for dt, steps in [(1e-3, 101), (5e-4, 201), (2.5e-4, 401)]:
            end = lorenz_rk4(LorenzParams(dt=dt, steps=steps))[:, -1]
            errs.append(np.linalg.norm(end - ref))
        r1 = errs[0] / errs[1]
        r2 = errs[1] / errs[2]
        assert 8.0 < r1 < 32.0 and 8.0 < r2 < 32.0

    def test_overflow_detection(self):
        with pytest.raises(IntegrationOverflow):
            lorenz_rk4(LorenzParams(dt=1.0, steps=100))


class TestSynthVideo:
    def test_static_background_rank_one(self):
        X = synth_video(8, 8, 10, moving=False)
        assert effective_rank(X).r == 1
        assert np.linalg.norm(X - X.mean(axis=1, keepdims=True)) < 1e-12

    def test_low_rank_and_certificate(self):
        X = synth_video(16, 16, 48)
        assert effective_rank(X[:, :-1]).r <= 6
        assert unit_eigenvalue_certificate(X[:, :-1], X, tol=1e-6)

    def test_determinism(self):
        assert np.array_equal(synth_video(8, 8, 12, seed=3), synth_video(8, 8, 12, seed=3))


class TestSynthLineNoise:
    def test_shape(self):
        X = synth_line_noise(4, 200.0, 1.0, 60.0, seed=1)
        assert X.shape == (4, 200)

    def test_pure_tone_concentrates_at_f0(self):
        X = synth_line_noise(4, 200.0, 1.0, 50.0, seed=2, n_low_modes=0, noise_eta=0.0)
        spec = dft_power_spectrum(X, 200.0)
        assert spec.frequencies[np.argmax(spec.power)] == 50.0

    def test_default_peak_at_60hz(self):
        X = synth_line_noise(64, 1000.0, 5.0, 60.0, seed=3)
        spec = dft_power_spectrum(X, 1000.0)
        peak = spec.frequencies[np.argmax(spec.power)]
        assert abs(peak - 60.0) < 1.0

    def test_aliasing_rejected(self):
        with pytest.raises(InvalidInput):
            synth_line_noise(4, 100.0, 1.0, 60.0)

    def test_determinism(self):
        a = synth_line_noise(4, 200.0, 0.5, 60.0, seed=4)
        b = synth_line_noise(4, 200.0, 0.5, 60.0, seed=4)
        assert np.array_equal(a, b)
