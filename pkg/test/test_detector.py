# -*- coding: utf-8 -*-
"""
MMSE soft interference cancellation detector.
"""

import numpy as np
import pytest

from dmimo.detector import (
    GAMMA_MAX,
    GAMMA_MIN,
    SoftBlock,
    compute_rho,
    isdic_detect_evd,
    isdic_detect_naive,
    lmmse_detect,
    post_detection_snr,
    prepare,
    stream_snr,
)
from dmimo.exceptions import DimensionException, NumericsException
from dmimo.types import RhoMode


def _crandn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _instance(rng, n_r=8, n_ri=4, n_l=16):
    h = _crandn(rng, (n_r, n_ri))
    b = _crandn(rng, (n_r, n_r))
    sigma = b @ b.conj().T / n_r + 0.1 * np.eye(n_r)
    y = _crandn(rng, (n_r, n_l))
    return h, sigma, y


def _uniform_soft(rng, n_ri, n_l):
    s_bar = 0.5 * _crandn(rng, (n_ri, n_l))
    v = np.broadcast_to(rng.uniform(0.0, 1.0, n_l), (n_ri, n_l)).copy()
    return SoftBlock(s_bar, v)


class TestPrepare:

    def test_scalar(self):
        state = prepare([[1.0]], [[1.0]])
        np.testing.assert_allclose(state.A, [[1.0]])
        np.testing.assert_allclose(state.lam, [1.0])
        np.testing.assert_allclose(np.abs(state.Q), [[1.0]])
        assert state.inversion_count == 0

    def test_diagonal(self):
        state = prepare(np.eye(2), 2 * np.eye(2))
        np.testing.assert_allclose(state.A, 0.5 * np.eye(2))
        np.testing.assert_allclose(state.lam, [0.5, 0.5])

    def test_reconstruction(self, rng):
        h, sigma, _ = _instance(rng, 4, 2)
        state = prepare(h, sigma)
        recon = state.Q @ np.diag(state.lam) @ state.Q.conj().T
        assert np.linalg.norm(recon - state.A) < 1e-9 * np.linalg.norm(state.A)
        assert np.all(state.lam >= -1e-10)
        np.testing.assert_allclose(state.F, h.conj().T @ np.linalg.inv(sigma), atol=1e-10)

    def test_wrong_covariance_dimension(self):
        with pytest.raises(DimensionException):
            prepare(np.ones((4, 2)), np.eye(2))

    def test_covariance_not_pd(self):
        with pytest.raises(NumericsException):
            prepare(np.ones((2, 1)), np.diag([1.0, -1.0]))


@pytest.mark.unit
class TestComputeRho:

    def test_scalar(self):
        state = prepare([[1.0]], [[1.0]])
        assert compute_rho(state, 1.0) == pytest.approx([0.5])

    def test_zero_variance_is_diagonal_of_a(self, rng):
        h, sigma, _ = _instance(rng)
        state = prepare(h, sigma)
        np.testing.assert_allclose(compute_rho(state, 0.0), np.real(np.diag(state.A)), rtol=1e-10)

    def test_matches_direct_inverse(self, rng):
        h, sigma, _ = _instance(rng)
        state = prepare(h, sigma)
        nu = 0.37
        direct = np.real(np.diag(np.linalg.inv(state.A * nu + np.eye(4)) @ state.A))
        np.testing.assert_allclose(compute_rho(state, nu), direct, rtol=1e-10)

    def test_vector_of_variances(self, rng):
        h, sigma, _ = _instance(rng)
        state = prepare(h, sigma)
        nus = np.array([0.1, 0.5, 1.0])
        rho = compute_rho(state, nus)
        assert rho.shape == (4, 3)
        for l, nu in enumerate(nus):
            np.testing.assert_allclose(rho[:, l], compute_rho(state, nu))

    def test_unbiasedness(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            h, sigma, _ = _instance(rng, n_r=n + 2, n_ri=n)
            state = prepare(h, sigma)
            nu = rng.uniform(0, 1)
            gain = np.linalg.inv(state.A * nu + np.eye(n)) @ state.A
            np.testing.assert_allclose(np.real(np.diag(gain)) / compute_rho(state, nu), 1.0,
                                       atol=1e-10)


class TestEvdDetector:

    @pytest.mark.parametrize("n_ri,n_r,n_l", [(2, 4, 8), (4, 4, 64), (4, 8, 8), (8, 8, 64)])
    def test_matches_naive_with_uniform_variances(self, n_ri, n_r, n_l):
        rng = np.random.default_rng(n_ri * 100 + n_r * 10 + n_l)
        for _ in range(25):
            h, sigma, y = _instance(rng, n_r, n_ri, n_l)
            soft = _uniform_soft(rng, n_ri, n_l)
            fast = isdic_detect_evd(prepare(h, sigma), y, soft)
            ref = isdic_detect_naive(prepare(h, sigma), y, soft)
            assert np.max(np.abs(fast - ref)) <= 1e-9

    def test_first_iteration_is_unbiased_lmmse(self, rng):
        for _ in range(100):
            h, sigma, y = _instance(rng)
            state = prepare(h, sigma)
            expected = lmmse_detect(state, y) / compute_rho(state, 1.0)[:, None]
            out = isdic_detect_evd(state, y, SoftBlock.initial(4, 16))
            np.testing.assert_allclose(out, expected, atol=1e-10)

    def test_scalar_hand_example(self):
        state = prepare([[1.0]], [[1.0]])
        out = isdic_detect_evd(state, [[2.0]], SoftBlock.initial(1, 1))
        np.testing.assert_allclose(out, [[2.0]])

    def test_inversion_counts(self, rng):
        h, sigma, y = _instance(rng, n_l=32)
        soft = _uniform_soft(rng, 4, 32)
        fast, slow = prepare(h, sigma), prepare(h, sigma)
        isdic_detect_evd(fast, y, soft)
        isdic_detect_naive(slow, y, soft)
        assert fast.inversion_count == 1
        assert slow.inversion_count == 32

    def test_zero_channel_returns_prior(self, rng):
        state = prepare(np.zeros((4, 2)), np.eye(4))
        soft = _uniform_soft(rng, 2, 5)
        out = isdic_detect_evd(state, _crandn(rng, (4, 5)), soft)
        np.testing.assert_array_equal(out, soft.s_bar)

    def test_per_block_rho_equals_per_column_for_constant_nu(self, rng):
        h, sigma, y = _instance(rng)
        soft = SoftBlock(_crandn(rng, (4, 16)), np.full((4, 16), 0.3))
        state = prepare(h, sigma)
        np.testing.assert_allclose(isdic_detect_evd(state, y, soft, RhoMode.PER_BLOCK),
                                   isdic_detect_evd(state, y, soft, RhoMode.PER_COLUMN), atol=1e-12)

    def test_column_mismatch(self, rng):
        h, sigma, y = _instance(rng)
        with pytest.raises(DimensionException):
            isdic_detect_evd(prepare(h, sigma), y, SoftBlock.initial(4, 15))

    def test_high_snr_recovers_symbols(self, rng):
        h = _crandn(rng, (8, 4))
        s = _crandn(rng, (4, 10))
        state = prepare(h, 1e-12 * np.eye(8))
        out = isdic_detect_evd(state, h @ s, SoftBlock.initial(4, 10))
        np.testing.assert_allclose(out, s, atol=1e-4)


class TestNaiveDetector:

    def test_perfect_priors_formula(self, rng):
        h, sigma, y = _instance(rng)
        state = prepare(h, sigma)
        soft = SoftBlock(_crandn(rng, (4, 16)), np.zeros((4, 16)))
        out = isdic_detect_naive(state, y, soft)
        omega = np.real(np.diag(state.A))
        expected = (state.F @ (y - h @ soft.s_bar)) / omega[:, None] + soft.s_bar
        np.testing.assert_allclose(out, expected, atol=1e-10)

    def test_direct_formula_with_full_variances(self, rng):
        h, sigma, y = _instance(rng, n_l=4)
        state = prepare(h, sigma)
        soft = SoftBlock(_crandn(rng, (4, 4)), rng.uniform(0, 1, (4, 4)))
        out = isdic_detect_naive(state, y, soft)
        for l in range(4):
            m = np.linalg.inv(state.A @ np.diag(soft.v[:, l]) + np.eye(4))
            omega = np.real(np.diag(m @ state.A))
            ref = (m @ state.F @ (y[:, l] - h @ soft.s_bar[:, l])) / omega + soft.s_bar[:, l]
            np.testing.assert_allclose(out[:, l], ref, atol=1e-10)


class TestLmmse:

    def test_scalar(self):
        state = prepare([[1.0]], [[1.0]])
        np.testing.assert_allclose(lmmse_detect(state, [[2.0]]), [[1.0]])

    def test_zero_channel(self):
        state = prepare(np.zeros((2, 2)), np.eye(2))
        np.testing.assert_array_equal(lmmse_detect(state, np.ones((2, 3))), np.zeros((2, 3)))


@pytest.mark.unit
class TestPostDetectionSnr:

    def test_half(self):
        state = prepare([[1.0]], [[1.0]])
        assert post_detection_snr(state, 1.0) == pytest.approx([1.0])

    def test_clamped_at_high_snr(self):
        state = prepare([[1.0]], [[1e-12]])
        assert post_detection_snr(state, 1.0)[0] == GAMMA_MAX

    def test_empirical_error_variance(self, rng):
        h = _crandn(rng, (4, 2))
        sigma2 = 0.5
        n_l = 100_000
        s = (rng.choice([-1, 1], (2, n_l)) + 1j * rng.choice([-1, 1], (2, n_l))) / np.sqrt(2)
        y = h @ s + np.sqrt(sigma2) * _crandn(rng, (4, n_l))
        state = prepare(h, sigma2 * np.eye(4))
        out = isdic_detect_evd(state, y, SoftBlock.initial(2, n_l))
        gamma = post_detection_snr(state, 1.0)
        np.testing.assert_allclose(np.mean(np.abs(out - s) ** 2, axis=1), 1.0 / gamma, rtol=0.1)


def _mixed_priors(rng, n_l):
    """Stream 0 known exactly, stream 1 unknown."""
    s = (rng.choice([-1, 1], (2, n_l)) + 1j * rng.choice([-1, 1], (2, n_l))) / np.sqrt(2)
    s_bar = np.vstack([s[0], np.zeros(n_l)])
    v = np.vstack([np.zeros(n_l), np.ones(n_l)])
    return s, SoftBlock(s_bar, v)


@pytest.mark.unit
class TestStreamSnr:

    def test_uniform_variances_reduce_to_column_formula(self, rng):
        h, sigma, _ = _instance(rng)
        soft = _uniform_soft(rng, 4, 16)
        state = prepare(h, sigma)
        np.testing.assert_allclose(stream_snr(state, soft), post_detection_snr(state, soft.nu),
                                   rtol=1e-8)

    def test_naive_snr_matches_with_uniform_variances(self, rng):
        h, sigma, y = _instance(rng)
        soft = _uniform_soft(rng, 4, 16)
        _, gamma = isdic_detect_naive(prepare(h, sigma), y, soft, return_snr=True)
        np.testing.assert_allclose(gamma, stream_snr(prepare(h, sigma), soft), rtol=1e-8)

    def test_zero_channel_gives_floor(self, rng):
        state = prepare(np.zeros((4, 2)), np.eye(4))
        assert np.all(stream_snr(state, _uniform_soft(rng, 2, 3)) == GAMMA_MIN)

    def test_empirical_error_variance_with_mixed_priors(self, rng):
        h = _crandn(rng, (4, 2))
        sigma2 = 0.5
        n_l = 100_000
        s, soft = _mixed_priors(rng, n_l)
        y = h @ s + np.sqrt(sigma2) * _crandn(rng, (4, n_l))
        state = prepare(h, sigma2 * np.eye(4))
        out = isdic_detect_evd(state, y, soft)
        measured = np.mean(np.abs(out - s) ** 2, axis=1)
        np.testing.assert_allclose(measured, 1.0 / stream_snr(state, soft)[:, 0], rtol=0.1)

    def test_naive_empirical_error_variance_with_mixed_priors(self, rng):
        h = _crandn(rng, (4, 2))
        sigma2 = 0.5
        n_l = 20_000
        s, soft = _mixed_priors(rng, n_l)
        y = h @ s + np.sqrt(sigma2) * _crandn(rng, (4, n_l))
        out, gamma = isdic_detect_naive(prepare(h, sigma2 * np.eye(4)), y, soft, return_snr=True)
        np.testing.assert_allclose(np.mean(np.abs(out - s) ** 2, axis=1), 1.0 / gamma[:, 0],
                                   rtol=0.1)


class TestVarianceSweep:

    def test_output_is_continuous_in_nu(self, rng):
        h, _, y = _instance(rng, n_l=1)
        state = prepare(h, 4.0 * np.eye(8))
        s_bar = 0.5 * _crandn(rng, (4, 1))

        def max_step(step):
            nus = np.arange(0.0, 1.0 + step / 2, step)
            outs = np.stack([isdic_detect_evd(state, y, SoftBlock(s_bar, np.full((4, 1), nu)))
                             for nu in nus])
            assert np.all(np.isfinite(outs))
            return np.max(np.abs(np.diff(outs, axis=0)))

        coarse, fine = max_step(1e-2), max_step(1e-3)
        assert fine <= 0.25 * coarse

    def test_small_nu_approaches_perfect_prior_limit(self, rng):
        h, sigma, y = _instance(rng)
        state = prepare(h, sigma)
        s_bar = _crandn(rng, (4, 16))
        limit = (state.F @ (y - h @ s_bar)) / np.real(np.diag(state.A))[:, None] + s_bar
        errors = [np.max(np.abs(isdic_detect_evd(state, y, SoftBlock(s_bar, np.full((4, 16), nu)))
                                - limit))
                  for nu in (1e-2, 1e-4, 1e-6)]
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-3


class TestMultiPassAgreement:

    def test_evd_matches_naive_over_passes(self, rng):
        h, sigma, y = _instance(rng, n_l=32)
        fast, slow = prepare(h, sigma), prepare(h, sigma)
        soft = SoftBlock.initial(4, 32)
        for _ in range(3):
            out_fast = isdic_detect_evd(fast, y, soft)
            out_slow = isdic_detect_naive(slow, y, soft)
            assert np.max(np.abs(out_fast - out_slow)) <= 1e-9
            # next priors: the estimate as mean, one variance per column
            nu = np.minimum(np.mean(np.abs(out_fast - soft.s_bar) ** 2, axis=0), 1.0)
            soft = SoftBlock(0.5 * out_fast, np.broadcast_to(0.5 * nu, (4, 32)).copy())
        assert fast.inversion_count == 3
        assert slow.inversion_count == 3 * 32
