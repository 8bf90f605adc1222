# -*- coding: utf-8 -*-
"""
Null-space interference suppression.
"""

import numpy as np
import pytest

from dmimo.channel import ChannelRealization, draw_channel
from dmimo.configs import SystemConfig
from dmimo.exceptions import DimensionException, NullSpaceException, NumericsException
from dmimo.suppression import apply_suppression, build_suppression, noise_covariance
from dmimo.types import RowSelection


def _channel(rng, m=2, k=2, n_r=2, n_u=2, n_ri=1):
    g = [(rng.standard_normal((m * n_r, n_u)) + 1j * rng.standard_normal((m * n_r, n_u))) / np.sqrt(2)
         for _ in range(k)]
    p = [np.eye(n_u, n_ri, dtype=complex) for _ in range(k)]
    return ChannelRealization(g, p, n_r)


class TestBuildSuppression:

    def test_single_user_identity_rows(self, rng):
        chan = _channel(rng, m=2, k=1, n_r=2, n_u=2)
        supp = build_suppression(chan, RowSelection.FIRST, 1.0)
        np.testing.assert_array_equal(supp.W_per_user[0], np.eye(4)[:2])
        assert supp.residual_leakage[0] == 0.0

    def test_orthogonality(self, rng):
        chan = _channel(rng)
        supp = build_suppression(chan, RowSelection.FIRST, 1.0)
        assert np.linalg.norm(supp.W_per_user[0] @ chan.G_blocks[1]) < 1e-10
        assert np.linalg.norm(supp.W_per_user[1] @ chan.G_blocks[0]) < 1e-10

    def test_orthonormal_rows(self, desk_config):
        rng = np.random.default_rng(2)
        for _ in range(20):
            supp = build_suppression(draw_channel(desk_config, rng), sigma2=0.5)
            for w in supp.W_per_user:
                assert w.shape == (4, 8)
                np.testing.assert_allclose(w @ w.conj().T, np.eye(4), atol=1e-10)

    def test_leakage_bound(self, desk_config):
        chan = draw_channel(desk_config, np.random.default_rng(4))
        supp = build_suppression(chan, sigma2=1.0)
        assert np.all(supp.residual_leakage <= 1e-9 * np.linalg.norm(chan.G))

    def test_effective_channel(self, desk_block):
        chan, _ = desk_block
        supp = build_suppression(chan, sigma2=1.0)
        for k in range(2):
            np.testing.assert_allclose(supp.H_eff[k], supp.W_per_user[k] @ chan.H[k])

    def test_random_rows_seeded(self, desk_block):
        chan, _ = desk_block
        a = build_suppression(chan, RowSelection.RANDOM, 1.0, seed=3)
        b = build_suppression(chan, RowSelection.RANDOM, 1.0, seed=3)
        np.testing.assert_array_equal(a.W_per_user[0], b.W_per_user[0])
        np.testing.assert_allclose(a.W_per_user[0] @ a.W_per_user[0].conj().T, np.eye(4), atol=1e-10)

    def test_insufficient_null_space(self, rng):
        chan = _channel(rng, m=1, k=2, n_r=2, n_u=2)
        with pytest.raises(NullSpaceException) as exc:
            build_suppression(chan, sigma2=1.0)
        assert exc.value.details["required"] == 2
        assert exc.value.details["rank"] == 2

    def test_permutation_equivariance(self, desk_block):
        chan, _ = desk_block
        swapped = ChannelRealization(chan.G_blocks[::-1], chan.P[::-1], chan.rau_antennas)
        a = build_suppression(chan, sigma2=1.0)
        b = build_suppression(swapped, sigma2=1.0)
        np.testing.assert_allclose(a.W_per_user[0], b.W_per_user[1], atol=1e-12)
        np.testing.assert_allclose(a.W_per_user[1], b.W_per_user[0], atol=1e-12)


class TestNoiseCovariance:

    def test_white_under_perfect_csi(self, desk_block):
        chan, _ = desk_block
        sigma2 = 0.2
        supp = build_suppression(chan, sigma2=sigma2)
        for s in supp.Sigma:
            assert np.linalg.norm(s - sigma2 * np.eye(4)) <= 1e-9 * sigma2 + 1e-15

    def test_single_user_unit(self, rng):
        chan = _channel(rng, m=2, k=1)
        w = np.eye(4)[:2].astype(complex)
        np.testing.assert_array_equal(noise_covariance(chan, w, 1.0, 0), np.eye(2))

    def test_interference_kept_for_arbitrary_combiner(self, rng):
        chan = _channel(rng)
        w = np.eye(4)[:2].astype(complex)
        sigma = noise_covariance(chan, w, 0.5, 0)
        np.testing.assert_allclose(sigma, sigma.conj().T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(sigma)) >= 0.5 * (1 - 1e-9)
        assert np.linalg.norm(sigma - 0.5 * np.eye(2)) > 1e-3

    def test_non_positive_noise(self, rng):
        chan = _channel(rng)
        with pytest.raises(NumericsException):
            noise_covariance(chan, np.eye(4)[:2], 0.0, 0)

    def test_wrong_combiner_width(self, rng):
        chan = _channel(rng)
        with pytest.raises(DimensionException):
            noise_covariance(chan, np.eye(3)[:2], 1.0, 0)


class TestApplySuppression:

    def test_row_selection(self, rng):
        y = rng.standard_normal((4, 5))
        np.testing.assert_array_equal(apply_suppression(np.eye(4)[1:3], y), y[1:3])

    def test_interferer_only_is_cancelled(self, desk_config, desk_block):
        chan, block = desk_block
        supp = build_suppression(chan, sigma2=1.0)
        y = chan.H[1] @ block.symbols[1]
        assert np.linalg.norm(apply_suppression(supp.W_per_user[0], y)) < 1e-9 * np.linalg.norm(y)

    def test_single_user_signal(self, desk_block):
        chan, block = desk_block
        supp = build_suppression(chan, sigma2=1.0)
        y = chan.H[0] @ block.symbols[0]
        np.testing.assert_allclose(apply_suppression(supp.W_per_user[0], y),
                                   supp.H_eff[0] @ block.symbols[0], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionException):
            apply_suppression(np.eye(4)[:2], np.ones((3, 2)))
