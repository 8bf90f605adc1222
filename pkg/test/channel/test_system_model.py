# -*- coding: utf-8 -*-
"""
Channel draws, precoders and the transmit chain.
"""

import numpy as np
import pytest

from dmimo.channel import (
    ChannelRealization,
    build_precoder,
    draw_channel,
    estimate_channel,
    interleaver_for,
    random_payload,
    system_code,
    transmit,
)
from dmimo.configs import SystemConfig
from dmimo.exceptions import DimensionException, NumericsException
from dmimo.softmaps import get_constellation
from dmimo.types import ChannelModel, PrecoderMode


class TestDrawChannel:

    def test_scalar_shapes(self):
        cfg = SystemConfig(num_raus=1, num_users=1, rau_antennas=1, user_antennas=1,
                           streams=[1], bits_per_symbol=2, block_length=324)
        chan = draw_channel(cfg, np.random.default_rng(0))
        assert chan.G_blocks[0].shape == (1, 1)
        assert chan.H[0].shape == (1, 1)

    def test_same_seed_same_channel(self, desk_config):
        a = draw_channel(desk_config, np.random.default_rng(5))
        b = draw_channel(desk_config, np.random.default_rng(5))
        for ga, gb in zip(a.G_blocks, b.G_blocks):
            np.testing.assert_array_equal(ga, gb)

    def test_unit_entry_variance(self):
        cfg = SystemConfig(num_raus=2, num_users=2, rau_antennas=2, user_antennas=2,
                           streams=[1, 1], bits_per_symbol=2, block_length=324)
        rng = np.random.default_rng(11)
        samples = np.concatenate([np.concatenate([g.ravel() for g in draw_channel(cfg, rng).G_blocks])
                                  for _ in range(10_000)])
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(1.0, abs=0.05)

    def test_large_scale_unit_mean_power(self, desk_config):
        cfg = desk_config.model_copy(update={"channel_model": ChannelModel.PER_RAU_LARGE_SCALE})
        rng = np.random.default_rng(3)
        powers = []
        for _ in range(4000):
            chan = draw_channel(cfg, rng)
            assert chan.gains_db.shape == (2, 2)
            powers.append(np.mean(np.abs(chan.G) ** 2))
        # log-normal spread of 8 dB makes this a heavy-tailed average
        assert np.mean(powers) == pytest.approx(1.0, rel=0.15)

    def test_precoders_orthonormal(self, desk_config):
        chan = draw_channel(desk_config, np.random.default_rng(1))
        for p in chan.P:
            np.testing.assert_allclose(p.conj().T @ p, np.eye(p.shape[1]), atol=1e-10)

    def test_mismatched_precoder(self):
        with pytest.raises(DimensionException):
            ChannelRealization([np.ones((4, 2))], [np.ones((3, 1))])


class TestBuildPrecoder:

    def test_columns(self):
        p = build_precoder(np.ones((8, 4)), 2, PrecoderMode.COLUMNS)
        np.testing.assert_array_equal(p, np.eye(4, 2))

    def test_right_singular_diagonal(self):
        p = build_precoder(np.diag([2.0, 1.0]).astype(complex), 1, PrecoderMode.RIGHT_SINGULAR)
        np.testing.assert_allclose(np.abs(p), [[1.0], [0.0]], atol=1e-12)

    def test_right_singular_orthonormal(self, rng):
        g = rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4))
        p = build_precoder(g, 3, PrecoderMode.RIGHT_SINGULAR)
        np.testing.assert_allclose(p.conj().T @ p, np.eye(3), atol=1e-10)

    def test_rank_deficient(self):
        g = np.outer(np.ones(4), [1.0, 1.0]).astype(complex)
        with pytest.raises(NumericsException):
            build_precoder(g, 2, PrecoderMode.RIGHT_SINGULAR)

    def test_too_many_streams(self):
        with pytest.raises(DimensionException):
            build_precoder(np.ones((4, 2)), 3)


class TestTransmit:

    def test_noiseless_scalar_identity(self):
        cfg = SystemConfig(num_raus=1, num_users=1, rau_antennas=1, user_antennas=1,
                           streams=[1], bits_per_symbol=2, block_length=324)
        chan = ChannelRealization([np.ones((1, 1), dtype=complex)], [np.ones((1, 1), dtype=complex)])
        rng = np.random.default_rng(0)
        block = transmit(cfg, chan, random_payload(cfg, rng), rng, noise_var=0.0)
        np.testing.assert_array_equal(block.received, block.symbols[0])

    def test_zero_payload_maps_to_zero_label(self, desk_config):
        chan = draw_channel(desk_config, np.random.default_rng(0))
        code = system_code(desk_config)
        payload = [np.zeros(2 * code.k, dtype=np.int8) for _ in range(2)]
        block = transmit(desk_config, chan, payload, np.random.default_rng(0))
        zero_point = get_constellation(4).points[0]
        for s in block.symbols:
            np.testing.assert_array_equal(s, np.full(s.shape, zero_point))

    def test_linearity(self, desk_config, desk_block):
        chan, block = desk_block
        expected = sum(g @ p @ s for g, p, s in zip(chan.G_blocks, chan.P, block.symbols))
        np.testing.assert_allclose(block.noiseless, expected, atol=1e-12)

    def test_block_contents(self, desk_config, desk_block):
        _, block = desk_block
        code = system_code(desk_config)
        const = get_constellation(desk_config.bits_per_symbol)
        for k, cw in enumerate(block.codewords):
            assert cw.shape == (2, code.n)
            assert not np.any(code.syndrome(cw))
            assert block.coded_bits[k].size == desk_config.coded_bits_per_user[k]
            np.testing.assert_array_equal(interleaver_for(desk_config, k).deinterleave(block.coded_bits[k]),
                                          cw.reshape(-1))
            dist = np.min(np.abs(block.symbols[k][..., None] - const.points), axis=-1)
            assert np.max(dist) == 0.0

    def test_noise_variance(self, desk_config):
        rng = np.random.default_rng(21)
        chan = draw_channel(desk_config, rng)
        payload = random_payload(desk_config, rng)
        block = transmit(desk_config, chan, payload, rng, noise_var=0.3)
        noise = block.received - block.noiseless
        # 8 x 162 entries x 10 blocks
        samples = [noise]
        for _ in range(9):
            samples.append(transmit(desk_config, chan, payload, rng, noise_var=0.3).received
                           - block.noiseless)
        assert np.mean(np.abs(np.stack(samples)) ** 2) == pytest.approx(0.3, rel=0.05)

    def test_reproducible(self, desk_config):
        def run():
            rng = np.random.default_rng(99)
            chan = draw_channel(desk_config, rng)
            return transmit(desk_config, chan, random_payload(desk_config, rng), rng)
        a, b = run(), run()
        np.testing.assert_array_equal(a.received, b.received)

    def test_payload_length_mismatch(self, desk_config, desk_block):
        chan, _ = desk_block
        with pytest.raises(DimensionException):
            transmit(desk_config, chan, [np.zeros(10, dtype=np.int8)] * 2, np.random.default_rng(0))

    def test_observed_at_scales_noise(self, desk_block):
        _, block = desk_block
        np.testing.assert_allclose(block.observed_at(4.0) - block.noiseless,
                                   2.0 * block.unit_noise)


class TestEstimateChannel:

    def test_perfect_csi_returns_same_object(self, desk_block):
        chan, _ = desk_block
        assert estimate_channel(chan, 0.0, np.random.default_rng(0)) is chan

    def test_error_variance(self, desk_block):
        chan, _ = desk_block
        est = estimate_channel(chan, 0.01, np.random.default_rng(0))
        err = np.concatenate([(a - b).ravel() for a, b in zip(est.G_blocks, chan.G_blocks)])
        assert 0.0 < np.mean(np.abs(err) ** 2) < 0.05
        np.testing.assert_array_equal(est.P[0], chan.P[0])
