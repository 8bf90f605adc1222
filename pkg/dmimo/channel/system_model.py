r"""Uplink system model: channel draws, precoding and the received block.

Shapes follow the stacked receive side: ``G_k`` is ``(M*N_R, N_U)``, the
precoder ``P_k`` is ``(N_U, N_RI,k)`` and ``y`` is ``(M*N_R, N_L)``.
A single global noise matrix is added after all users are superposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from dmimo.coding import Interleaver, LdpcCode, code_for
from dmimo.configs import SystemConfig
from dmimo.exceptions import DimensionException, NumericsException
from dmimo.numerics import svd
from dmimo.softmaps import get_constellation
from dmimo.types import ChannelModel, PrecoderMode


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass
class ChannelRealization:
    r"""Per-user channels ``G_k``, precoders ``P_k`` and ``H_k = G_k P_k``."""

    G_blocks: List[np.ndarray]
    P: List[np.ndarray]
    H: List[np.ndarray] = field(init=False)
    rau_antennas: Optional[int] = None
    """Rows of the per-user combiner, N_R. Defaults to the full array (one RAU)."""
    gains_db: Optional[np.ndarray] = None
    """Per-(RAU, user) large-scale gains in dB, ``None`` for i.i.d. Rayleigh."""

    def __post_init__(self):
        if len(self.G_blocks) != len(self.P):
            raise DimensionException(
                f"{len(self.G_blocks)} channel blocks for {len(self.P)} precoders",
                {"channels": len(self.G_blocks), "precoders": len(self.P)},
            )
        for k, (g, p) in enumerate(zip(self.G_blocks, self.P)):
            if g.shape[1] != p.shape[0]:
                raise DimensionException(
                    f"user {k}: G_k {g.shape} does not match P_k {p.shape}",
                    {"user": k, "G": g.shape, "P": p.shape},
                )
        self.H = [g @ p for g, p in zip(self.G_blocks, self.P)]
        if self.rau_antennas is None:
            self.rau_antennas = self.num_rx

    @property
    def num_users(self) -> int:
        return len(self.G_blocks)

    @property
    def num_rx(self) -> int:
        return self.G_blocks[0].shape[0]

    @property
    def G(self) -> np.ndarray:
        """The full ``(M*N_R, K*N_U)`` channel."""
        return np.hstack(self.G_blocks)

    def with_channels(self, g_blocks: Sequence[np.ndarray]) -> "ChannelRealization":
        """Same precoders, new channel matrices (used for imperfect CSI)."""
        return ChannelRealization(list(g_blocks), list(self.P), self.rau_antennas, self.gains_db)


@dataclass
class TransmitBlock:
    r"""Everything produced on the transmit side for one block.

    ``received`` is ``noiseless + sqrt(noise_var) * unit_noise``; keeping the
    unit-variance draw lets the same block be re-observed at another SNR.
    """

    info_bits: List[np.ndarray]
    codewords: List[np.ndarray]
    coded_bits: List[np.ndarray]
    symbols: List[np.ndarray]
    noiseless: np.ndarray
    unit_noise: np.ndarray
    noise_var: float

    @property
    def received(self) -> np.ndarray:
        return self.observed_at(self.noise_var)

    def observed_at(self, noise_var: float) -> np.ndarray:
        return self.noiseless + np.sqrt(noise_var) * self.unit_noise


def draw_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    r"""Draw one channel realization and the matching precoders.

    ``iid_rayleigh``: every entry CN(0, 1). ``per_rau_large_scale``: each
    ``N_R x N_U`` block ``G_{m,k}`` is additionally scaled by a log-normal
    power gain with ``large_scale_std_db`` spread, normalized so the mean
    power per entry stays one.
    """
    m, k_users = cfg.num_raus, cfg.num_users
    n_r, n_u = cfg.rau_antennas, cfg.user_antennas
    g_blocks = [complex_gaussian(rng, (m * n_r, n_u)) for _ in range(k_users)]

    gains_db = None
    if cfg.channel_model is ChannelModel.PER_RAU_LARGE_SCALE:
        gains_db = rng.normal(0.0, cfg.large_scale_std_db, size=(m, k_users))
        # E[10**(X/10)] for X ~ N(0, s^2) in dB
        s = cfg.large_scale_std_db * np.log(10.0) / 10.0
        power = 10.0 ** (gains_db / 10.0) / np.exp(0.5 * s * s)
        amplitude = np.repeat(np.sqrt(power), n_r, axis=0)
        g_blocks = [g * amplitude[:, [k]] for k, g in enumerate(g_blocks)]

    precoders = [build_precoder(g, n_ri, cfg.precoder_mode)
                 for g, n_ri in zip(g_blocks, cfg.streams)]
    return ChannelRealization(g_blocks, precoders, n_r, gains_db)


def build_precoder(G_k: np.ndarray, n_streams: int,
                   mode: PrecoderMode = PrecoderMode.COLUMNS) -> np.ndarray:
    r"""Orthonormal ``N_U x N_RI,k`` precoder.

    Args:
        G_k (np.ndarray): User channel, ``N_U`` columns.
        n_streams (int): Stream count ``N_RI,k <= N_U``.
        mode (PrecoderMode): ``columns`` selects the first ``N_RI,k`` columns
            of the identity, ``right_singular`` the dominant right singular
            vectors of ``G_k``.

    Raises:
        DimensionException: If ``n_streams`` exceeds ``N_U``.
        NumericsException: If ``G_k`` has rank below ``n_streams`` in
            ``right_singular`` mode.
    """
    n_u = G_k.shape[1]
    if not 1 <= n_streams <= n_u:
        raise DimensionException(f"{n_streams} streams for {n_u} transmit antennas",
                                 {"streams": n_streams, "antennas": n_u})
    if mode is PrecoderMode.COLUMNS:
        return np.eye(n_u, n_streams, dtype=np.complex128)
    res = svd(G_k)
    if res.rank < n_streams:
        raise NumericsException(
            f"channel rank {res.rank} below the {n_streams} requested streams",
            {"rank": res.rank, "streams": n_streams},
        )
    return res.Vh[:n_streams].conj().T


def interleaver_for(cfg: SystemConfig, user: int) -> Interleaver:
    r"""The fixed interleaver of one user, derived from ``(seed, user)``."""
    state = np.random.SeedSequence((cfg.seed, user)).generate_state(1)[0]
    return Interleaver(cfg.coded_bits_per_user[user], int(state))


def system_code(cfg: SystemConfig) -> LdpcCode:
    return code_for(cfg.code_rate, cfg.code_alist)


def codewords_per_user(cfg: SystemConfig, code: LdpcCode) -> List[int]:
    counts = []
    for k, bits in enumerate(cfg.coded_bits_per_user):
        if bits % code.n:
            raise DimensionException(
                f"user {k}: {bits} coded bits do not hold whole codewords of length {code.n}",
                {"user": k, "coded_bits": bits, "n": code.n},
            )
        counts.append(bits // code.n)
    return counts


def random_payload(cfg: SystemConfig, rng: np.random.Generator,
                   code: Optional[LdpcCode] = None) -> List[np.ndarray]:
    """Uniform info bits, one array of ``codewords * k`` bits per user."""
    code = code or system_code(cfg)
    return [rng.integers(0, 2, size=n_cw * code.k, dtype=np.int8)
            for n_cw in codewords_per_user(cfg, code)]


def transmit(cfg: SystemConfig, chan: ChannelRealization, payload: Sequence[np.ndarray],
             rng: np.random.Generator, noise_var: Optional[float] = None) -> TransmitBlock:
    r"""Encode, interleave, modulate, precode and superpose all users.

    ``y = sum_k G_k P_k S_k + sqrt(sigma2) * N`` with ``N`` i.i.d. CN(0, 1)
    drawn from ``rng``. Coded bits fill ``S_k`` stream by stream, symbol by
    symbol, ``M_c`` bits per symbol.

    Args:
        cfg (SystemConfig): Dimensions, modulation and code.
        chan (ChannelRealization): Channel and precoders.
        payload: Per-user info bits, ``codewords * k`` each.
        rng (np.random.Generator): Source of the noise draw.
        noise_var (float, optional): Overrides ``cfg.noise_var``; zero gives a
            noiseless block.

    Raises:
        DimensionException: If the payload or channel does not match ``cfg``.
    """
    if len(payload) != cfg.num_users or chan.num_users != cfg.num_users:
        raise DimensionException(
            f"{len(payload)} payloads and {chan.num_users} channels for {cfg.num_users} users",
            {"payloads": len(payload), "channels": chan.num_users, "users": cfg.num_users},
        )
    code = system_code(cfg)
    constellation = get_constellation(cfg.bits_per_symbol)
    n_cws = codewords_per_user(cfg, code)

    info_bits, codewords, coded_bits, symbols = [], [], [], []
    noiseless = np.zeros((chan.num_rx, cfg.block_length), dtype=np.complex128)
    for k, (bits, n_cw) in enumerate(zip(payload, n_cws)):
        bits = np.asarray(bits, dtype=np.int8).reshape(-1)
        if bits.size != n_cw * code.k:
            raise DimensionException(
                f"user {k}: payload of {bits.size} bits, expected {n_cw * code.k}",
                {"user": k, "got": int(bits.size), "expected": n_cw * code.k},
            )
        cw = code.encode(bits.reshape(n_cw, code.k))
        interleaved = interleaver_for(cfg, k).interleave(cw.reshape(-1))
        s_k = constellation.modulate(interleaved).reshape(cfg.streams[k], cfg.block_length)
        noiseless += chan.H[k] @ s_k

        info_bits.append(bits)
        codewords.append(cw)
        coded_bits.append(interleaved)
        symbols.append(s_k)

    sigma2 = cfg.noise_var if noise_var is None else float(noise_var)
    unit_noise = complex_gaussian(rng, noiseless.shape)
    logger.debug(f"transmitted block: {cfg.num_users} users, sigma2={sigma2:.4g}")
    return TransmitBlock(info_bits, codewords, coded_bits, symbols,
                         noiseless, unit_noise, sigma2)


def estimate_channel(chan: ChannelRealization, error_variance: float,
                     rng: np.random.Generator) -> ChannelRealization:
    r"""Receiver-side channel knowledge ``G_k + sqrt(eps) * E_k``.

    With ``error_variance == 0`` the true realization is returned and no
    random numbers are consumed.
    """
    if error_variance <= 0:
        return chan
    scale = np.sqrt(error_variance)
    return chan.with_channels([g + scale * complex_gaussian(rng, g.shape)
                               for g in chan.G_blocks])
