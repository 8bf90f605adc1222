r"""Soft symbol statistics and soft demapping.

LLR sign convention: ``L = ln P(bit = 1) / P(bit = 0)``. A positive LLR
favours bit 1. Many codebases use the opposite sign; everything in this
package (demapper, LDPC decoder interface, soft statistics) uses this one.

The symbol prior is the product form

    P(d) = prod_i 1 / (1 + exp(-dt_i L_i)),  dt_i = +1 if d_i = 1 else -1

from which the prior mean and variance of a symbol follow by enumeration
over the constellation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from dmimo.softmaps.constellation import Constellation

DEFAULT_LLR_CLAMP = 30.0


@dataclass(frozen=True, eq=False)
class SigmoidLut:
    r"""Tabulated ``f(x) = 1 / (1 + exp(x))`` on a uniform grid.

    Linear interpolation between nodes; outside ``[-x_max, x_max]`` the
    value saturates to the edge node (1 on the left, 0 on the right up to
    ~1e-13). With ``step = 2**-6`` the interpolation error stays below 1e-5.
    """

    x_max: float = 30.0
    step: float = 2.0 ** -6
    grid: np.ndarray = field(init=False, repr=False)
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(round(2 * self.x_max / self.step)) + 1
        grid = np.linspace(-self.x_max, self.x_max, n)
        table = 0.5 * (1.0 - np.tanh(0.5 * grid))
        grid.setflags(write=False)
        table.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "table", table)

    def __call__(self, x) -> np.ndarray:
        return np.interp(x, self.grid, self.table)


@lru_cache(maxsize=None)
def default_lut() -> SigmoidLut:
    return SigmoidLut()


@dataclass
class LlrBlock:
    r"""Per-stream, per-symbol, per-bit LLRs of one user, shape ``(N_RI, N_L, M_c)``."""

    values: np.ndarray
    clamp: float = DEFAULT_LLR_CLAMP

    def __post_init__(self):
        self.values = clamp_llrs(self.values, self.clamp)

    def flat(self) -> np.ndarray:
        r"""Bit stream order used by the modulator: stream-major, then symbol, then bit."""
        return self.values.reshape(-1)

    @classmethod
    def from_flat(cls, flat: np.ndarray, n_streams: int, block_length: int,
                  order_bits: int, clamp: float = DEFAULT_LLR_CLAMP) -> "LlrBlock":
        return cls(np.asarray(flat, dtype=np.float64).reshape(n_streams, block_length, order_bits),
                   clamp)


def clamp_llrs(llrs, clamp: float = DEFAULT_LLR_CLAMP) -> np.ndarray:
    llrs = np.nan_to_num(np.asarray(llrs, dtype=np.float64), nan=0.0,
                         posinf=clamp, neginf=-clamp)
    return np.clip(llrs, -clamp, clamp)


def _signed_bits(constellation: Constellation) -> np.ndarray:
    """dt matrix: +1 where the label bit is 1, -1 where it is 0."""
    return 2.0 * constellation.bits.astype(np.float64) - 1.0


def symbol_probabilities(llrs, constellation: Constellation,
                         lut: Optional[SigmoidLut] = None) -> np.ndarray:
    r"""Prior probability of every constellation label.

    Args:
        llrs: Array of shape ``(..., M_c)``.
        constellation (Constellation): Labeling to enumerate.
        lut (SigmoidLut, optional): Table for the per-bit factor. Exact
            exponentials are used when omitted.

    Returns:
        np.ndarray: Shape ``(..., 2**M_c)``; sums to one along the last axis.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    dt = _signed_bits(constellation)
    # (..., 1, M_c) * (2**M_c, M_c)
    arg = -dt * llrs[..., None, :]
    if lut is None:
        return np.exp(-np.sum(np.logaddexp(0.0, arg), axis=-1))
    return np.prod(lut(arg), axis=-1)


def symbol_prob(llrs, d, lut: Optional[SigmoidLut] = None) -> float:
    r"""P(d) for a single label ``d`` given per-bit LLRs."""
    llrs = np.asarray(llrs, dtype=np.float64)
    dt = 2.0 * np.asarray(d, dtype=np.float64) - 1.0
    arg = -dt * llrs
    if lut is None:
        return float(np.exp(-np.sum(np.logaddexp(0.0, arg))))
    return float(np.prod(lut(arg)))


def soft_symbol_stats(llrs, constellation: Constellation,
                      lut: Optional[SigmoidLut] = None) -> Tuple[np.ndarray, np.ndarray]:
    r"""Prior mean and variance of symbols from their bit LLRs.

    Args:
        llrs: Array of shape ``(..., M_c)``.
        constellation (Constellation): Symbol alphabet.
        lut (SigmoidLut, optional): Lookup table for the sigmoid factors.

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``mean`` (complex) and ``variance``
            (real, clipped to ``[0, 1]``), both of shape ``llrs.shape[:-1]``.
    """
    probs = symbol_probabilities(llrs, constellation, lut)
    points = constellation.points
    mean = probs @ points
    energy = probs @ (np.abs(points) ** 2)
    variance = np.clip(energy - np.abs(mean) ** 2, 0.0, 1.0)
    return mean, variance


def demap_soft(s_hat, gamma, constellation: Constellation, exact: bool = False,
               clamp: float = DEFAULT_LLR_CLAMP) -> np.ndarray:
    r"""Per-bit LLRs of unbiased detector outputs under a Gaussian model.

    ``s_hat = s + eta`` with ``Var(eta) = 1 / gamma``. The max-log form is

        L_i = gamma * (min_{d_i=0} |s_hat - a(d)|^2 - min_{d_i=1} |s_hat - a(d)|^2)

    and ``exact=True`` replaces the minima by log-sum-exp. No prior LLRs
    are subtracted.

    Args:
        s_hat: Complex array of any shape.
        gamma: Positive effective SNR, broadcastable to ``s_hat``.
        constellation (Constellation): Symbol alphabet.
        exact (bool): Use the log-sum-exp demapper. Defaults to False.
        clamp (float): Saturation bound of the output.

    Returns:
        np.ndarray: Shape ``s_hat.shape + (M_c,)``.
    """
    s_hat = np.asarray(s_hat, dtype=np.complex128)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=np.float64), s_hat.shape)
    dist = np.abs(s_hat[..., None] - constellation.points) ** 2
    one = constellation.bits.astype(bool)

    llrs = np.empty(s_hat.shape + (constellation.order_bits,))
    for i in range(constellation.order_bits):
        d1 = dist[..., one[:, i]]
        d0 = dist[..., ~one[:, i]]
        if exact:
            g = gamma[..., None]
            llrs[..., i] = logsumexp(-g * d1, axis=-1) - logsumexp(-g * d0, axis=-1)
        else:
            llrs[..., i] = gamma * (d0.min(axis=-1) - d1.min(axis=-1))
    return clamp_llrs(llrs, clamp)
