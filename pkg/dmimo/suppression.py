r"""Uplink interference suppression by block diagonalization.

For user ``k`` the rows of ``W_k`` span part of the left null space of the
interferer channel ``G_[k] = [G_1 .. G_{k-1} G_{k+1} .. G_K]``, so
``W_k G_l = 0`` for every ``l != k`` and the K-user reception splits into
K single-user problems ``y~_k = W_k y = H~_k s_k + n~_k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger

from dmimo.channel import ChannelRealization
from dmimo.exceptions import DimensionException, NullSpaceException, NumericsException
from dmimo.numerics import hermitian_part, svd
from dmimo.types import RowSelection


@dataclass
class SuppressionSet:
    W_per_user: List[np.ndarray]
    H_eff: List[np.ndarray]
    Sigma: List[np.ndarray]
    residual_leakage: np.ndarray

    @property
    def num_users(self) -> int:
        return len(self.W_per_user)


def null_space_rows(chan: ChannelRealization, user: int, n_rows: int,
                    row_selection: RowSelection = RowSelection.FIRST,
                    rng: Optional[np.random.Generator] = None) -> np.ndarray:
    r"""``n_rows`` rows of ``(U_k^(0))^H`` for one user.

    Raises:
        NullSpaceException: If fewer than ``n_rows`` null-space dimensions remain.
    """
    total = chan.num_rx
    interferers = [g for l, g in enumerate(chan.G_blocks) if l != user]
    if interferers:
        res = svd(np.hstack(interferers))
        rank = res.rank
        basis = res.U[:, rank:]
    else:
        rank = 0
        basis = np.eye(total, dtype=np.complex128)
    available = basis.shape[1]
    if available < n_rows:
        raise NullSpaceException(user, rank, available, n_rows)

    if row_selection is RowSelection.RANDOM:
        rng = rng if rng is not None else np.random.default_rng()
        picked = np.sort(rng.choice(available, size=n_rows, replace=False))
    else:
        picked = np.arange(n_rows)
    return basis[:, picked].conj().T


def noise_covariance(chan: ChannelRealization, W_k: np.ndarray, sigma2: float,
                     user: int) -> np.ndarray:
    r"""``W_k (sum_{l != k} H_l H_l^H) W_k^H + sigma2 I``, Hermitian-symmetrized.

    Raises:
        NumericsException: If ``sigma2 <= 0``.
        DimensionException: If ``W_k`` does not act on the stacked receive antennas.
    """
    if sigma2 <= 0:
        raise NumericsException(f"noise variance must be positive, got {sigma2}",
                                {"sigma2": sigma2})
    if W_k.shape[1] != chan.num_rx:
        raise DimensionException(
            f"W_k has {W_k.shape[1]} columns, the array has {chan.num_rx} antennas",
            {"W": W_k.shape, "rx": chan.num_rx},
        )
    n = W_k.shape[0]
    interference = np.zeros((n, n), dtype=np.complex128)
    for l, h in enumerate(chan.H):
        if l != user:
            wh = W_k @ h
            interference += wh @ wh.conj().T
    return hermitian_part(interference + sigma2 * np.eye(n))


def build_suppression(chan: ChannelRealization, row_selection: RowSelection = RowSelection.FIRST,
                      sigma2: float = 1.0, n_rows: Optional[int] = None,
                      seed: int = 0) -> SuppressionSet:
    r"""Combiner, effective channel and noise covariance for every user.

    Args:
        chan (ChannelRealization): Channel known at the receiver.
        row_selection (RowSelection): ``first`` takes the leading null-space
            rows, ``random`` draws them from a generator seeded by ``seed``.
        sigma2 (float): Noise variance.
        n_rows (int, optional): Rows per user, ``chan.rau_antennas`` (N_R)
            by default.
        seed (int): Seed of the random row selection.
    """
    k_users = chan.num_users
    n_rows = chan.rau_antennas if n_rows is None else n_rows
    rng = np.random.default_rng(seed) if row_selection is RowSelection.RANDOM else None

    w_list, h_list, sigma_list = [], [], []
    leakage = np.zeros(k_users)
    for k in range(k_users):
        w = null_space_rows(chan, k, n_rows, row_selection, rng)
        w_list.append(w)
        h_list.append(w @ chan.H[k])
        sigma_list.append(noise_covariance(chan, w, sigma2, k))
        others = [np.linalg.norm(w @ g) for l, g in enumerate(chan.G_blocks) if l != k]
        leakage[k] = max(others, default=0.0)
    logger.debug(f"suppression built for {k_users} users, max leakage {leakage.max():.3e}")
    return SuppressionSet(w_list, h_list, sigma_list, leakage)


def apply_suppression(W_k: np.ndarray, y: np.ndarray) -> np.ndarray:
    r"""``y~_k = W_k y``.

    Raises:
        DimensionException: If the column count of ``W_k`` differs from the row count of ``y``.
    """
    y = np.asarray(y)
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if W_k.shape[1] != y.shape[0]:
        raise DimensionException(
            f"cannot apply a {W_k.shape} combiner to a {y.shape} block",
            {"W": W_k.shape, "y": y.shape},
        )
    return W_k @ y
