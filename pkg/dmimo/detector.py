r"""Block-wise MMSE detection with soft interference cancellation.

With ``F = H^H Sigma^{-1}`` and ``A = F H`` the estimate of column ``l`` is

    s_hat = Omega^{-1} (A V_l + I)^{-1} F (y_l - H s_bar_l) + s_bar_l

where ``V_l`` holds the prior symbol variances and
``Omega = diag((A V_l + I)^{-1} A)`` makes the own-symbol gain one.
Replacing ``V_l`` by ``nu_l I`` lets a single eigendecomposition
``A = Q diag(lam) Q^H`` serve every column of the block:
``(nu A + I)^{-1} = Q diag(1 / (nu lam + 1)) Q^H``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from dmimo.exceptions import DimensionException, NumericsException
from dmimo.numerics import as_complex_matrix, hermitian_evd, hermitian_part, hermitian_solve
from dmimo.types import RhoMode

GAMMA_MIN = 1e-6
GAMMA_MAX = 1e6
# rho below this is treated as a dead stream (zero channel)
_RHO_FLOOR = 1e-300


@dataclass
class DetectorState:
    r"""Per-block quantities shared by every column and iteration.

    ``inversion_count`` counts ``N_RI x N_RI`` factorizations: one for the
    eigendecomposition, one per solve on the naive path.
    """

    H_eff: np.ndarray
    F: np.ndarray
    A: np.ndarray
    Q: np.ndarray
    lam: np.ndarray
    inversion_count: int = 0

    @property
    def n_streams(self) -> int:
        return self.A.shape[0]

    @property
    def q_power(self) -> np.ndarray:
        """``|Q[j, m]|**2``."""
        return np.abs(self.Q) ** 2


@dataclass
class SoftBlock:
    r"""Prior means ``s_bar`` and variances ``v``, both ``(N_RI, N_L)``."""

    s_bar: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if self.s_bar.shape != self.v.shape:
            raise DimensionException(
                f"soft means {self.s_bar.shape} and variances {self.v.shape} differ",
                {"s_bar": self.s_bar.shape, "v": self.v.shape},
            )

    @property
    def nu(self) -> np.ndarray:
        """Per-column average variance."""
        return self.v.mean(axis=0)

    @classmethod
    def initial(cls, n_streams: int, block_length: int) -> "SoftBlock":
        """No prior knowledge: zero means, unit variances."""
        return cls(np.zeros((n_streams, block_length), dtype=np.complex128),
                   np.ones((n_streams, block_length)))


def prepare(H_eff, Sigma) -> DetectorState:
    r"""Precompute ``F``, ``A`` and the eigendecomposition of ``A``.

    Raises:
        DimensionException: If ``Sigma`` is not ``N_R x N_R`` for the
            ``N_R x N_RI`` effective channel, or the channel is wide.
        NumericsException: If ``Sigma`` is not positive definite.
    """
    h = as_complex_matrix(H_eff, "effective channel")
    sigma = as_complex_matrix(Sigma, "noise covariance")
    n_r, n_ri = h.shape
    if sigma.shape != (n_r, n_r):
        raise DimensionException(
            f"noise covariance {sigma.shape} does not match a {h.shape} effective channel",
            {"H_eff": h.shape, "Sigma": sigma.shape},
        )
    if n_r < n_ri:
        raise DimensionException(f"effective channel {h.shape} is wider than tall",
                                 {"H_eff": h.shape})
    f = hermitian_solve(sigma, h).conj().T
    a = hermitian_part(f @ h)
    evd = hermitian_evd(a)
    return DetectorState(H_eff=h, F=f, A=a, Q=evd.Q, lam=evd.lam)


def compute_rho(state: DetectorState, nu) -> np.ndarray:
    r"""Unbiasing coefficients ``rho_j = [(nu A + I)^{-1} A]_{jj}``.

    Args:
        state (DetectorState): Prepared block.
        nu: Scalar or per-column vector of average variances.

    Returns:
        np.ndarray: ``(N_RI,)`` for a scalar ``nu``, ``(N_RI, N_L)`` for a vector.
    """
    nu_arr = np.asarray(nu, dtype=np.float64)
    lam = np.maximum(state.lam, 0.0)
    # (N_L, N_RI)
    shrink = lam / (np.multiply.outer(np.atleast_1d(nu_arr), lam) + 1.0)
    rho = state.q_power @ shrink.T
    return rho[:, 0] if nu_arr.ndim == 0 else rho


def _residual(state: DetectorState, y_tilde: np.ndarray, soft: SoftBlock) -> np.ndarray:
    if y_tilde.shape != (state.H_eff.shape[0], soft.s_bar.shape[1]):
        raise DimensionException(
            f"received block {y_tilde.shape} does not match {state.H_eff.shape[0]} rows "
            f"and {soft.s_bar.shape[1]} columns",
            {"y": y_tilde.shape, "H_eff": state.H_eff.shape, "s_bar": soft.s_bar.shape},
        )
    if soft.s_bar.shape[0] != state.n_streams:
        raise DimensionException(
            f"{soft.s_bar.shape[0]} prior streams for a {state.n_streams}-stream detector",
            {"s_bar": soft.s_bar.shape, "streams": state.n_streams},
        )
    return state.F @ (y_tilde - state.H_eff @ soft.s_bar)


def _unbias(x: np.ndarray, rho: np.ndarray, s_bar: np.ndarray) -> np.ndarray:
    out = np.divide(x, rho, out=np.zeros_like(x), where=rho > _RHO_FLOOR)
    return out + s_bar


def isdic_detect_evd(state: DetectorState, y_tilde, soft: SoftBlock,
                     rho_mode: RhoMode = RhoMode.PER_COLUMN) -> np.ndarray:
    r"""Soft interference cancellation for a whole block from one eigendecomposition.

    Variances enter through the per-column average ``nu_l`` only.

    Args:
        state (DetectorState): Prepared block.
        y_tilde: Suppressed observation ``(N_R, N_L)``.
        soft (SoftBlock): Priors.
        rho_mode (RhoMode): ``per_column`` evaluates ``Omega`` from each
            ``nu_l``; ``per_block`` uses the block-average variance for all
            columns.

    Returns:
        np.ndarray: Unbiased estimates ``(N_RI, N_L)``.
    """
    y_tilde = np.asarray(y_tilde, dtype=np.complex128)
    z = _residual(state, y_tilde, soft)
    nu = soft.nu
    lam = np.maximum(state.lam, 0.0)

    # Q diag(1 / (nu_l lam + 1)) Q^H applied column by column
    weights = 1.0 / (np.multiply.outer(lam, nu) + 1.0)
    filtered = state.Q @ (weights * (state.Q.conj().T @ z))
    rho = compute_rho(state, nu.mean() if rho_mode is RhoMode.PER_BLOCK else nu)
    if rho.ndim == 1:
        rho = rho[:, None]
    state.inversion_count += 1
    return _unbias(filtered, rho, soft.s_bar)


def isdic_detect_naive(state: DetectorState, y_tilde, soft: SoftBlock,
                       return_snr: bool = False):
    r"""Reference detector: one ``N_RI x N_RI`` solve per column with the full ``V_l``.

    With ``return_snr=True`` also returns the per-stream effective SNR
    ``rho_j / (1 - rho_j v_j)`` of every column, where ``rho_j`` comes from
    that column's own solve.
    """
    y_tilde = np.asarray(y_tilde, dtype=np.complex128)
    z = _residual(state, y_tilde, soft)
    n_ri, n_l = soft.s_bar.shape
    eye = np.eye(n_ri)
    out = np.empty((n_ri, n_l), dtype=np.complex128)
    rho = np.empty((n_ri, n_l))
    for l in range(n_l):
        lhs = state.A * soft.v[:, l][None, :] + eye
        rhs = np.column_stack([state.A, z[:, l]])
        try:
            sol = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as e:
            raise NumericsException(f"singular filter matrix at column {l}",
                                    {"column": l}) from e
        rho[:, l] = np.real(np.diag(sol[:, :n_ri]))
        out[:, l] = _unbias(sol[:, n_ri], rho[:, l], soft.s_bar[:, l])
        state.inversion_count += 1
    if not return_snr:
        return out
    return out, _snr_from_rho(rho, soft.v)


def lmmse_detect(state: DetectorState, y_tilde) -> np.ndarray:
    r"""Biased linear MMSE estimate ``(A + I)^{-1} F y``."""
    y_tilde = np.asarray(y_tilde, dtype=np.complex128)
    if y_tilde.ndim == 1:
        y_tilde = y_tilde[:, None]
    if y_tilde.shape[0] != state.H_eff.shape[0]:
        raise DimensionException(
            f"received block {y_tilde.shape} does not match {state.H_eff.shape[0]} rows",
            {"y": y_tilde.shape, "H_eff": state.H_eff.shape},
        )
    state.inversion_count += 1
    return hermitian_solve(state.A + np.eye(state.n_streams), state.F @ y_tilde)


def _clamp_snr(gamma: np.ndarray) -> np.ndarray:
    clipped = np.clip(gamma, GAMMA_MIN, GAMMA_MAX)
    if np.any(clipped != gamma):
        logger.debug(f"post-detection SNR clamped on {np.count_nonzero(clipped != gamma)} entries")
    return clipped


def _snr_from_rho(rho: np.ndarray, var) -> np.ndarray:
    denom = 1.0 - rho * var
    gamma = np.divide(rho, denom, out=np.full_like(rho, GAMMA_MAX), where=denom > 0)
    return _clamp_snr(gamma)


def post_detection_snr(state: DetectorState, nu) -> np.ndarray:
    r"""Effective SNR ``gamma_j = rho_j / (1 - rho_j nu)`` of the unbiased output.

    Clamped to ``[GAMMA_MIN, GAMMA_MAX]``; the shape follows :func:`compute_rho`.
    """
    nu_arr = np.asarray(nu, dtype=np.float64)
    rho = compute_rho(state, nu_arr)
    return _snr_from_rho(rho, nu_arr if nu_arr.ndim == 0 else nu_arr[None, :])


def stream_snr(state: DetectorState, soft: SoftBlock) -> np.ndarray:
    r"""Per-stream effective SNR of :func:`isdic_detect_evd` (``per_column``) output.

    The filter of column ``l`` is built for ``nu_l I`` but the residual
    interference on stream ``j`` is set by the other streams' own variances.
    With ``G_l = (nu_l A + I)^{-1} A`` the unbiased error variance is

        1 / gamma_j = (sum_{i != j} |G_ji|^2 v_i + [(nu_l A + I)^{-1} A (nu_l A + I)^{-1}]_jj) / rho_j^2

    which reduces to :func:`post_detection_snr` when a column's variances
    are all equal.

    Returns:
        np.ndarray: ``(N_RI, N_L)``, clamped to ``[GAMMA_MIN, GAMMA_MAX]``.
    """
    lam = np.maximum(state.lam, 0.0)
    # (N_L, N_RI)
    w = 1.0 / (np.multiply.outer(soft.nu, lam) + 1.0)
    gain = np.einsum("jm,lm,im->lji", state.Q, w * lam, state.Q.conj())
    rho = np.real(np.einsum("ljj->jl", gain))
    cross = np.abs(gain) ** 2
    interference = np.einsum("lji,il->jl", cross, soft.v) - rho ** 2 * soft.v
    noise = state.q_power @ (w ** 2 * lam).T
    err = np.maximum(interference, 0.0) + noise
    gamma = np.divide(rho ** 2, err, out=np.full_like(rho, GAMMA_MAX), where=err > 0)
    gamma[rho <= _RHO_FLOOR] = 0.0
    return _clamp_snr(gamma)
