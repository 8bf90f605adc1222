r"""Dense complex-matrix primitives.

Every routine is a pure function of its inputs. Matrices are 2-D
``complex128`` arrays; :func:`as_complex_matrix` is the single gate that
checks shape and finiteness before anything else touches the data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from loguru import logger

from dmimo.exceptions import DimensionException, NumericsException

ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-10
PD_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class SvdResult:
    r"""Full singular value decomposition ``A = U diag(S) Vh``.

    ``U`` is square (all left singular vectors, the null-space block
    included) and ``S`` is sorted in descending order.
    """
    U: ComplexMatrix
    S: np.ndarray
    Vh: ComplexMatrix
    rank: int


@dataclass(frozen=True)
class EvdResult:
    r"""Eigendecomposition ``A = Q diag(lam) Q^H`` of a Hermitian matrix.

    Eigenvalues are real and ascending; ``Q`` is unitary so its inverse is
    its conjugate transpose.
    """
    Q: ComplexMatrix
    lam: np.ndarray


def as_complex_matrix(a, name: str = "matrix") -> ComplexMatrix:
    r"""Validate and convert ``a`` into a finite 2-D complex128 array.

    Args:
        a: Array-like input. Scalars and vectors are promoted to 1x1 and
            column matrices.
        name (str): Operand name used in error messages.

    Returns:
        ComplexMatrix: A ``complex128`` array with at least one row and
            one column.

    Raises:
        DimensionException: If the input has more than two dimensions or
            an empty axis.
        NumericsException: If any entry is NaN or infinite.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim > 2:
        raise DimensionException(f"{name} must be 2-D, got shape {m.shape}",
                                 {"name": name, "shape": m.shape})
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionException(f"{name} has an empty axis: {m.shape}",
                                 {"name": name, "shape": m.shape})
    if not np.all(np.isfinite(m)):
        raise NumericsException(f"{name} contains NaN or Inf",
                                {"name": name, "shape": m.shape})
    return m


def hermitian_part(a: ComplexMatrix) -> ComplexMatrix:
    """(A + A^H) / 2."""
    return 0.5 * (a + a.conj().T)


def default_rank_tol(shape, s_max: float) -> float:
    return max(shape) * np.finfo(np.float64).eps * s_max


def svd(a, rank_tol: Optional[float] = None) -> SvdResult:
    r"""Full SVD with a numerical rank.

    Args:
        a: Finite complex matrix.
        rank_tol (float, optional): Singular values above this count toward
            the rank. Defaults to ``max(rows, cols) * eps * S[0]``.

    Returns:
        SvdResult: Square ``U`` and ``Vh``, descending ``S`` and the rank.

    Raises:
        NumericsException: If neither LAPACK driver converges.
    """
    a = as_complex_matrix(a, "svd input")
    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.warning(f"gesdd did not converge for shape {a.shape}, retrying with gesvd")
        try:
            u, s, vh = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")
        except np.linalg.LinAlgError as e:
            raise NumericsException(
                f"SVD did not converge for a {a.shape[0]}x{a.shape[1]} matrix",
                {"shape": a.shape},
            ) from e

    s_max = float(s[0]) if s.size else 0.0
    tol = default_rank_tol(a.shape, s_max) if rank_tol is None else rank_tol
    rank = int(np.count_nonzero(s > tol))
    return SvdResult(U=u, S=s, Vh=vh, rank=rank)


def hermitian_evd(a) -> EvdResult:
    r"""Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(A + A^H)/2`` before factorization so the
    eigenvalues are exactly real and ``Q`` is unitary.

    Raises:
        DimensionException: If ``a`` is not square.
        NumericsException: If ``a`` is not Hermitian within tolerance or
            the solver fails.
    """
    a = as_complex_matrix(a, "evd input")
    n, m = a.shape
    if n != m:
        raise DimensionException(f"EVD needs a square matrix, got {a.shape}",
                                 {"shape": a.shape})
    scale = max(np.linalg.norm(a), 1.0)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > HERMITIAN_TOL * scale:
        raise NumericsException(
            f"matrix is not Hermitian: ||A - A^H||_F = {asym:.3e}",
            {"shape": a.shape, "asymmetry": float(asym)},
        )
    try:
        lam, q = scipy.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as e:
        raise NumericsException(f"EVD did not converge for a {n}x{n} matrix",
                                {"shape": a.shape}) from e
    return EvdResult(Q=q, lam=lam)


def hermitian_solve(a, b) -> ComplexMatrix:
    r"""Solve ``A X = B`` for Hermitian positive definite ``A``.

    Uses a Cholesky factorization; no inverse is formed.

    Args:
        a: Hermitian positive definite ``n x n`` matrix.
        b: Right-hand side with ``n`` rows.

    Returns:
        ComplexMatrix: ``X`` with the shape of ``b``.

    Raises:
        DimensionException: On shape mismatch.
        NumericsException: If ``A`` is singular or indefinite; ``details``
            names the failing pivot.
    """
    a = as_complex_matrix(a, "solve lhs")
    b = as_complex_matrix(b, "solve rhs")
    n = a.shape[0]
    if a.shape[1] != n or b.shape[0] != n:
        raise DimensionException(
            f"cannot solve {a.shape} system with right-hand side {b.shape}",
            {"lhs": a.shape, "rhs": b.shape},
        )
    floor = PD_PIVOT_TOL * float(np.real(np.trace(a))) / n
    try:
        c, lower = scipy.linalg.cho_factor(hermitian_part(a), lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NumericsException("matrix is not positive definite",
                                {"shape": a.shape, "reason": str(e)}) from e
    pivots = np.abs(np.diag(c)) ** 2
    worst = int(np.argmin(pivots))
    if floor <= 0 or pivots[worst] <= floor:
        raise NumericsException(
            f"near-zero pivot {pivots[worst]:.3e} at index {worst}",
            {"shape": a.shape, "pivot_index": worst, "pivot": float(pivots[worst])},
        )
    return scipy.linalg.cho_solve((c, lower), b, check_finite=False)
