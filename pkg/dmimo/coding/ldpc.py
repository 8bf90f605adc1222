r"""LDPC codes: alist I/O, systematic encoding and sum-product decoding.

LLRs at this interface follow the package convention
``L = ln P(1) / P(0)``; the decoder flips the sign internally so the
check-node rule is the textbook tanh rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

import galois
import numpy as np
import scipy.sparse as sp
from loguru import logger

from dmimo.coding.codes import BUILTIN_PROTOTYPES, RATE_TO_CODE, expand_prototype, parse_prototype
from dmimo.exceptions import CodingException, HarnessIOException

GF2 = galois.GF(2)

# phi(x) = -ln tanh(x/2) is its own inverse; the clip keeps it finite.
_PHI_MIN = 1e-12


def _phi(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, _PHI_MIN)
    return -np.log(np.tanh(0.5 * x))


@dataclass(frozen=True, eq=False)
class LdpcCode:
    r"""Binary LDPC code defined by a sparse parity-check matrix.

    The systematic encoder comes from the reduced row echelon form of
    ``H`` over GF(2): pivot columns carry parity bits, the remaining
    ``k`` columns (``info_positions``) carry the information bits
    verbatim.
    """

    name: str
    H: sp.csr_matrix
    n: int = field(init=False)
    k: int = field(init=False)
    info_positions: np.ndarray = field(init=False, repr=False)
    parity_positions: np.ndarray = field(init=False, repr=False)
    parity_map: np.ndarray = field(init=False, repr=False)
    edge_checks: np.ndarray = field(init=False, repr=False)
    edge_vars: np.ndarray = field(init=False, repr=False)
    check_incidence: sp.csr_matrix = field(init=False, repr=False)
    var_incidence: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        h = sp.csr_matrix(self.H, dtype=np.uint8)
        h.eliminate_zeros()
        object.__setattr__(self, "H", h)
        m, n = h.shape

        rref = np.asarray(GF2(h.toarray()).row_reduce(), dtype=np.uint8)
        nonzero_rows = rref[np.any(rref, axis=1)]
        pivots = np.argmax(nonzero_rows, axis=1)
        info = np.setdiff1d(np.arange(n), pivots)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", int(info.size))
        object.__setattr__(self, "info_positions", info)
        object.__setattr__(self, "parity_positions", pivots)
        object.__setattr__(self, "parity_map", nonzero_rows[:, info].astype(np.int64))

        checks, variables = h.nonzero()
        order = np.lexsort((variables, checks))
        checks, variables = checks[order], variables[order]
        e = checks.size
        ones = np.ones(e)
        object.__setattr__(self, "edge_checks", checks)
        object.__setattr__(self, "edge_vars", variables)
        object.__setattr__(self, "check_incidence",
                           sp.csr_matrix((ones, (checks, np.arange(e))), shape=(m, e)))
        object.__setattr__(self, "var_incidence",
                           sp.csr_matrix((ones, (variables, np.arange(e))), shape=(n, e)))
        logger.debug(f"LDPC code {self.name}: n={n}, k={self.k}, edges={e}")

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def num_edges(self) -> int:
        return int(self.edge_checks.size)

    def syndrome(self, bits) -> np.ndarray:
        r"""``H c mod 2`` for one codeword or a batch (rows)."""
        bits = np.asarray(bits, dtype=np.int64)
        return (bits @ self.H.T.astype(np.int64)) % 2 if bits.ndim == 2 \
            else (self.H.astype(np.int64) @ bits) % 2

    def is_codeword(self, bits) -> bool:
        return not np.any(self.syndrome(bits))

    def encode(self, info_bits) -> np.ndarray:
        r"""Systematic encoding.

        Args:
            info_bits: ``k`` bits, or an array of shape ``(B, k)``.

        Returns:
            np.ndarray: Codeword(s) of length ``n`` with ``H c = 0``.

        Raises:
            CodingException: If the last dimension is not ``k``.
        """
        u = np.asarray(info_bits, dtype=np.int64)
        if u.shape[-1] != self.k:
            raise CodingException(
                f"code {self.name} expects {self.k} info bits, got {u.shape[-1]}",
                {"expected": self.k, "got": int(u.shape[-1])},
            )
        c = np.zeros(u.shape[:-1] + (self.n,), dtype=np.int8)
        c[..., self.info_positions] = u
        c[..., self.parity_positions] = (u @ self.parity_map.T) % 2
        return c

    def extract_info(self, codeword) -> np.ndarray:
        return np.asarray(codeword)[..., self.info_positions]

    def to_alist(self, path: Union[str, Path]) -> None:
        write_alist(self.H, path)

    @classmethod
    def from_alist(cls, path: Union[str, Path], name: Optional[str] = None) -> "LdpcCode":
        return cls(name or Path(path).stem, read_alist(path))


@dataclass
class DecodeResult:
    hard_bits: np.ndarray
    info_bits: np.ndarray
    posterior_llrs: np.ndarray
    extrinsic_llrs: np.ndarray
    syndrome_ok: np.ndarray
    iterations: np.ndarray


def decode_siso(code: LdpcCode, prior_llrs, max_bp_iters: int = 25) -> DecodeResult:
    r"""Flooding sum-product decoding with extrinsic output.

    Decoding stops for a codeword as soon as its hard decision satisfies
    every parity check (checked after each iteration, so at least one
    iteration always runs). Converged codewords are frozen while the rest
    of the batch continues.

    Args:
        code (LdpcCode): The code.
        prior_llrs: Length-``n`` LLRs or a ``(B, n)`` batch, convention
            ``ln P(1)/P(0)``.
        max_bp_iters (int): Iteration cap.

    Returns:
        DecodeResult: Hard codeword bits and info bits from the posterior
            signs, posterior and extrinsic (posterior minus prior) LLRs,
            per-codeword syndrome flag and iteration count.
    """
    prior = np.asarray(prior_llrs, dtype=np.float64)
    single = prior.ndim == 1
    prior = np.atleast_2d(prior)
    if prior.shape[1] != code.n:
        raise CodingException(
            f"code {code.name} expects {code.n} LLRs per codeword, got {prior.shape[1]}",
            {"expected": code.n, "got": int(prior.shape[1])},
        )
    batch = prior.shape[0]
    # internal convention ln P(0)/P(1)
    lam = -prior
    ct = code.check_incidence.T.tocsr()
    vt = code.var_incidence.T.tocsr()
    h_t = code.H.T.astype(np.int64)

    v2c = lam[:, code.edge_vars]
    post = lam.copy()
    active = np.ones(batch, dtype=bool)
    iterations = np.zeros(batch, dtype=np.int64)

    for _ in range(max(1, max_bp_iters)):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        msg = v2c[idx]
        phi_e = _phi(np.abs(msg))
        neg_e = (msg < 0).astype(np.float64)
        phi_sum = np.asarray(phi_e @ ct)
        neg_sum = np.asarray(neg_e @ ct)
        mag = _phi(phi_sum[:, code.edge_checks] - phi_e)
        parity = (np.rint(neg_sum[:, code.edge_checks] - neg_e).astype(np.int64)) & 1
        c2v = np.where(parity == 1, -mag, mag)

        total = lam[idx] + np.asarray(c2v @ vt)
        post[idx] = total
        v2c[idx] = total[:, code.edge_vars] - c2v
        iterations[idx] += 1

        hard = (total < 0).astype(np.int64)
        ok = ~np.any((hard @ h_t) % 2, axis=1)
        active[idx[ok]] = False

    posterior = -post
    extrinsic = posterior - prior
    hard_bits = (posterior > 0).astype(np.int8)
    syndrome_ok = ~np.any(code.syndrome(hard_bits), axis=1)
    result = DecodeResult(
        hard_bits=hard_bits,
        info_bits=code.extract_info(hard_bits),
        posterior_llrs=posterior,
        extrinsic_llrs=extrinsic,
        syndrome_ok=syndrome_ok,
        iterations=iterations,
    )
    if single:
        result = DecodeResult(*(getattr(result, f)[0] for f in
                                ("hard_bits", "info_bits", "posterior_llrs",
                                 "extrinsic_llrs", "syndrome_ok", "iterations")))
    return result


def read_alist(path: Union[str, Path]) -> sp.csr_matrix:
    r"""Parse an alist file into a sparse parity-check matrix.

    Format: ``n m``; ``max_col_deg max_row_deg``; ``n`` column degrees;
    ``m`` row degrees; ``n`` lines of 1-indexed row indices per column;
    ``m`` lines of 1-indexed column indices per row. Zero padding is
    ignored. Column and row lists must agree.

    Raises:
        HarnessIOException: If the file cannot be read.
        CodingException: If the content is malformed.
    """
    path = Path(path)
    try:
        lines = [ln.split() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except OSError as e:
        raise HarnessIOException(f"cannot read alist file ({e.strerror})", str(path)) from e
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        col_deg = [int(v) for v in lines[2]]
        row_deg = [int(v) for v in lines[3]]
        col_lists = [[int(v) for v in ln if int(v) != 0] for ln in lines[4:4 + n]]
        row_lists = [[int(v) for v in ln if int(v) != 0] for ln in lines[4 + n:4 + n + m]]
    except (IndexError, ValueError) as e:
        raise CodingException(f"malformed alist file {path}: {e}", {"path": str(path)}) from e

    if len(col_deg) != n or len(row_deg) != m or len(col_lists) != n:
        raise CodingException(f"alist header of {path} does not match its body",
                              {"path": str(path), "n": n, "m": m})
    rows, cols = [], []
    for j, entries in enumerate(col_lists):
        if len(entries) != col_deg[j]:
            raise CodingException(f"column {j + 1} of {path} lists {len(entries)} entries, "
                                  f"degree says {col_deg[j]}", {"path": str(path)})
        rows.extend(r - 1 for r in entries)
        cols.extend([j] * len(entries))
    h = sp.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(m, n))
    if row_lists:
        check = {(i, c - 1) for i, entries in enumerate(row_lists) for c in entries}
        if check != set(zip(rows, cols)):
            raise CodingException(f"row and column lists of {path} disagree", {"path": str(path)})
    return h


def write_alist(h: sp.spmatrix, path: Union[str, Path]) -> None:
    h = sp.csc_matrix(h)
    m, n = h.shape
    col_lists = [h.indices[h.indptr[j]:h.indptr[j + 1]] + 1 for j in range(n)]
    hr = sp.csr_matrix(h)
    row_lists = [hr.indices[hr.indptr[i]:hr.indptr[i + 1]] + 1 for i in range(m)]
    max_col = max(len(c) for c in col_lists)
    max_row = max(len(r) for r in row_lists)

    def pad(entries, width):
        return " ".join(str(v) for v in list(entries) + [0] * (width - len(entries)))

    out = [f"{n} {m}", f"{max_col} {max_row}",
           " ".join(str(len(c)) for c in col_lists),
           " ".join(str(len(r)) for r in row_lists)]
    out += [pad(sorted(c), max_col) for c in col_lists]
    out += [pad(sorted(r), max_row) for r in row_lists]
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(out) + "\n", encoding="utf-8")
    except OSError as e:
        raise HarnessIOException(f"cannot write alist file ({e.strerror})", str(path)) from e


@lru_cache(maxsize=None)
def builtin_code(name: str) -> LdpcCode:
    try:
        proto = parse_prototype(BUILTIN_PROTOTYPES[name])
    except KeyError:
        raise CodingException(f"unknown code '{name}', choose from {', '.join(BUILTIN_PROTOTYPES)}",
                              {"code": name})
    return LdpcCode(name, expand_prototype(proto))


@lru_cache(maxsize=None)
def _alist_code(path: str) -> LdpcCode:
    return LdpcCode.from_alist(path)


def code_for(code_rate: str, alist_path: Optional[str] = None) -> LdpcCode:
    r"""Resolve the code of a configuration: an alist file if given, else the built-in code for the rate."""
    if alist_path:
        return _alist_code(str(alist_path))
    try:
        return builtin_code(RATE_TO_CODE[code_rate])
    except KeyError:
        raise CodingException(f"no built-in code for rate {code_rate}", {"rate": code_rate})


def encode(code: LdpcCode, info_bits) -> np.ndarray:
    return code.encode(info_bits)
