# -*- coding: utf-8 -*-
"""
Oracle suite runnable outside pytest.

Each check compares a fast path against a direct evaluation on random
instances and records the worst deviation. The detector under test can
be swapped, which is how the suite itself is checked against mutations.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from loguru import logger

from dmimo.channel import complex_gaussian, draw_channel
from dmimo.coding import BUILTIN_PROTOTYPES, builtin_code
from dmimo.configs import get_preset
from dmimo.detector import (
    SoftBlock,
    compute_rho,
    isdic_detect_evd,
    isdic_detect_naive,
    lmmse_detect,
    prepare,
)
from dmimo.exceptions import DimensionException, DmimoException
from dmimo.softmaps import SigmoidLut, get_constellation, soft_symbol_stats, symbol_probabilities
from dmimo.suppression import build_suppression


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float = 0.0
    tolerance: float = 0.0
    detail: str = ""

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "worst": self.worst,
                "tolerance": self.tolerance, "detail": self.detail}


@dataclass
class ConformanceReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def get(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


def _random_pd(rng, n):
    b = complex_gaussian(rng, (n, n))
    return b @ b.conj().T / n + 0.1 * np.eye(n)


def _random_hermitian_psd(rng, n):
    b = complex_gaussian(rng, (n, n))
    return b @ b.conj().T


def _bounded(name: str, worst: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(worst <= tol), float(worst), tol, detail)


def check_evd_vs_naive(rng, evd: Callable, instances: int = 200) -> CheckResult:
    worst = 0.0
    shapes = [(n_ri, n_r, n_l) for n_ri in (2, 4, 8) for n_r in (4, 8) for n_l in (8, 64)
              if n_r >= n_ri]
    for i in range(instances):
        n_ri, n_r, n_l = shapes[i % len(shapes)]
        h = complex_gaussian(rng, (n_r, n_ri))
        sigma = _random_pd(rng, n_r)
        y = complex_gaussian(rng, (n_r, n_l))
        s_bar = 0.5 * complex_gaussian(rng, (n_ri, n_l))
        v = np.broadcast_to(rng.uniform(0.0, 1.0, n_l), (n_ri, n_l)).copy()
        soft = SoftBlock(s_bar, v)
        fast = evd(prepare(h, sigma), y, soft)
        ref = isdic_detect_naive(prepare(h, sigma), y, soft)
        worst = max(worst, float(np.max(np.abs(fast - ref))))
    return _bounded("evd_vs_naive", worst, 1e-9, f"{instances} instances")


def check_first_iteration(rng, evd: Callable, instances: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(instances):
        n_ri, n_r, n_l = 4, 8, 16
        state = prepare(complex_gaussian(rng, (n_r, n_ri)), _random_pd(rng, n_r))
        y = complex_gaussian(rng, (n_r, n_l))
        unbiased = lmmse_detect(state, y) / compute_rho(state, 1.0)[:, None]
        out = evd(state, y, SoftBlock.initial(n_ri, n_l))
        worst = max(worst, float(np.max(np.abs(out - unbiased))))
    return _bounded("first_iteration_collapse", worst, 1e-10, f"{instances} instances")


def check_block_diagonalization(rng, instances: int = 100) -> List[CheckResult]:
    cfg = get_preset("desk")
    leak = orth = 0.0
    for _ in range(instances):
        chan = draw_channel(cfg, rng)
        supp = build_suppression(chan, cfg.row_selection, 1.0)
        for k, w in enumerate(supp.W_per_user):
            for l, g in enumerate(chan.G_blocks):
                if l != k:
                    leak = max(leak, float(np.linalg.norm(w @ g) / np.linalg.norm(g)))
            orth = max(orth, float(np.max(np.abs(w @ w.conj().T - np.eye(w.shape[0])))))
    return [
        _bounded("block_diagonal_leakage", leak, 1e-9, f"{instances} desk channels"),
        _bounded("combiner_orthonormal_rows", orth, 1e-10, f"{instances} desk channels"),
    ]


def check_inversion_counts(rng, evd: Callable) -> CheckResult:
    n_ri, n_r, n_l = 4, 8, 32
    h = complex_gaussian(rng, (n_r, n_ri))
    sigma = _random_pd(rng, n_r)
    y = complex_gaussian(rng, (n_r, n_l))
    soft = SoftBlock(np.zeros((n_ri, n_l), dtype=complex), rng.uniform(0, 1, (n_ri, n_l)))
    fast, slow = prepare(h, sigma), prepare(h, sigma)
    evd(fast, y, soft)
    isdic_detect_naive(slow, y, soft)
    ok = fast.inversion_count == 1 and slow.inversion_count == n_l
    return CheckResult("inversion_counts", ok,
                       detail=f"evd={fast.inversion_count}, naive={slow.inversion_count}, N_L={n_l}")


def _brute_force_stats(llrs: np.ndarray, order_bits: int):
    const = get_constellation(order_bits)
    p1 = 1.0 / (1.0 + np.exp(-llrs))
    mean, energy = 0j, 0.0
    for pattern in itertools.product((0, 1), repeat=order_bits):
        prob = 1.0
        for bit, p in zip(pattern, p1):
            prob *= p if bit else 1.0 - p
        a = const.point(pattern)
        mean += prob * a
        energy += prob * abs(a) ** 2
    return mean, energy - abs(mean) ** 2


def check_soft_statistics(rng, vectors: int = 1000) -> List[CheckResult]:
    exact_worst = lut_worst = sum_worst = 0.0
    lut = SigmoidLut()
    for order_bits in (2, 4, 6):
        const = get_constellation(order_bits)
        llrs = rng.uniform(-12.0, 12.0, (vectors, order_bits))
        mean, var = soft_symbol_stats(llrs, const)
        lut_mean, lut_var = soft_symbol_stats(llrs, const, lut)
        probs = symbol_probabilities(llrs, const)
        sum_worst = max(sum_worst, float(np.max(np.abs(probs.sum(axis=-1) - 1.0))))
        for i in range(vectors):
            ref_mean, ref_var = _brute_force_stats(llrs[i], order_bits)
            exact_worst = max(exact_worst, abs(mean[i] - ref_mean), abs(var[i] - ref_var))
            lut_worst = max(lut_worst, abs(lut_mean[i] - ref_mean), abs(lut_var[i] - ref_var))
    return [
        _bounded("soft_stats_enumeration", exact_worst, 1e-12),
        _bounded("soft_stats_lut", lut_worst, 1e-3),
        _bounded("symbol_probabilities_sum_to_one", sum_worst, 1e-9),
    ]


def check_unbiasedness(rng, instances: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(1, 9))
        a = _random_hermitian_psd(rng, n)
        nu = float(rng.uniform(0.0, 1.0))
        state = prepare(np.linalg.cholesky(a + 1e-9 * np.eye(n)).conj().T, np.eye(n))
        rho = compute_rho(state, nu)
        gain = np.linalg.solve(state.A * nu + np.eye(n), state.A)
        worst = max(worst, float(np.max(np.abs(np.real(np.diag(gain)) / rho - 1.0))))
    return _bounded("unbiasedness", worst, 1e-10, f"{instances} instances")


def check_dimension_guard() -> CheckResult:
    h = np.ones((4, 2), dtype=complex)
    try:
        prepare(h, np.eye(2))
    except DimensionException:
        return CheckResult("dimension_guard", True, detail="wrong-size covariance rejected")
    return CheckResult("dimension_guard", False, detail="2x2 covariance accepted for 4 rows")


def check_parity(rng, frames: int = 8) -> CheckResult:
    bad = []
    for name in BUILTIN_PROTOTYPES:
        code = builtin_code(name)
        words = code.encode(rng.integers(0, 2, (frames, code.k)))
        if np.any(code.syndrome(words)):
            bad.append(name)
    return CheckResult("ldpc_parity", not bad, detail=", ".join(bad) or "all codes")


def run_conformance(seed: int = 0, evd: Optional[Callable] = None,
                    emit: Optional[Callable[[CheckResult], None]] = None) -> ConformanceReport:
    r"""Run every check.

    Args:
        seed (int): Seed of the random instances.
        evd (Callable, optional): Replacement for :func:`isdic_detect_evd`.
        emit (Callable, optional): Called with each result as soon as it is known.
    """
    evd = evd or isdic_detect_evd
    rng = np.random.default_rng(seed)
    steps = [
        lambda: [check_evd_vs_naive(rng, evd)],
        lambda: [check_first_iteration(rng, evd)],
        lambda: check_block_diagonalization(rng),
        lambda: [check_inversion_counts(rng, evd)],
        lambda: check_soft_statistics(rng),
        lambda: [check_unbiasedness(rng)],
        lambda: [check_dimension_guard()],
        lambda: [check_parity(rng)],
    ]
    report = ConformanceReport()
    for step in steps:
        try:
            results = step()
        except DmimoException as e:
            results = [CheckResult(f"step_{len(report.checks)}", False, detail=str(e))]
        for result in results:
            report.checks.append(result)
            if emit:
                emit(result)
            log = logger.info if result.passed else logger.error
            log(f"{result.name}: {'PASS' if result.passed else 'FAIL'} {result.detail}")
    return report
