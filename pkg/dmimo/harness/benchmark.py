r"""Runtime scaling of the two detector paths against the block length."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from loguru import logger

from dmimo.channel import complex_gaussian
from dmimo.detector import SoftBlock, isdic_detect_evd, isdic_detect_naive, prepare
from dmimo.utils import Timer


@dataclass
class BenchmarkResult:
    n_streams: int
    n_rx: int
    block_lengths: List[int]
    evd_seconds: List[float]
    naive_seconds: List[float]

    @property
    def speedup(self) -> List[float]:
        return [n / e if e > 0 else float("inf")
                for e, n in zip(self.evd_seconds, self.naive_seconds)]

    @staticmethod
    def _slope(x: Sequence[int], t: Sequence[float]) -> float:
        if len(x) < 2:
            return float("nan")
        return float(np.polyfit(np.log(x), np.log(np.maximum(t, 1e-12)), 1)[0])

    @property
    def evd_slope(self) -> float:
        return self._slope(self.block_lengths, self.evd_seconds)

    @property
    def naive_slope(self) -> float:
        return self._slope(self.block_lengths, self.naive_seconds)

    def as_dict(self) -> dict:
        return {
            "n_streams": self.n_streams,
            "n_rx": self.n_rx,
            "block_lengths": self.block_lengths,
            "evd_seconds": self.evd_seconds,
            "naive_seconds": self.naive_seconds,
            "speedup": self.speedup,
            "evd_slope": self.evd_slope,
            "naive_slope": self.naive_slope,
        }


def _random_instance(rng: np.random.Generator, n_rx: int, n_streams: int, n_l: int):
    h = complex_gaussian(rng, (n_rx, n_streams))
    b = complex_gaussian(rng, (n_rx, n_rx))
    sigma = b @ b.conj().T / n_rx + 0.1 * np.eye(n_rx)
    y = complex_gaussian(rng, (n_rx, n_l))
    s_bar = 0.5 * complex_gaussian(rng, (n_streams, n_l))
    v = np.broadcast_to(rng.uniform(0.05, 1.0, n_l), (n_streams, n_l)).copy()
    return h, sigma, y, SoftBlock(s_bar, v)


def benchmark_complexity(n_streams: int = 8, n_rx: int = 8,
                         block_lengths: Sequence[int] = (64, 128, 256, 512, 1024),
                         repeats: int = 3, seed: int = 0) -> BenchmarkResult:
    r"""Time a full detection pass (``prepare`` included) on each path.

    The best of ``repeats`` runs is kept per block length.
    """
    rng = np.random.default_rng(seed)
    evd_times, naive_times = [], []
    for n_l in block_lengths:
        h, sigma, y, soft = _random_instance(rng, n_rx, n_streams, n_l)
        best_evd = best_naive = float("inf")
        for _ in range(repeats):
            timer = Timer().start()
            isdic_detect_evd(prepare(h, sigma), y, soft)
            best_evd = min(best_evd, timer.end())

            timer = Timer().start()
            isdic_detect_naive(prepare(h, sigma), y, soft)
            best_naive = min(best_naive, timer.end())
        evd_times.append(best_evd)
        naive_times.append(best_naive)
        logger.info(f"N_L={n_l}: evd {best_evd * 1e3:.3f} ms, naive {best_naive * 1e3:.3f} ms")
    return BenchmarkResult(n_streams, n_rx, list(block_lengths), evd_times, naive_times)
