r"""Monte Carlo driver.

Trial ``t`` draws its channel, payload and unit-variance noise from a
generator seeded by ``(seed, t)`` alone; every scheme and SNR point of the
experiment is evaluated on that same draw, with the SNR only scaling the noise.
Counters are integers summed over trials, so the result does not depend
on worker count or completion order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
from loguru import logger
from tqdm import tqdm

from dmimo.channel import draw_channel, estimate_channel, random_payload, system_code, transmit
from dmimo.coding import LdpcCode, decode_siso
from dmimo.configs import ExperimentSpec
from dmimo.exceptions import HarnessIOException
from dmimo.harness.metrics import MetricsRow, emit_csv
from dmimo.receiver import receive_block
from dmimo.suppression import build_suppression
from dmimo.utils import Timer


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream of one trial, a function of ``(seed, trial)`` only."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


@dataclass
class TrialOutcome:
    r"""Counters of one trial, indexed ``[plan, snr]``."""

    trial: int
    errors: np.ndarray
    inversions: np.ndarray
    runtime: np.ndarray
    diagnostics: List[dict] = field(default_factory=list)


def run_trial(spec: ExperimentSpec, trial: int) -> TrialOutcome:
    base = spec.base
    rng = trial_rng(base.seed, trial)
    chan = draw_channel(base, rng)
    code = system_code(base)
    payload = random_payload(base, rng, code)
    block = transmit(base, chan, payload, rng)
    row_seed = int(rng.integers(2 ** 31))
    chan_rx = estimate_channel(chan, base.csi_error_variance, rng)

    shape = (len(spec.schemes), len(spec.snr_grid_db))
    outcome = TrialOutcome(trial, np.zeros(shape, dtype=np.int64),
                           np.zeros(shape, dtype=np.int64), np.zeros(shape))
    for j, snr in enumerate(spec.snr_grid_db):
        cfg = base.with_snr(snr)
        sigma2 = cfg.noise_var
        y = block.observed_at(sigma2)
        supp = build_suppression(chan_rx, cfg.row_selection, sigma2, seed=row_seed)
        for i, plan in enumerate(spec.schemes):
            timer = Timer().start()
            result = receive_block(cfg, chan_rx, supp, y, plan, block.info_bits)
            elapsed = timer.end()
            outcome.errors[i, j] = result.error_blocks
            outcome.inversions[i, j] = sum(result.inversion_count)
            if spec.record_timing:
                outcome.runtime[i, j] = elapsed
            if spec.diagnostics_path:
                for user, entries in enumerate(result.diagnostics):
                    for d in entries:
                        outcome.diagnostics.append({
                            "scheme": plan.label,
                            "N_I": plan.num_iterations,
                            "snr_db": float(snr),
                            "trial": trial,
                            "user": user,
                            **d.as_dict(),
                        })
    return outcome


class _Accumulator:
    def __init__(self, spec: ExperimentSpec):
        shape = (len(spec.schemes), len(spec.snr_grid_db))
        self.spec = spec
        self.trials = 0
        self.errors = np.zeros(shape, dtype=np.int64)
        self.inversions = np.zeros(shape, dtype=np.int64)
        self.runtime = np.zeros(shape)
        self.diagnostics: List[dict] = []

    def add(self, outcome: TrialOutcome) -> None:
        self.trials += 1
        self.errors += outcome.errors
        self.inversions += outcome.inversions
        self.runtime += outcome.runtime
        self.diagnostics.extend(outcome.diagnostics)

    def rows(self) -> List[MetricsRow]:
        blocks = self.trials * self.spec.base.num_users
        rows = []
        for i, plan in enumerate(self.spec.schemes):
            for j, snr in enumerate(self.spec.snr_grid_db):
                rows.append(MetricsRow.from_counts(
                    plan.label, plan.num_iterations, snr, blocks,
                    int(self.errors[i, j]), float(self.runtime[i, j]),
                    int(self.inversions[i, j]),
                ))
        return rows


def _outcomes(spec: ExperimentSpec, trials: Sequence[int], pool: Optional[Pool]) -> Iterable[TrialOutcome]:
    worker = partial(run_trial, spec)
    if pool is None:
        return map(worker, trials)
    chunk = max(1, len(trials) // (8 * spec.worker_count))
    return pool.imap_unordered(worker, trials, chunksize=chunk)


def write_diagnostics(records: List[dict], path: str) -> None:
    """One JSON object per line, ordered by trial then scheme, SNR, user and iteration."""
    path = Path(path)
    records = sorted(records, key=lambda r: (r["trial"], r["scheme"], r["N_I"], r["snr_db"],
                                              r["user"], r["iteration"]))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    except OSError as e:
        raise HarnessIOException(f"cannot write diagnostics ({e.strerror})", str(path)) from e


def run_experiment(spec: ExperimentSpec, progress: bool = True) -> List[MetricsRow]:
    r"""Run ``n_blocks`` trials for every (scheme, SNR) point.

    ``blocks`` in each row counts user blocks, ``n_blocks * K``.

    On ``KeyboardInterrupt`` the rows of the completed trials are written to
    ``spec.output_path`` before the interrupt propagates.
    """
    trials = list(range(spec.n_blocks))
    acc = _Accumulator(spec)
    logger.info(f"experiment: {len(spec.schemes)} schemes x {len(spec.snr_grid_db)} SNR points, "
                f"{spec.n_blocks} trials, {spec.worker_count} workers")

    pool = Pool(processes=spec.worker_count) if spec.worker_count > 1 else None
    try:
        with tqdm(total=len(trials), desc="trials", unit="blk", disable=not progress) as bar:
            for outcome in _outcomes(spec, trials, pool):
                acc.add(outcome)
                bar.update(1)
    except KeyboardInterrupt:
        logger.warning(f"interrupted after {acc.trials} trials, flushing partial results")
        if pool is not None:
            pool.terminate()
            pool = None
        emit_csv(acc.rows(), spec.output_path)
        raise
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    if spec.diagnostics_path:
        write_diagnostics(acc.diagnostics, spec.diagnostics_path)
    rows = acc.rows()
    for row in rows:
        logger.info(f"{row.scheme:>5} N_I={row.N_I} snr={row.snr_db:g} dB: "
                    f"{row.error_blocks}/{row.blocks} errors, bler={row.bler:.4g}")
    return rows


def run_and_save(spec: ExperimentSpec, progress: bool = True) -> List[MetricsRow]:
    rows = run_experiment(spec, progress)
    emit_csv(rows, spec.output_path)
    return rows


@dataclass(frozen=True)
class WaterfallPoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    info_bits: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits


def bp_waterfall(code: LdpcCode, ebn0_db: Sequence[float], frames: int,
                 max_bp_iters: int = 25, seed: int = 0,
                 batch: int = 256) -> List[WaterfallPoint]:
    r"""Frame and bit error rates of a code over BPSK/AWGN.

    Bit ``c`` is sent as ``1 - 2c`` and received with noise variance
    ``1 / (2 R Eb/N0)``; the decoder input is ``-2 y / sigma2``.
    """
    points = []
    for idx, ebn0 in enumerate(ebn0_db):
        rng = trial_rng(seed, idx)
        sigma2 = 1.0 / (2.0 * code.rate * 10.0 ** (ebn0 / 10.0))
        frame_errors = bit_errors = 0
        remaining = frames
        while remaining > 0:
            b = min(batch, remaining)
            info = rng.integers(0, 2, size=(b, code.k), dtype=np.int8)
            x = 1.0 - 2.0 * code.encode(info)
            y = x + np.sqrt(sigma2) * rng.standard_normal(x.shape)
            result = decode_siso(code, -2.0 * y / sigma2, max_bp_iters)
            wrong = result.info_bits != info
            bit_errors += int(wrong.sum())
            frame_errors += int(np.any(wrong, axis=1).sum())
            remaining -= b
        point = WaterfallPoint(float(ebn0), frames, frame_errors, bit_errors, frames * code.k)
        logger.info(f"{code.name} Eb/N0={ebn0:g} dB: fer={point.fer:.3g}, ber={point.ber:.3g}")
        points.append(point)
    return points
