r"""Iterative receive chain.

Every user is processed independently on its suppressed observation:

* ``IDD``: detect, demap, deinterleave, decode, and feed the decoder's
  extrinsic LLRs back (interleaved) as symbol priors. The decode of the
  last pass gives the hard decisions.
* ``ID``: detect and demap, feed the demapper LLRs back directly; the
  decoder runs once after the last pass.
* ``LMMSE``: one linear MMSE pass and one decode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from dmimo.channel import ChannelRealization, codewords_per_user, interleaver_for, system_code
from dmimo.coding import DecodeResult, LdpcCode, decode_siso
from dmimo.configs import IterationPlan, SystemConfig
from dmimo.detector import (
    DetectorState,
    SoftBlock,
    compute_rho,
    isdic_detect_evd,
    isdic_detect_naive,
    lmmse_detect,
    post_detection_snr,
    prepare,
    stream_snr,
)
from dmimo.exceptions import DimensionException
from dmimo.softmaps import LlrBlock, default_lut, demap_soft, get_constellation, soft_symbol_stats
from dmimo.suppression import SuppressionSet, apply_suppression
from dmimo.types import DemapMode, RhoMode, Scheme


@dataclass
class IterationDiagnostics:
    iteration: int
    mean_nu: float
    mean_abs_llr: float
    inversion_count: int

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "mean_nu": self.mean_nu,
            "mean_abs_llr": self.mean_abs_llr,
            "inversion_count": self.inversion_count,
        }


@dataclass
class ReceiveResult:
    r"""Per-user outcome of one received block.

    ``diagnostics[k]`` has one entry per detector pass.
    """

    decoded_bits: List[np.ndarray]
    block_error: List[bool]
    syndrome_ok: List[bool]
    diagnostics: List[List[IterationDiagnostics]] = field(default_factory=list)

    @property
    def inversion_count(self) -> List[int]:
        return [d[-1].inversion_count if d else 0 for d in self.diagnostics]

    @property
    def error_blocks(self) -> int:
        return int(sum(self.block_error))


def _detect(state: DetectorState, y_tilde: np.ndarray, soft: SoftBlock,
            plan: IterationPlan, naive: bool):
    """One detector pass: unbiased estimates and their per-stream effective SNR."""
    if plan.scheme is Scheme.LMMSE_BASELINE and not naive:
        biased = lmmse_detect(state, y_tilde)
        rho = compute_rho(state, 1.0)[:, None]
        s_hat = np.divide(biased, rho, out=np.zeros_like(biased), where=rho > 0)
        gamma = np.broadcast_to(post_detection_snr(state, 1.0)[:, None], s_hat.shape)
        return s_hat, gamma
    if naive:
        return isdic_detect_naive(state, y_tilde, soft, return_snr=True)
    s_hat = isdic_detect_evd(state, y_tilde, soft, plan.rho_mode)
    if plan.rho_mode is RhoMode.PER_BLOCK:
        return s_hat, post_detection_snr(state, np.full(soft.nu.shape, soft.nu.mean()))
    return s_hat, stream_snr(state, soft)


def _decode_block(code: LdpcCode, coded_llrs: np.ndarray, n_codewords: int,
                  bp_iters: int) -> DecodeResult:
    return decode_siso(code, coded_llrs.reshape(n_codewords, code.n), bp_iters)


def receive_user(cfg: SystemConfig, user: int, state: DetectorState, y_tilde: np.ndarray,
                 plan: IterationPlan, naive: bool = False,
                 code: Optional[LdpcCode] = None):
    r"""Run the iteration schedule for one user.

    Returns:
        Tuple[DecodeResult, List[IterationDiagnostics]]: The decode that
            provides the hard decisions and one diagnostics entry per pass.
    """
    code = code or system_code(cfg)
    n_cw = codewords_per_user(cfg, code)[user]
    n_ri, n_l = cfg.streams[user], cfg.block_length
    constellation = get_constellation(cfg.bits_per_symbol)
    ilv = interleaver_for(cfg, user)
    lut = default_lut() if plan.use_lut else None
    exact = plan.demap_mode is DemapMode.EXACT

    soft = SoftBlock.initial(n_ri, n_l)
    diagnostics: List[IterationDiagnostics] = []
    decoded: Optional[DecodeResult] = None
    detector_llrs = None

    for it in range(plan.num_iterations):
        s_hat, gamma = _detect(state, y_tilde, soft, plan, naive)
        detector_llrs = LlrBlock(demap_soft(s_hat, gamma, constellation, exact, cfg.llr_clamp),
                                 cfg.llr_clamp)
        diagnostics.append(IterationDiagnostics(
            iteration=it + 1,
            mean_nu=float(soft.nu.mean()),
            mean_abs_llr=float(np.mean(np.abs(detector_llrs.values))),
            inversion_count=state.inversion_count,
        ))
        last = it == plan.num_iterations - 1

        if plan.scheme is Scheme.IDD:
            decoded = _decode_block(code, ilv.deinterleave(detector_llrs.flat()), n_cw,
                                    plan.bp_iters_per_pass)
            if last:
                break
            priors = LlrBlock.from_flat(ilv.interleave(decoded.extrinsic_llrs.reshape(-1)),
                                        n_ri, n_l, cfg.bits_per_symbol, cfg.llr_clamp)
        elif plan.scheme is Scheme.ID:
            if last:
                break
            priors = detector_llrs
        else:
            break

        mean, var = soft_symbol_stats(priors.values, constellation, lut)
        soft = SoftBlock(mean, var)

    if decoded is None:
        decoded = _decode_block(code, ilv.deinterleave(detector_llrs.flat()), n_cw,
                                plan.bp_iters_per_pass)
    return decoded, diagnostics


def _receive(cfg: SystemConfig, chan: ChannelRealization, supp: SuppressionSet, y,
             plan: IterationPlan, reference_info: Optional[Sequence[np.ndarray]],
             naive: bool) -> ReceiveResult:
    if supp.num_users != cfg.num_users or chan.num_users != cfg.num_users:
        raise DimensionException(
            f"suppression for {supp.num_users} users, channel for {chan.num_users}, "
            f"config for {cfg.num_users}",
            {"suppression": supp.num_users, "channel": chan.num_users, "config": cfg.num_users},
        )
    code = system_code(cfg)
    y = np.asarray(y, dtype=np.complex128)

    decoded_bits, errors, syndromes, diagnostics = [], [], [], []
    for k in range(cfg.num_users):
        state = prepare(supp.H_eff[k], supp.Sigma[k])
        y_tilde = apply_suppression(supp.W_per_user[k], y)
        result, diag = receive_user(cfg, k, state, y_tilde, plan, naive, code)

        info = result.info_bits.reshape(-1).astype(np.int8)
        syndrome_ok = bool(np.all(result.syndrome_ok))
        error = not syndrome_ok
        if reference_info is not None:
            error = error or not np.array_equal(info, np.asarray(reference_info[k], dtype=np.int8))
        decoded_bits.append(info)
        errors.append(error)
        syndromes.append(syndrome_ok)
        diagnostics.append(diag)
        logger.debug(f"user {k}: {plan.label} x{plan.num_iterations}, "
                     f"error={error}, inversions={state.inversion_count}")
    return ReceiveResult(decoded_bits, errors, syndromes, diagnostics)


def receive_block(cfg: SystemConfig, chan: ChannelRealization, supp: SuppressionSet, y,
                  plan: IterationPlan,
                  reference_info: Optional[Sequence[np.ndarray]] = None) -> ReceiveResult:
    r"""Detect and decode every user of one block with the eigendecomposition detector.

    Args:
        cfg (SystemConfig): System parameters.
        chan (ChannelRealization): Channel known at the receiver.
        supp (SuppressionSet): Combiners built for ``chan``.
        y: Stacked received block ``(M*N_R, N_L)``.
        plan (IterationPlan): Scheme and iteration budget.
        reference_info (optional): Transmitted info bits per user. When
            given, a block is in error if its decoded info bits differ or
            any codeword fails its parity checks; otherwise only the parity
            checks count.

    Returns:
        ReceiveResult: Decoded bits, error flags and per-pass diagnostics.
    """
    return _receive(cfg, chan, supp, y, plan, reference_info, naive=False)


def receive_block_naive(cfg: SystemConfig, chan: ChannelRealization, supp: SuppressionSet, y,
                        plan: IterationPlan,
                        reference_info: Optional[Sequence[np.ndarray]] = None) -> ReceiveResult:
    """As :func:`receive_block` with one matrix solve per column and the full variance matrix."""
    return _receive(cfg, chan, supp, y, plan, reference_info, naive=True)
