r"""Configuration of one experiment point.

Field names map to the system-model symbols as follows:

=====================  ======
field                  symbol
=====================  ======
``num_raus``           M
``num_users``          K
``rau_antennas``       N_R
``user_antennas``      N_U
``streams``            N_RI,k
``bits_per_symbol``    M_c
``block_length``       N_L
=====================  ======

SNR convention: every stream carries a unit-energy constellation, every
channel entry has unit average power, so the average received power per
RAU antenna is ``sum_k N_RI,k``. The noise variance is therefore
``sigma2 = sum_k N_RI,k / 10**(snr_db / 10)``, i.e. ``snr_db`` is the
per-receive-antenna SNR. ``noise_variance`` overrides this when set.
"""
from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import Field, model_validator

from dmimo.configs.base_config import BaseConfig
from dmimo.types import ChannelModel, PrecoderMode, RowSelection

BUILTIN_CODE_LENGTH = 648


class SystemConfig(BaseConfig):
    r"""System dimensions, modulation/coding and the random seed."""

    num_raus: int = Field(2, ge=1)
    num_users: int = Field(2, ge=1)
    rau_antennas: int = Field(4, ge=1)
    user_antennas: int = Field(4, ge=1)
    streams: List[int] = Field(default_factory=lambda: [2, 2])
    bits_per_symbol: Literal[2, 4, 6] = 4
    code_rate: Literal["1/2", "2/3", "3/4"] = "1/2"
    code_alist: Optional[str] = None
    """Path of an alist file replacing the built-in code for ``code_rate``."""
    block_length: int = Field(162, ge=1)
    snr_db: float = 10.0
    noise_variance: Optional[float] = Field(None, gt=0)
    seed: int = Field(0, ge=0)
    channel_model: ChannelModel = ChannelModel.IID_RAYLEIGH
    precoder_mode: PrecoderMode = PrecoderMode.COLUMNS
    row_selection: RowSelection = RowSelection.FIRST
    large_scale_std_db: float = Field(8.0, ge=0)
    csi_error_variance: float = Field(0.0, ge=0)
    llr_clamp: float = Field(30.0, gt=0)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "SystemConfig":
        if len(self.streams) != self.num_users:
            raise ValueError(
                f"streams has {len(self.streams)} entries for {self.num_users} users"
            )
        for k, n_ri in enumerate(self.streams):
            if not 1 <= n_ri <= self.user_antennas:
                raise ValueError(
                    f"user {k}: stream count {n_ri} outside [1, {self.user_antennas}]"
                )
        total_rx = self.num_raus * self.rau_antennas
        interferer_dims = (self.num_users - 1) * self.user_antennas
        if total_rx - interferer_dims < self.rau_antennas:
            raise ValueError(
                f"M*N_R={total_rx} leaves {total_rx - interferer_dims} null-space "
                f"dimensions per user, N_R={self.rau_antennas} required"
            )
        if self.rau_antennas < max(self.streams):
            raise ValueError(
                f"N_R={self.rau_antennas} smaller than the largest stream count "
                f"{max(self.streams)}"
            )
        if self.code_alist is None:
            for k, bits in enumerate(self.coded_bits_per_user):
                if bits % BUILTIN_CODE_LENGTH:
                    raise ValueError(
                        f"user {k}: {bits} coded bits per block is not a multiple of "
                        f"the code length {BUILTIN_CODE_LENGTH}"
                    )
        return self

    @property
    def total_rx_antennas(self) -> int:
        return self.num_raus * self.rau_antennas

    @property
    def coded_bits_per_user(self) -> List[int]:
        return [n_ri * self.block_length * self.bits_per_symbol for n_ri in self.streams]

    @property
    def noise_var(self) -> float:
        r"""Noise variance sigma^2 implied by ``snr_db`` or the explicit override."""
        if self.noise_variance is not None:
            return float(self.noise_variance)
        return float(sum(self.streams)) / 10.0 ** (self.snr_db / 10.0)

    def with_snr(self, snr_db: float) -> "SystemConfig":
        return self.model_copy(update={"snr_db": float(snr_db)})
