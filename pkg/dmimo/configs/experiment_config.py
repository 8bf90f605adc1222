from __future__ import annotations

from typing import Any, List, Optional

from pydantic import Field, field_validator, model_validator

from dmimo.configs.base_config import BaseConfig
from dmimo.configs.system_config import SystemConfig
from dmimo.types import DemapMode, RhoMode, Scheme


class IterationPlan(BaseConfig):
    r"""Receiver iteration schedule.

    ``num_iterations`` is the number of detector passes N_I. The LMMSE
    baseline is a single pass by definition, so any other value is
    overridden to 1.
    """

    scheme: Scheme = Scheme.IDD
    num_iterations: int = Field(3, ge=1)
    bp_iters_per_pass: int = Field(25, ge=1)
    rho_mode: RhoMode = RhoMode.PER_COLUMN
    demap_mode: DemapMode = DemapMode.MAX_LOG
    use_lut: bool = True

    @model_validator(mode="before")
    @classmethod
    def _force_single_pass(cls, data: Any) -> Any:
        if isinstance(data, dict) and Scheme(data.get("scheme", Scheme.IDD)) is Scheme.LMMSE_BASELINE:
            data = {**data, "num_iterations": 1}
        return data

    @property
    def label(self) -> str:
        return self.scheme.value.upper()


class ExperimentSpec(BaseConfig):
    r"""A Monte Carlo sweep: schemes x SNR grid, ``n_blocks`` trials per point."""

    base: SystemConfig = Field(default_factory=SystemConfig)
    schemes: List[IterationPlan] = Field(
        default_factory=lambda: [IterationPlan(scheme=Scheme.LMMSE_BASELINE)]
    )
    snr_grid_db: List[float] = Field(default_factory=lambda: [10.0])
    n_blocks: int = Field(100, ge=1)
    output_path: str = "results/metrics.csv"
    worker_count: int = Field(1, ge=1)
    diagnostics_path: Optional[str] = None
    record_timing: bool = False
    """Measure wall-clock time per block. When off the runtime column is 0 and the CSV is reproducible byte for byte."""

    @field_validator("snr_grid_db")
    @classmethod
    def _strictly_increasing(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("snr_grid_db must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"snr_grid_db must be strictly increasing, got {grid}")
        return grid

    @field_validator("schemes")
    @classmethod
    def _non_empty(cls, schemes: List[IterationPlan]) -> List[IterationPlan]:
        if not schemes:
            raise ValueError("at least one scheme is required")
        return schemes
