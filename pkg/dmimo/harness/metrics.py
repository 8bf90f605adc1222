# -*- coding: utf-8 -*-
"""
Per-point metrics and their CSV form.
"""

import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import List, Sequence, Union

from loguru import logger

from dmimo.exceptions import HarnessIOException

CSV_FIELDS = [
    "scheme",
    "N_I",
    "snr_db",
    "blocks",
    "error_blocks",
    "bler",
    "mean_runtime_per_block",
    "mean_inversion_count",
]


@dataclass(frozen=True)
class MetricsRow:
    scheme: str
    N_I: int
    snr_db: float
    blocks: int
    error_blocks: int
    bler: float
    mean_runtime_per_block: float
    mean_inversion_count: float

    @classmethod
    def from_counts(cls, scheme: str, n_iter: int, snr_db: float, blocks: int,
                    error_blocks: int, runtime_s: float, inversions: int) -> "MetricsRow":
        """Build a row from summed counters; rates are derived here so ``bler`` is exact."""
        if blocks < 0 or error_blocks < 0 or inversions < 0:
            raise ValueError("metric counters must be nonnegative")

        def per_block(total):
            return total / blocks if blocks else 0.0

        return cls(
            scheme=scheme,
            N_I=int(n_iter),
            snr_db=float(snr_db),
            blocks=int(blocks),
            error_blocks=int(error_blocks),
            bler=per_block(error_blocks),
            mean_runtime_per_block=per_block(runtime_s),
            mean_inversion_count=per_block(inversions),
        )


def _format(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def emit_csv(rows: Sequence[MetricsRow], path: Union[str, Path]) -> Path:
    r"""Write a header and one line per row, floats with 6 significant digits.

    Raises:
        HarnessIOException: If the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for row in rows:
                writer.writerow([_format(v) for v in astuple(row)])
    except OSError as e:
        raise HarnessIOException(f"cannot write metrics ({e.strerror})", str(path)) from e
    logger.info(f"wrote {len(rows)} metric rows to {path}")
    return path


def read_csv(path: Union[str, Path]) -> List[MetricsRow]:
    """Parse a file written by :func:`emit_csv`."""
    path = Path(path)
    casts = {f.name: f.type for f in fields(MetricsRow)}
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            records = list(csv.DictReader(fh))
    except OSError as e:
        raise HarnessIOException(f"cannot read metrics ({e.strerror})", str(path)) from e
    rows = []
    for rec in records:
        rows.append(MetricsRow(**{name: casts[name](rec[name])
                                  for name in CSV_FIELDS}))
    return rows
