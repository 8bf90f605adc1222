r"""Gray-labeled square QAM.

Labeling (fixed, exported by :meth:`Constellation.export_table`):

* A symbol label is the integer ``d`` whose binary expansion, most
  significant bit first, is the bit vector ``(b_0, ..., b_{Mc-1})``.
* Even-indexed bits ``b_0, b_2, ...`` select the in-phase level, odd-indexed
  bits ``b_1, b_3, ...`` the quadrature level.
* Each axis is a reflected-Gray PAM: level index ``i`` (0 = most positive)
  has amplitude ``L - 1 - 2i`` and carries the Gray label ``i ^ (i >> 1)``.
  A leading bit 0 therefore means a positive amplitude.
* Points are scaled to unit average energy.

For QPSK, bits ``(0, 0)`` map to ``(1 + 1j) / sqrt(2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Union

import numpy as np

from dmimo.exceptions import DimensionException, HarnessIOException

SUPPORTED_ORDERS = (2, 4, 6)


def _gray_pam(bits: int) -> np.ndarray:
    """Amplitude of each Gray label on an unnormalized 2**bits-PAM axis."""
    levels = 1 << bits
    i = np.arange(levels)
    amplitudes = levels - 1 - 2 * i
    out = np.empty(levels, dtype=np.float64)
    out[i ^ (i >> 1)] = amplitudes
    return out


def label_bits(order_bits: int) -> np.ndarray:
    r"""Bit matrix of shape ``(2**order_bits, order_bits)``, row ``d`` = bits of label ``d``."""
    d = np.arange(1 << order_bits)[:, None]
    shifts = np.arange(order_bits - 1, -1, -1)[None, :]
    return ((d >> shifts) & 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class Constellation:
    r"""Unit-energy Gray-labeled square QAM with ``order_bits`` bits per symbol."""

    order_bits: int
    points: np.ndarray = field(init=False, repr=False)
    bits: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order_bits not in SUPPORTED_ORDERS:
            raise DimensionException(
                f"unsupported constellation order {self.order_bits}, "
                f"expected one of {SUPPORTED_ORDERS}",
                {"order_bits": self.order_bits},
            )
        half = self.order_bits // 2
        bits = label_bits(self.order_bits)
        weights = 1 << np.arange(half - 1, -1, -1)
        i_label = bits[:, 0::2] @ weights
        q_label = bits[:, 1::2] @ weights
        pam = _gray_pam(half)
        levels = 1 << half
        scale = np.sqrt(2.0 * (levels ** 2 - 1) / 3.0)
        points = (pam[i_label] + 1j * pam[q_label]) / scale
        points.setflags(write=False)
        bits.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "bits", bits)

    @property
    def size(self) -> int:
        return 1 << self.order_bits

    @property
    def max_magnitude(self) -> float:
        return float(np.max(np.abs(self.points)))

    def point(self, bit_vector) -> complex:
        """alpha(d) for one bit vector."""
        bit_vector = np.asarray(bit_vector, dtype=np.int64)
        d = int(bit_vector @ (1 << np.arange(self.order_bits - 1, -1, -1)))
        return complex(self.points[d])

    def modulate(self, bits) -> np.ndarray:
        r"""Map a bit sequence onto constellation points.

        Args:
            bits: 0/1 array whose length is a multiple of ``order_bits``.

        Returns:
            np.ndarray: Complex symbols, one per group of ``order_bits`` bits.

        Raises:
            DimensionException: If the length is not divisible by ``order_bits``.
        """
        bits = np.asarray(bits, dtype=np.int64).ravel()
        if bits.size % self.order_bits:
            raise DimensionException(
                f"{bits.size} bits cannot be grouped into {self.order_bits}-bit symbols",
                {"bits": bits.size, "order_bits": self.order_bits},
            )
        groups = bits.reshape(-1, self.order_bits)
        labels = groups @ (1 << np.arange(self.order_bits - 1, -1, -1))
        return self.points[labels]

    def export_table(self, path: Union[str, Path]) -> None:
        r"""Write ``<bit pattern> <real> <imag>`` per label, 12 significant digits."""
        path = Path(path)
        lines = []
        for d in range(self.size):
            pattern = "".join(str(b) for b in self.bits[d])
            p = self.points[d]
            lines.append(f"{pattern} {p.real:.12g} {p.imag:.12g}")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as e:
            raise HarnessIOException(f"cannot write constellation table ({e.strerror})",
                                     str(path)) from e


@lru_cache(maxsize=None)
def get_constellation(order_bits: int) -> Constellation:
    return Constellation(order_bits)


def modulate(bits, constellation: Constellation) -> np.ndarray:
    return constellation.modulate(bits)
