from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dmimo.exceptions import DimensionException


@dataclass(frozen=True, eq=False)
class Interleaver:
    r"""Seeded pseudo-random permutation over a user's full coded block.

    ``interleave(x)[i] = x[permutation[i]]``.
    """

    length: int
    seed: int = 0
    permutation: np.ndarray = field(init=False, repr=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        perm = np.random.default_rng(self.seed).permutation(self.length)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.length)
        perm.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "inverse", inv)

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.length:
            raise DimensionException(
                f"interleaver of length {self.length} got a sequence of length {x.shape[-1]}",
                {"expected": self.length, "got": int(x.shape[-1])},
            )
        return x

    def interleave(self, x) -> np.ndarray:
        return self._check(x)[..., self.permutation]

    def deinterleave(self, x) -> np.ndarray:
        return self._check(x)[..., self.inverse]


def interleave(x, ilv: Interleaver) -> np.ndarray:
    return ilv.interleave(x)


def deinterleave(x, ilv: Interleaver) -> np.ndarray:
    return ilv.deinterleave(x)
