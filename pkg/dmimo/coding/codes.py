# -*- coding: utf-8 -*-
"""
Built-in quasi-cyclic LDPC codes.

Prototype matrices in the style of IEEE 802.11n, codeword length 648
(24 block columns, lifting size 27). Entry -1 is an all-zero block, entry
s >= 0 the identity cyclically shifted right by s. The encoder is derived
from the expanded parity-check matrix by GF(2) elimination, so the native
rate is (n - rank H) / n.
"""

from typing import Dict, List

import numpy as np
import scipy.sparse as sp

LIFTING_SIZE = 27

_R12 = """
 0 -1 -1 -1  0  0 -1 -1  0 -1 -1  0  1  0 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1
22  0 -1 -1 17 -1  0  0 12 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1 -1
 6 -1  0 -1 10 -1 -1 -1 24 -1  0 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1
 2 -1 -1  0 20 -1 -1 -1 25  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1
23 -1 -1 -1  3 -1 -1 -1  0 -1  9 11 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1
24 -1 23  1 17 -1  3 -1 10 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1
25 -1 -1 -1  8 -1 -1 -1  7 18 -1 -1  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1
13 24 -1 -1  0 -1  8 -1  6 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1
 7 20 -1 16 22 10 -1 -1 23 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1
11 -1 -1 -1 19 -1 -1 -1 13 -1  3 17 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1
25 -1  8 -1 23 18 -1 14  9 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0
 3 -1 -1 -1 16 -1 -1  2 25  5 -1 -1  1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0
"""

_R23 = """
25 26 14 -1 20 -1  2 -1  4 -1 -1  8 -1 16 -1 18  1  0 -1 -1 -1 -1 -1 -1
10  9 15 11 -1  0 -1  1 -1 -1 18 -1  8 -1 10 -1 -1  0  0 -1 -1 -1 -1 -1
16  2 20 26 21 -1  6 -1  1 26 -1  7 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1
10 13  5  0 -1  3 -1  7 -1 -1 26 -1 -1 13 -1 16 -1 -1 -1  0  0 -1 -1 -1
23 14 24 -1 12 -1 19 -1 17 -1 -1 -1 20 -1 21 -1  0 -1 -1 -1  0  0 -1 -1
 6 22  9 20 -1 25 -1 17 -1  8 -1 14 -1 18 -1 -1 -1 -1 -1 -1 -1  0  0 -1
14 23 21 11 20 -1 24 -1 18 -1 19 -1 -1 -1 -1 22 -1 -1 -1 -1 -1 -1  0  0
17 11 11 20 -1 21 -1 26 -1  3 -1 -1 18 -1 26 -1  1 -1 -1 -1 -1 -1 -1  0
"""

_R34 = """
16 17 22 24  9  3 14 -1  4  2  7 -1 26 -1  2 -1 21 -1  1  0 -1 -1 -1 -1
25 12 12  3  3 26  6 21 -1 15 22 -1 15 -1  4 -1 -1 16 -1  0  0 -1 -1 -1
25 18 26 16 22 23  9 -1  0 -1  4 -1  4 -1  8 23 11 -1 -1 -1  0  0 -1 -1
 9  7  0  1 17 -1 -1  7  3 -1  3 23 -1 16 -1 -1 21 -1  0 -1 -1  0  0 -1
24  5 26  7  1 -1 -1 15 24 15 -1  8 -1 13 -1 13 -1 11 -1 -1 -1 -1  0  0
 2  2 19 14 24  1 15 19 -1 21 -1  2 -1 24 -1  3 -1  2  1 -1 -1 -1 -1  0
"""

BUILTIN_PROTOTYPES: Dict[str, str] = {
    "wifi648_r12": _R12,
    "wifi648_r23": _R23,
    "wifi648_r34": _R34,
}

RATE_TO_CODE: Dict[str, str] = {
    "1/2": "wifi648_r12",
    "2/3": "wifi648_r23",
    "3/4": "wifi648_r34",
}


def parse_prototype(text: str) -> np.ndarray:
    rows: List[List[int]] = [[int(v) for v in line.split()] for line in text.strip().splitlines()]
    return np.array(rows, dtype=np.int64)


def expand_prototype(proto: np.ndarray, z: int = LIFTING_SIZE) -> sp.csr_matrix:
    r"""Lift a prototype matrix into a sparse binary parity-check matrix.

    Args:
        proto (np.ndarray): Shift values, ``-1`` for zero blocks.
        z (int): Circulant size.

    Returns:
        sp.csr_matrix: ``(rows * z) x (cols * z)`` matrix with 0/1 entries.
    """
    rows, cols = [], []
    local = np.arange(z)
    for bi, bj in zip(*np.nonzero(proto >= 0)):
        shift = proto[bi, bj]
        rows.append(bi * z + local)
        cols.append(bj * z + (local + shift) % z)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    shape = (proto.shape[0] * z, proto.shape[1] * z)
    return sp.csr_matrix((np.ones(r.size, dtype=np.uint8), (r, c)), shape=shape)
