"""Length-31 Gold sequence and PDSCH bit scrambling."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

NC = 1600
DEFAULT_RNTI = 0x003C
DEFAULT_CELL_ID = 1


def pdsch_c_init(subframe: int, rnti: int = DEFAULT_RNTI, q: int = 0,
                 cell_id: int = DEFAULT_CELL_ID) -> int:
    ns = 2 * (subframe % 10)
    return rnti * 2**14 + q * 2**13 + (ns // 2) * 2**9 + cell_id


def _lfsr(init: np.ndarray, taps: tuple[int, ...], n: int) -> np.ndarray:
    # x(m) = XOR of x(m - 31 + t) for t in taps; 28 new bits only depend on
    # bits at least 28 positions back, so the recursion advances in chunks.
    x = np.zeros(n + 31, dtype=np.uint8)
    x[:31] = init
    m = 31
    while m < n + 31:
        hi = min(m + 28, n + 31)
        acc = np.zeros(hi - m, dtype=np.uint8)
        for t in taps:
            acc ^= x[m - 31 + t:hi - 31 + t]
        x[m:hi] = acc
        m = hi
    return x


@lru_cache(maxsize=64)
def _gold(c_init: int, length: int) -> np.ndarray:
    n = length + NC
    x1_init = np.zeros(31, dtype=np.uint8)
    x1_init[0] = 1
    x2_init = np.array([(c_init >> i) & 1 for i in range(31)], dtype=np.uint8)
    x1 = _lfsr(x1_init, (3, 0), n)
    x2 = _lfsr(x2_init, (3, 2, 1, 0), n)
    c = x1[NC:NC + length] ^ x2[NC:NC + length]
    c.setflags(write=False)
    return c


def gold_sequence(c_init: int, length: int) -> np.ndarray:
    if not 0 <= c_init < 2**31:
        raise ValueError("c_init must be a 31-bit value")
    return _gold(int(c_init), int(length))


def gold_scramble(x, c_init: int) -> np.ndarray:
    """XOR hard bits, or flip the sign of soft bits, where the sequence is 1."""
    x = np.asarray(x)
    c = gold_sequence(c_init, x.size)
    if np.issubdtype(x.dtype, np.floating):
        return np.where(c == 1, -x, x)
    return x.astype(np.uint8) ^ c


gold_descramble = gold_scramble
