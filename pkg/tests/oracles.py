"""Independent, deliberately naive reference implementations.

Nothing here imports the package under test: each oracle is written from
the textbook definition so that agreement is meaningful.  Their outputs on
the pinned inputs are also frozen as literals in the tests.
"""

from __future__ import annotations

import itertools
import math

CRC24A_POLY = 0x1864CFB  # x^24 + ... with the leading term included


def crc24a_long_division(bits: list[int]) -> int:
    """Remainder of bits(x) * x^24 divided by g(x), bit by bit over GF(2)."""
    reg = list(bits) + [0] * 24
    gen = [(CRC24A_POLY >> (24 - i)) & 1 for i in range(25)]
    for i in range(len(bits)):
        if reg[i]:
            for j in range(25):
                reg[i + j] ^= gen[j]
    out = 0
    for b in reg[-24:]:
        out = (out << 1) | b
    return out


def bytes_to_bits(data: bytes) -> list[int]:
    return [(byte >> (7 - i)) & 1 for byte in data for i in range(8)]


def qpp_direct(k: int, f1: int, f2: int) -> list[int]:
    return [(f1 * i + f2 * i * i) % k for i in range(k)]


def rsc_direct(u: list[int]) -> tuple[list[int], list[int], list[int]]:
    """One constituent encoder stepped by hand.

    Feedback g0 = 1 + D^2 + D^3, feedforward g1 = 1 + D + D^3.  Returns the
    systematic stream, parity stream and the 3 tail (x, z) pairs flattened as
    (x_tail, z_tail).
    """
    d1 = d2 = d3 = 0
    x, z = [], []
    for bit in u:
        a = bit ^ d2 ^ d3
        x.append(bit)
        z.append(a ^ d1 ^ d3)
        d1, d2, d3 = a, d1, d2
    tx, tz = [], []
    for _ in range(3):
        inp = d2 ^ d3  # drives the feedback sum to zero
        a = inp ^ d2 ^ d3
        tx.append(inp)
        tz.append(a ^ d1 ^ d3)
        d1, d2, d3 = a, d1, d2
    assert (d1, d2, d3) == (0, 0, 0)
    return x, z, tx + tz


def gold_direct(c_init: int, n: int, nc: int = 1600) -> list[int]:
    """Length-31 Gold sequence from two explicitly stepped LFSRs."""
    x1 = [1] + [0] * 30
    x2 = [(c_init >> i) & 1 for i in range(31)]
    for m in range(nc + n):
        x1.append(x1[m + 3] ^ x1[m])
        x2.append(x2[m + 3] ^ x2[m + 2] ^ x2[m + 1] ^ x2[m])
    return [x1[m + nc] ^ x2[m + nc] for m in range(n)]


def gray_levels(qm: int) -> dict[tuple[int, ...], float]:
    """Per-axis LTE levels keyed by the axis bits, from the 36.211 tables."""
    if qm == 2:
        return {(0,): 1.0, (1,): -1.0}
    if qm == 4:
        return {(0, 0): 1.0, (0, 1): 3.0, (1, 0): -1.0, (1, 1): -3.0}
    return {(0, 0, 0): 3.0, (0, 0, 1): 1.0, (0, 1, 0): 5.0, (0, 1, 1): 7.0,
            (1, 0, 0): -3.0, (1, 0, 1): -1.0, (1, 1, 0): -5.0, (1, 1, 1): -7.0}


def constellation_direct(qm: int) -> dict[tuple[int, ...], complex]:
    """Label (b0..b_{qm-1}) -> point; even bits on I, odd bits on Q."""
    lv = gray_levels(qm)
    scale = {2: math.sqrt(2), 4: math.sqrt(10), 6: math.sqrt(42)}[qm]
    out = {}
    for label in itertools.product((0, 1), repeat=qm):
        i = lv[label[0::2]]
        q = lv[label[1::2]]
        out[label] = complex(i, q) / scale
    return out


def maxlog_llr_direct(y: complex, qm: int, noise_var: float) -> list[float]:
    pts = constellation_direct(qm)
    llr = []
    for b in range(qm):
        d0 = min(abs(y - p) ** 2 for lab, p in pts.items() if lab[b] == 0)
        d1 = min(abs(y - p) ** 2 for lab, p in pts.items() if lab[b] == 1)
        llr.append((d1 - d0) / noise_var)
    return llr


def subblock_perm_direct() -> list[int]:
    """Bit-reversal of the 5-bit column index."""
    return [int(f"{c:05b}"[::-1], 2) for c in range(32)]


def subblock_interleave_direct(stream: list, d: int, second_parity: bool) -> list:
    """36.212 sub-block interleaver for one stream; None marks a <NULL>."""
    cols = 32
    rows = -(-d // cols)
    nd = rows * cols - d
    y = [None] * nd + list(stream)
    perm = subblock_perm_direct()
    kpi = rows * cols
    if not second_parity:
        return [y[r * cols + perm[c]] for c in range(cols) for r in range(rows)]
    out = []
    for k in range(kpi):
        pi = (perm[k // rows] + cols * (k % rows) + 1) % kpi
        out.append(y[pi])
    return out


def circular_buffer_direct(k: int) -> list[tuple[int, int]]:
    """Buffer entries as (stream, position) pairs, None for padding."""
    d = k + 4
    v0 = subblock_interleave_direct([(0, i) for i in range(d)], d, False)
    v1 = subblock_interleave_direct([(1, i) for i in range(d)], d, False)
    v2 = subblock_interleave_direct([(2, i) for i in range(d)], d, True)
    return v0 + [x for pair in zip(v1, v2) for x in pair]


def rate_match_direct(k: int, e: int, rv: int = 0) -> list[tuple[int, int]]:
    buf = circular_buffer_direct(k)
    ncb = len(buf)
    rows = ncb // 96
    k0 = rows * (2 * math.ceil(ncb / (8 * rows)) * rv + 2)
    out, j = [], 0
    while len(out) < e:
        item = buf[(k0 + j) % ncb]
        if item is not None:
            out.append(item)
        j += 1
    return out
