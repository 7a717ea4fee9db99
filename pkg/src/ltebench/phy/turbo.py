"""Rate-1/3 turbo code: two 8-state RSC encoders around a QPP interleaver.

Constituent code: feedback 1 + D^2 + D^3, feedforward 1 + D + D^3, each
terminated to the zero state with three tail steps.  The decoder is
max-log-MAP with a fixed number of iterations and scaled extrinsic exchange.

LLR convention throughout: L = log P(b=0) / P(b=1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .crc import crc24a_check
from .qpp import qpp_coefficients, qpp_permutation

EXTRINSIC_SCALE = 0.75
MAX_ITERATIONS = 8
FILLER_LLR = 1.0e6
_NEG = -1.0e300


def _trellis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # state = (s1 << 2) | (s2 << 1) | s3, s1 the most recent register
    next_state = np.zeros((8, 2), dtype=np.int64)
    parity = np.zeros((8, 2), dtype=np.int64)
    tail_input = np.zeros(8, dtype=np.int64)
    for s in range(8):
        s1, s2, s3 = (s >> 2) & 1, (s >> 1) & 1, s & 1
        tail_input[s] = s2 ^ s3
        for u in (0, 1):
            a = u ^ s2 ^ s3
            parity[s, u] = a ^ s1 ^ s3
            next_state[s, u] = (a << 2) | (s1 << 1) | s2
    return next_state, parity, tail_input


NEXT_STATE, PARITY, TAIL_INPUT = _trellis()


@njit(cache=True)
def _rsc_encode(u, next_state, parity, tail_input):
    k = u.size
    z = np.empty(k + 3, dtype=np.uint8)
    x_tail = np.empty(3, dtype=np.uint8)
    s = 0
    for i in range(k):
        b = u[i]
        z[i] = parity[s, b]
        s = next_state[s, b]
    for t in range(3):
        b = tail_input[s]
        x_tail[t] = b
        z[k + t] = parity[s, b]
        s = next_state[s, b]
    return z, x_tail


@njit(cache=True)
def _siso(ls, lp, la, tail_x, tail_z, next_state, parity, tail_input):
    """One max-log-MAP pass; returns extrinsic LLRs of the K information bits."""
    k = ls.size
    n = k + 3
    alpha = np.full((n + 1, 8), _NEG)
    beta = np.full((n + 1, 8), _NEG)
    alpha[0, 0] = 0.0
    for i in range(n):
        for s in range(8):
            a = alpha[i, s]
            if a <= _NEG:
                continue
            if i < k:
                for u in range(2):
                    g = 0.5 * ((1 - 2 * u) * (ls[i] + la[i]) + (1 - 2 * parity[s, u]) * lp[i])
                    ns = next_state[s, u]
                    if a + g > alpha[i + 1, ns]:
                        alpha[i + 1, ns] = a + g
            else:
                t = i - k
                u = tail_input[s]
                g = 0.5 * ((1 - 2 * u) * tail_x[t] + (1 - 2 * parity[s, u]) * tail_z[t])
                ns = next_state[s, u]
                if a + g > alpha[i + 1, ns]:
                    alpha[i + 1, ns] = a + g
        m = alpha[i + 1, 0]
        for s in range(1, 8):
            if alpha[i + 1, s] > m:
                m = alpha[i + 1, s]
        for s in range(8):
            if alpha[i + 1, s] > _NEG:
                alpha[i + 1, s] -= m

    beta[n, 0] = 0.0
    for i in range(n - 1, -1, -1):
        for s in range(8):
            best = _NEG
            if i < k:
                for u in range(2):
                    b = beta[i + 1, next_state[s, u]]
                    if b <= _NEG:
                        continue
                    g = 0.5 * ((1 - 2 * u) * (ls[i] + la[i]) + (1 - 2 * parity[s, u]) * lp[i])
                    if g + b > best:
                        best = g + b
            else:
                t = i - k
                u = tail_input[s]
                b = beta[i + 1, next_state[s, u]]
                if b > _NEG:
                    best = 0.5 * ((1 - 2 * u) * tail_x[t] + (1 - 2 * parity[s, u]) * tail_z[t]) + b
            beta[i, s] = best
        m = beta[i, 0]
        for s in range(1, 8):
            if beta[i, s] > m:
                m = beta[i, s]
        for s in range(8):
            if beta[i, s] > _NEG:
                beta[i, s] -= m

    ext = np.empty(k)
    for i in range(k):
        m0 = _NEG
        m1 = _NEG
        for s in range(8):
            a = alpha[i, s]
            if a <= _NEG:
                continue
            for u in range(2):
                b = beta[i + 1, next_state[s, u]]
                if b <= _NEG:
                    continue
                v = a + 0.5 * (1 - 2 * parity[s, u]) * lp[i] + b
                if u == 0:
                    if v > m0:
                        m0 = v
                elif v > m1:
                    m1 = v
        ext[i] = m0 - m1
    return ext


@njit(cache=True)
def _decode(ls, lp1, lp2, tx1, tz1, tx2, tz2, perm, iterations, scale,
            next_state, parity, tail_input):
    k = ls.size
    ls_i = np.empty(k)
    for i in range(k):
        ls_i[i] = ls[perm[i]]
    la1 = np.zeros(k)
    la2 = np.empty(k)
    app = np.empty(k)
    for _ in range(iterations):
        le1 = _siso(ls, lp1, la1, tx1, tz1, next_state, parity, tail_input)
        for i in range(k):
            la2[i] = scale * le1[perm[i]]
        le2 = _siso(ls_i, lp2, la2, tx2, tz2, next_state, parity, tail_input)
        for i in range(k):
            la1[perm[i]] = scale * le2[i]
            app[perm[i]] = ls_i[i] + la2[i] + le2[i]
    return app


@dataclass(frozen=True)
class TurboCodeword:
    """Three coded streams of length K + 4 (tail bits in the last four slots)."""

    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray

    @property
    def k(self) -> int:
        return self.systematic.size - 4

    def flat(self) -> np.ndarray:
        return np.concatenate([self.systematic, self.parity1, self.parity2])

    def tail_bits(self) -> np.ndarray:
        k = self.k
        return np.concatenate([self.systematic[k:], self.parity1[k:], self.parity2[k:]])


@dataclass(frozen=True)
class DecodeResult:
    bits: np.ndarray
    crc_pass: bool | None
    iterations: int
    llr: np.ndarray


def turbo_encode(bits) -> TurboCodeword:
    """Encode K bits (filler already zero) into 3K + 12 coded bits."""
    u = np.ascontiguousarray(bits, dtype=np.uint8)
    k = u.size
    if k not in qpp_coefficients():
        raise ValueError(f"K={k} is not a turbo interleaver size")
    z1, x1 = _rsc_encode(u, NEXT_STATE, PARITY, TAIL_INPUT)
    u2 = np.ascontiguousarray(u[qpp_permutation(k)])
    z2, x2 = _rsc_encode(u2, NEXT_STATE, PARITY, TAIL_INPUT)
    d0 = np.concatenate([u, [x1[0], z1[k + 1], x2[0], z2[k + 1]]]).astype(np.uint8)
    d1 = np.concatenate([z1[:k], [z1[k], x1[2], z2[k], x2[2]]]).astype(np.uint8)
    d2 = np.concatenate([z2[:k], [x1[1], z1[k + 2], x2[1], z2[k + 2]]]).astype(np.uint8)
    return TurboCodeword(d0, d1, d2)


def split_streams(llrs, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.size != 3 * (k + 4):
        raise ValueError(f"expected {3 * (k + 4)} LLRs for K={k}, got {llrs.size}")
    d = k + 4
    return llrs[:d], llrs[d:2 * d], llrs[2 * d:]


def block_size_from_length(n: int) -> int:
    if n % 3 or n // 3 - 4 not in qpp_coefficients():
        raise ValueError(f"{n} is not 3K + 12 for any turbo interleaver size K")
    return n // 3 - 4


def turbo_decode(llrs, max_iterations: int = 5, filler: int = 0,
                 scale: float = EXTRINSIC_SCALE, check_crc: bool = True) -> DecodeResult:
    """Max-log-MAP decoding of a 3K + 12 soft codeword.

    Runs exactly ``max_iterations`` iterations; LLR == 0 decides bit 0.
    With ``check_crc`` the decoded block (filler stripped) is tested as a
    CRC-24A codeword.
    """
    if not 1 <= max_iterations <= MAX_ITERATIONS:
        raise ValueError(f"iterations must be in 1..{MAX_ITERATIONS}, got {max_iterations}")
    llrs = np.asarray(llrs, dtype=np.float64)
    k = block_size_from_length(llrs.size)
    d0, d1, d2 = split_streams(llrs, k)
    ls = d0[:k].copy()
    ls[:filler] = FILLER_LLR
    tx1 = np.array([d0[k], d2[k], d1[k + 1]])
    tz1 = np.array([d1[k], d0[k + 1], d2[k + 1]])
    tx2 = np.array([d0[k + 2], d2[k + 2], d1[k + 3]])
    tz2 = np.array([d1[k + 2], d0[k + 3], d2[k + 3]])
    perm = np.ascontiguousarray(qpp_permutation(k))
    app = _decode(ls, np.ascontiguousarray(d1[:k]), np.ascontiguousarray(d2[:k]),
                  tx1, tz1, tx2, tz2, perm, max_iterations, scale,
                  NEXT_STATE, PARITY, TAIL_INPUT)
    bits = (app < 0).astype(np.uint8)
    crc_pass = crc24a_check(bits[filler:]) if check_crc else None
    return DecodeResult(bits, crc_pass, max_iterations, app)
