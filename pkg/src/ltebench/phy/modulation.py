"""Gray-mapped QPSK / 16-QAM / 64-QAM and max-log soft demapping.

Bits alternate between the in-phase and quadrature axes: for a symbol with
bits b0..b(qm-1), the even bits pick the I level and the odd bits the Q level.
The first bit of each axis selects the sign (0 -> positive), the remaining
bits the magnitude, Gray-coded.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

SCALE = {2: np.sqrt(2.0), 4: np.sqrt(10.0), 6: np.sqrt(42.0)}


def _check_qm(qm: int) -> None:
    if qm not in SCALE:
        raise ValueError(f"qm must be 2, 4 or 6, got {qm}")


def _axis_level(bits: np.ndarray) -> np.ndarray:
    """Unnormalised PAM level of an axis from its bits (shape (..., qm/2))."""
    n = bits.shape[-1]
    mag = np.ones(bits.shape[:-1], dtype=np.int64)
    # magnitude recursion: 1 bit -> 1; each further bit b maps m -> 2^j - (1-2b)*m
    for j in range(n - 1, 0, -1):
        mag = (1 << (n - j)) - (1 - 2 * bits[..., j].astype(np.int64)) * mag
    return (1 - 2 * bits[..., 0].astype(np.int64)) * mag


@lru_cache(maxsize=None)
def axis_table(qm: int) -> tuple[np.ndarray, np.ndarray]:
    """(levels, bit labels) of one axis, levels normalised for unit symbol energy."""
    _check_qm(qm)
    n = qm // 2
    labels = np.array([[(v >> (n - 1 - i)) & 1 for i in range(n)] for v in range(2**n)],
                      dtype=np.uint8)
    levels = _axis_level(labels) / SCALE[qm]
    labels.setflags(write=False)
    levels.setflags(write=False)
    return levels, labels


@lru_cache(maxsize=None)
def constellation(qm: int) -> np.ndarray:
    """All 2**qm points, indexed by the bit pattern read MSB-first."""
    _check_qm(qm)
    bits = np.array([[(v >> (qm - 1 - i)) & 1 for i in range(qm)] for v in range(2**qm)],
                    dtype=np.uint8)
    pts = modulate(bits.ravel(), qm)
    pts.setflags(write=False)
    return pts


def modulate(bits, qm: int) -> np.ndarray:
    _check_qm(qm)
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % qm:
        raise ValueError(f"bit count {bits.size} not divisible by qm={qm}")
    b = bits.reshape(-1, qm)
    i = _axis_level(b[:, 0::2])
    q = _axis_level(b[:, 1::2])
    return (i + 1j * q) / SCALE[qm]


def soft_demodulate(symbols, qm: int, noise_var: float) -> np.ndarray:
    """Max-log LLRs: (min over b=1 of |y-s|^2 - min over b=0 of |y-s|^2) / noise_var."""
    _check_qm(qm)
    if not noise_var > 0:
        raise ValueError(f"noise variance must be positive, got {noise_var}")
    y = np.asarray(symbols, dtype=np.complex128)
    levels, labels = axis_table(qm)
    n = qm // 2
    out = np.empty((y.size, qm))
    for axis, comp in ((0, y.real), (1, y.imag)):
        d = (comp[:, None] - levels[None, :]) ** 2
        for j in range(n):
            one = labels[:, j] == 1
            llr = d[:, one].min(axis=1) - d[:, ~one].min(axis=1)
            out[:, 2 * j + axis] = llr
    return (out / noise_var).ravel()


def hard_demodulate(symbols, qm: int) -> np.ndarray:
    return (soft_demodulate(symbols, qm, 1.0) < 0).astype(np.uint8)
