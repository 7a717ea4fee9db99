"""Turbo rate matching: sub-block interleaving and circular-buffer bit selection.

Rate matching is expressed as an index map from output position to position
in the flattened coded stream ``[d0, d1, d2]``; matching gathers through the
map and dematching scatter-adds soft values back through it.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..fixtures import load_table

COLUMNS = 32


@lru_cache(maxsize=1)
def column_permutation() -> np.ndarray:
    rows = sorted(load_table("subblock_perm.csv"), key=lambda r: r["column"])
    perm = np.array([r["permuted"] for r in rows], dtype=np.int64)
    perm.setflags(write=False)
    return perm


def _subblock_index(d: int, stream: int) -> tuple[np.ndarray, int]:
    """Source index (into the length-d stream, -1 for dummy) of each interleaved slot."""
    rows = -(-d // COLUMNS)
    kpi = rows * COLUMNS
    nd = kpi - d
    perm = column_permutation()
    k = np.arange(kpi)
    if stream < 2:
        pos = perm[k // rows] + COLUMNS * (k % rows)
    else:
        pos = (perm[k // rows] + COLUMNS * (k % rows) + 1) % kpi
    return pos - nd, rows


@lru_cache(maxsize=None)
def circular_buffer(k: int, filler: int = 0) -> tuple[np.ndarray, int]:
    """Circular buffer as indices into ``[d0, d1, d2]`` (-1 marks NULL) and its row count."""
    d = k + 4
    v0, rows = _subblock_index(d, 0)
    v1, _ = _subblock_index(d, 1)
    v2, _ = _subblock_index(d, 2)

    def to_flat(v: np.ndarray, stream: int, null_head: int) -> np.ndarray:
        out = np.where(v >= 0, v + stream * d, -1)
        out[(v >= 0) & (v < null_head)] = -1
        return out

    w = np.empty(3 * v0.size, dtype=np.int64)
    w[:v0.size] = to_flat(v0, 0, filler)
    w[v0.size::2] = to_flat(v1, 1, filler)
    w[v0.size + 1::2] = to_flat(v2, 2, 0)
    w.setflags(write=False)
    return w, rows


@lru_cache(maxsize=None)
def rate_match_indices(k: int, e: int, rv: int = 0, filler: int = 0) -> np.ndarray:
    """Flat coded-stream index of each of the ``e`` rate-matched bits."""
    if e < 1:
        raise ValueError("E must be at least 1")
    if rv not in (0, 1, 2, 3):
        raise ValueError(f"redundancy version must be 0..3, got {rv}")
    w, rows = circular_buffer(k, filler)
    ncb = w.size
    k0 = rows * (2 * -(-ncb // (8 * rows)) * rv + 2)
    valid = w[w >= 0]
    # start at the first valid entry at or after k0 in circular order
    start = int(np.count_nonzero(w[:k0 % ncb] >= 0))
    idx = valid[(start + np.arange(e)) % valid.size]
    idx.setflags(write=False)
    return idx


def rate_match(coded, e: int, rv: int = 0, filler: int = 0) -> np.ndarray:
    """Select ``e`` bits from the flattened 3K + 12 coded stream."""
    coded = np.asarray(coded)
    if coded.ndim != 1 or coded.size % 3 or coded.size // 3 - 4 < 1:
        raise ValueError(f"coded stream of length {coded.size} is not 3K + 12")
    k = coded.size // 3 - 4
    return coded[rate_match_indices(k, e, rv, filler)]


def rate_dematch(llrs, k: int, rv: int = 0, filler: int = 0) -> np.ndarray:
    """Accumulate ``len(llrs)`` soft values back onto the 3K + 12 coded positions.

    Repeated positions are summed; punctured and NULL positions stay zero.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.size < 1:
        raise ValueError("rate dematching needs a non-empty 1-D LLR vector")
    idx = rate_match_indices(k, llrs.size, rv, filler)
    return np.bincount(idx, weights=llrs, minlength=3 * (k + 4))
