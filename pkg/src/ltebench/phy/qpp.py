"""Quadratic permutation polynomial interleaver for the turbo code."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..fixtures import load_table


@lru_cache(maxsize=1)
def qpp_coefficients() -> dict[int, tuple[int, int]]:
    return {r["k"]: (r["f1"], r["f2"]) for r in load_table("qpp_table.csv")}


def valid_block_sizes() -> list[int]:
    return sorted(qpp_coefficients())


@lru_cache(maxsize=None)
def qpp_permutation(k: int) -> np.ndarray:
    """Index vector ``pi`` with ``interleaved[i] = x[pi[i]]``."""
    try:
        f1, f2 = qpp_coefficients()[k]
    except KeyError:
        raise ValueError(f"K={k} is not a turbo interleaver size") from None
    i = np.arange(k, dtype=np.int64)
    # (f1*i + f2*i^2) mod K, reduced stepwise to stay inside int64
    perm = (f1 * i + f2 * ((i * i) % k)) % k
    perm.setflags(write=False)
    return perm


@lru_cache(maxsize=None)
def qpp_inverse(k: int) -> np.ndarray:
    perm = qpp_permutation(k)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(k)
    inv.setflags(write=False)
    return inv


def qpp_interleave(x) -> np.ndarray:
    x = np.asarray(x)
    return x[qpp_permutation(x.size)]


def qpp_deinterleave(x) -> np.ndarray:
    x = np.asarray(x)
    return x[qpp_inverse(x.size)]
