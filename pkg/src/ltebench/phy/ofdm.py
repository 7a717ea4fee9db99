"""OFDM modulation for the 72-subcarrier / 128-point 1.4 MHz numerology.

Subcarriers sit symmetrically around an unused DC bin: grid rows 0..35 go to
the negative-frequency bins 92..127 and rows 36..71 to bins 1..36.  The
transforms are unitary, so per-RE noise variance equals per-sample noise
variance.
"""

from __future__ import annotations

import numpy as np

from ..params import CP_FIRST, CP_OTHER, FFT_SIZE, SYMBOLS_PER_SLOT, GridConfig, samples_per_subframe
from .resources import ResourceGrid


def subcarrier_bins(n_sc: int = 72, nfft: int = FFT_SIZE) -> np.ndarray:
    half = n_sc // 2
    k = np.arange(n_sc)
    return np.where(k < half, nfft - half + k, k - half + 1)


def cp_lengths(n_symbols: int = 14) -> np.ndarray:
    return np.array([CP_FIRST if l % SYMBOLS_PER_SLOT == 0 else CP_OTHER for l in range(n_symbols)])


def ofdm_modulate(grid: ResourceGrid) -> np.ndarray:
    cfg = grid.cfg
    bins = subcarrier_bins(cfg.subcarriers, cfg.fft_size)
    freq = np.zeros((cfg.fft_size, cfg.symbols), dtype=np.complex128)
    freq[bins, :] = grid.values
    body = np.fft.ifft(freq, axis=0, norm="ortho")
    out = []
    for l, cp in enumerate(cp_lengths(cfg.symbols)):
        out.append(body[-cp:, l])
        out.append(body[:, l])
    return np.concatenate(out)


def _symbol_starts(cfg: GridConfig) -> np.ndarray:
    lengths = cp_lengths(cfg.symbols) + cfg.fft_size
    return np.concatenate([[0], np.cumsum(lengths)[:-1]]) + cp_lengths(cfg.symbols)


def strip_cp(samples, cfg: GridConfig | None = None) -> np.ndarray:
    """(fft_size, symbols) array of CP-free symbol bodies."""
    cfg = cfg or GridConfig()
    samples = np.asarray(samples, dtype=np.complex128)
    expected = samples_per_subframe(cfg)
    if samples.size != expected:
        raise ValueError(f"expected {expected} samples per subframe, got {samples.size}")
    idx = _symbol_starts(cfg)[None, :] + np.arange(cfg.fft_size)[:, None]
    return samples[idx]


def ofdm_demodulate(samples, cfg: GridConfig | None = None) -> ResourceGrid:
    cfg = cfg or GridConfig()
    body = strip_cp(samples, cfg)
    freq = np.fft.fft(body, axis=0, norm="ortho")
    return ResourceGrid(freq[subcarrier_bins(cfg.subcarriers, cfg.fft_size), :], cfg)
