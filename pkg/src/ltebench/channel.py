"""AWGN channel with SNR defined on time-domain samples."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

NOISELESS = math.inf
RNG_ALGORITHM = "numpy.PCG64 via SeedSequence(entropy=seed, spawn_key=(crc32(stream),) + extra)"


def derive_rng(seed: int, stream: str, *extra: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, stream name, *extra)``."""
    key = (zlib.crc32(stream.encode()),) + tuple(int(e) for e in extra)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def parse_snr(value) -> float:
    """Accept a number or one of the noiseless sentinels ('inf', 'noiseless')."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "noiseless", "none"):
            return NOISELESS
        value = float(value)
    value = float(value)
    if math.isnan(value) or value == -math.inf:
        raise ValueError(f"invalid SNR {value!r}")
    return value


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float = NOISELESS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "snr_db", parse_snr(self.snr_db))

    @property
    def noiseless(self) -> bool:
        return self.snr_db == NOISELESS


def apply_awgn(samples, cfg: ChannelConfig, rng: np.random.Generator | None = None
               ) -> tuple[np.ndarray, float]:
    """Add circular complex Gaussian noise; returns (noisy samples, noise variance).

    The variance is ``mean|x|^2 / 10**(snr_db/10)``, measured on this buffer.
    Noise draws do not depend on the SNR, so runs at different SNRs with the
    same generator see scaled copies of one noise realisation.
    """
    x = np.asarray(samples, dtype=np.complex128)
    if x.size == 0:
        raise ValueError("cannot apply AWGN to an empty buffer")
    if rng is None:
        rng = derive_rng(cfg.seed, "awgn")
    w = rng.standard_normal((2, x.size))
    if cfg.noiseless:
        return x.copy(), 0.0
    p_x = float(np.mean(np.abs(x) ** 2))
    noise_var = p_x / 10.0 ** (cfg.snr_db / 10.0)
    n = math.sqrt(noise_var / 2.0) * (w[0] + 1j * w[1])
    return x + n, noise_var


def measure_snr(clean, noisy) -> float:
    clean = np.asarray(clean, dtype=np.complex128)
    noisy = np.asarray(noisy, dtype=np.complex128)
    if clean.shape != noisy.shape:
        raise ValueError("buffers must have equal length")
    p_sig = float(np.sum(np.abs(clean) ** 2))
    if p_sig == 0.0:
        raise ValueError("undefined SNR: clean signal has zero power")
    p_noise = float(np.sum(np.abs(noisy - clean) ** 2))
    if p_noise == 0.0:
        return NOISELESS
    return 10.0 * math.log10(p_sig / p_noise)
