"""Uncoded BER conformance of the three modulation formats over the OFDM link."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from ..channel import ChannelConfig, apply_awgn, derive_rng
from ..params import GridConfig, grid_dimensions, snr_from_es_n0_db
from ..phy.modulation import axis_table, hard_demodulate, modulate
from ..phy.ofdm import ofdm_demodulate, ofdm_modulate
from ..phy.resources import demap_resources, map_resources
from ..phy.scrambling import pdsch_c_init
from .stats import binomial_sigma


def qfunc(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def gray_qam_ber(qm: int, es_n0: float) -> float:
    """Hard-decision BER of the Gray-mapped constellation on AWGN (unit Es).

    Exact per-axis evaluation: for every level and every bit of the axis,
    integrate the Gaussian over the decision regions carrying the other bit
    value.  For QPSK this reduces to Q(sqrt(2 Eb/N0)).
    """
    if es_n0 == math.inf:
        return 0.0
    levels, labels = axis_table(qm)
    order = np.argsort(levels)
    lv, lb = levels[order], labels[order]
    s = math.sqrt(1.0 / (2.0 * es_n0))  # per-axis noise std for complex variance 1/es_n0
    edges = np.concatenate([[-np.inf], (lv[1:] + lv[:-1]) / 2.0, [np.inf]])
    total = 0.0
    for a, bits in zip(lv, lb):
        # probability of landing in each decision interval
        p = qfunc((edges[:-1] - a) / s) - qfunc((edges[1:] - a) / s)
        total += float(np.sum(p[:, None] * (lb != bits[None, :])))
    return total / (lv.size * lb.shape[1])


def nearest_neighbour_ber(qm: int, es_n0: float) -> float:
    """Textbook approximation (4/log2 M)(1 - 1/sqrt M) Q(sqrt(3 Es/N0 / (M - 1)))."""
    m = 2**qm
    return float((4.0 / qm) * (1 - 1 / math.sqrt(m)) * qfunc(math.sqrt(3.0 * es_n0 / (m - 1))))


def es_n0_for_ber(qm: int, ber: float) -> float:
    """Es/N0 (dB) at which the exact Gray-QAM BER equals ``ber``."""
    return brentq(lambda db: gray_qam_ber(qm, 10 ** (db / 10)) - ber, -10.0, 40.0, xtol=1e-6)


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    es_n0_db: float
    bits: int
    bit_errors: int
    theory: float
    tolerance: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits

    @property
    def passed(self) -> bool:
        return abs(self.ber - self.theory) <= self.tolerance


@dataclass(frozen=True)
class BerReport:
    qm: int
    points: tuple[BerPoint, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.points)


def measure_uncoded_ber(qm: int, snr_db: float, n_bits: int, seed: int = 0,
                        cfg: GridConfig | None = None, sigmas: float = 3.0) -> BerPoint:
    """Random bits -> mapper -> OFDM -> AWGN -> OFDM demod -> hard demapper.

    The reference BER is the exact Gray-QAM BER averaged over the per-subframe
    noise variances actually applied.
    """
    cfg = cfg or GridConfig()
    n_data = grid_dimensions(cfg)[0]
    per_sf = n_data * qm
    n_sf = max(1, -(-n_bits // per_sf))
    bit_rng = derive_rng(seed, "ber_bits", qm)
    noise_rng = derive_rng(seed, "ber_noise", qm)
    chan = ChannelConfig(snr_db, seed)
    errors = 0
    theory = 0.0
    for i in range(n_sf):
        c_init = pdsch_c_init(i % 10, cell_id=cfg.cell_id)
        bits = bit_rng.integers(0, 2, per_sf, dtype=np.uint8)
        grid = map_resources(modulate(bits, qm), cfg, c_init)
        rx, noise_var = apply_awgn(ofdm_modulate(grid), chan, noise_rng)
        data, _ = demap_resources(ofdm_demodulate(rx, cfg))
        errors += int(np.count_nonzero(hard_demodulate(data, qm) != bits))
        theory += gray_qam_ber(qm, 1.0 / noise_var if noise_var > 0 else math.inf)
    theory /= n_sf
    total = n_sf * per_sf
    es_n0 = 10 * math.log10(1.0 / noise_var) if noise_var > 0 else math.inf
    return BerPoint(snr_db, es_n0, total, errors, theory, sigmas * binomial_sigma(theory, total))


def conformance_ber(qm: int, snr_points, n_bits: int = 100_000, seed: int = 0,
                    cfg: GridConfig | None = None) -> BerReport:
    """Measured uncoded BER within 3 binomial sigmas of theory at every SNR point."""
    if qm not in (2, 4, 6):
        raise ValueError(f"qm must be 2, 4 or 6, got {qm}")
    pts = tuple(measure_uncoded_ber(qm, float(s), n_bits, seed + i, cfg) for i, s in enumerate(snr_points))
    return BerReport(qm, pts)


def default_ber_snr_points(qm: int, targets=(3e-2, 1e-2, 3e-3)) -> list[float]:
    """Time-domain SNRs (dB) where the theoretical BER hits ``targets``.

    Es/N0 per RE maps to time-domain SNR through the 72/128 occupancy; the
    placeholder control/reference symbols also have unit energy, so the
    time-domain signal power is 72/128 of the mean RE power.
    """
    return [round(snr_from_es_n0_db(es_n0_for_ber(qm, t)), 2) for t in targets]
