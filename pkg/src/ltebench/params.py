"""LTE numerology, MCS/TBS tables and per-interface data volumes (1.4 MHz, 6 PRB)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .fixtures import load_table

N_PRB = 6
SUBCARRIERS_PER_PRB = 12
SYMBOLS_PER_SUBFRAME = 14
SYMBOLS_PER_SLOT = 7
FFT_SIZE = 128
SAMPLE_RATE = 1.92e6
CP_FIRST = 10
CP_OTHER = 9
TTI_SECONDS = 1e-3
CRC_BITS = 24
MAX_CODE_RATE = 0.93
MAX_MCS = 28

# CRS symbols of antenna port 0 within a subframe (normal CP); two REs per PRB each.
CRS_SYMBOLS = (0, 4, 7, 11)


class ParamError(ValueError):
    pass


class RateUnachievable(ParamError):
    pass


@dataclass(frozen=True)
class McsEntry:
    mcs: int
    qm: int
    itbs: int


@dataclass(frozen=True)
class GridConfig:
    n_prb: int = N_PRB
    control_symbols: int = 3
    crs_per_prb: int = 6
    cell_id: int = 1

    def __post_init__(self):
        if self.n_prb != N_PRB:
            raise ParamError(f"only {N_PRB} PRB (1.4 MHz) is supported, got {self.n_prb}")
        if not 0 <= self.control_symbols <= 4:
            raise ParamError(f"control_symbols must be in 0..4, got {self.control_symbols}")
        available = 2 * sum(1 for s in CRS_SYMBOLS if s >= self.control_symbols)
        if self.crs_per_prb < 0 or self.crs_per_prb > available or self.crs_per_prb % 2:
            raise ParamError(
                f"crs_per_prb={self.crs_per_prb} not realisable outside a "
                f"{self.control_symbols}-symbol control region (even, <= {available})"
            )

    @property
    def subcarriers(self) -> int:
        return SUBCARRIERS_PER_PRB * self.n_prb

    @property
    def symbols(self) -> int:
        return SYMBOLS_PER_SUBFRAME

    @property
    def fft_size(self) -> int:
        return FFT_SIZE

    @property
    def sample_rate(self) -> float:
        return SAMPLE_RATE


@dataclass(frozen=True)
class InterfaceVolumes:
    mcs: int
    qm: int
    tb_bits: int
    crc_bits: int
    code_blocks: int
    k: int
    filler: int
    coded_bits: int
    e: int
    symbols: int
    data_res: int
    samples: int
    code_rate: float
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def rate_achievable(self) -> bool:
        return self.code_rate <= MAX_CODE_RATE

    def as_dict(self) -> dict:
        return {
            "mcs": self.mcs, "qm": self.qm, "tb_bits": self.tb_bits,
            "crc_bits": self.crc_bits, "code_blocks": self.code_blocks, "k": self.k,
            "filler": self.filler, "coded_bits": self.coded_bits, "e": self.e,
            "symbols": self.symbols, "data_res": self.data_res, "samples": self.samples,
            "code_rate": self.code_rate, "diagnostics": list(self.diagnostics),
        }


def _mcs_rows() -> dict[int, McsEntry]:
    return {r["mcs"]: McsEntry(r["mcs"], r["qm"], r["itbs"]) for r in load_table("mcs_table.csv")}


def _tbs_rows() -> dict[tuple[int, int], int]:
    return {(r["itbs"], r["n_prb"]): r["tbs"] for r in load_table("tbs_table.csv")}


def mcs_to_params(mcs: int) -> McsEntry:
    rows = _mcs_rows()
    if mcs not in rows:
        raise ParamError(f"mcs must be in 0..{MAX_MCS}, got {mcs}")
    return rows[mcs]


def transport_block_size(itbs: int, n_prb: int = N_PRB) -> int:
    if n_prb != N_PRB:
        raise ParamError(f"unsupported n_prb={n_prb}; only {N_PRB} is tabulated")
    try:
        return _tbs_rows()[(itbs, n_prb)]
    except KeyError:
        raise ParamError(f"itbs must be in 0..26, got {itbs}") from None


def tbs_for_mcs(mcs: int) -> int:
    return transport_block_size(mcs_to_params(mcs).itbs)


def samples_per_subframe(cfg: GridConfig | None = None) -> int:
    per_slot = (FFT_SIZE + CP_FIRST) + (SYMBOLS_PER_SLOT - 1) * (FFT_SIZE + CP_OTHER)
    return 2 * per_slot


def grid_dimensions(cfg: GridConfig) -> tuple[int, int]:
    """(data REs per subframe, time samples per subframe)."""
    per_prb = SUBCARRIERS_PER_PRB * (SYMBOLS_PER_SUBFRAME - cfg.control_symbols) - cfg.crs_per_prb
    return cfg.n_prb * per_prb, samples_per_subframe(cfg)


def interface_volumes(mcs: int, cfg: GridConfig | None = None, strict: bool = False) -> InterfaceVolumes:
    """Data volume on every interface of the PDSCH chain for one subframe.

    A code rate above 0.93 is reported in ``diagnostics``; with ``strict`` it
    raises :class:`RateUnachievable` instead.
    """
    from .phy.segmentation import segmentation_sizes

    cfg = cfg or GridConfig()
    entry = mcs_to_params(mcs)
    tbs = transport_block_size(entry.itbs, cfg.n_prb)
    b = tbs + CRC_BITS
    c, k, filler = segmentation_sizes(b)
    data_res, samples = grid_dimensions(cfg)
    e = data_res * entry.qm
    rate = b / e
    diags: tuple[str, ...] = ()
    if rate > MAX_CODE_RATE:
        msg = f"rate unachievable: mcs {mcs} code rate {rate:.4f} > {MAX_CODE_RATE}"
        if strict:
            raise RateUnachievable(msg)
        diags = (msg,)
    return InterfaceVolumes(
        mcs=mcs, qm=entry.qm, tb_bits=tbs, crc_bits=b, code_blocks=c, k=k,
        filler=filler, coded_bits=3 * k + 12, e=e, symbols=e // entry.qm,
        data_res=data_res, samples=samples, code_rate=rate, diagnostics=diags,
    )


def select_mcs_for_target(bler_by_mcs: Mapping[int, float], target: float = 0.1) -> Optional[int]:
    """Highest MCS whose BLER does not exceed ``target``; None if none qualifies."""
    if not bler_by_mcs:
        raise ParamError("empty BLER table")
    for mcs, bler in bler_by_mcs.items():
        if not 0.0 <= bler <= 1.0 or math.isnan(bler):
            raise ParamError(f"BLER for mcs {mcs} outside [0, 1]: {bler}")
    ok = [m for m, b in bler_by_mcs.items() if b <= target]
    return max(ok) if ok else None


def es_n0_db(snr_db: float) -> float:
    """Per-RE Es/N0 for a time-domain SNR (72 of 128 bins occupied)."""
    return snr_db + 10.0 * math.log10(FFT_SIZE / (SUBCARRIERS_PER_PRB * N_PRB))


def snr_from_es_n0_db(es_n0: float) -> float:
    return es_n0 - 10.0 * math.log10(FFT_SIZE / (SUBCARRIERS_PER_PRB * N_PRB))
