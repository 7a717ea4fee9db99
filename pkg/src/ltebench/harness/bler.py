"""BLER / throughput / computing-cost measurements over the PDSCH link."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..params import MAX_MCS, TTI_SECONDS, GridConfig, interface_volumes, tbs_for_mcs
from ..pipeline.cost import CostReport, merge_reports
from ..pipeline.runtime import Runtime
from .chain import PHY_BLOCKS, RX_BLOCKS, SINK, pdsch_graph
from .stats import clopper_pearson, upper_bound

log = logging.getLogger(__name__)

BLER_TARGET = 0.1
DEFAULT_MIN_BLOCK_ERRORS = 100
MIN_BLOCKS_PER_POINT = 100
SNR_LATTICE_STEP = 0.25
SNR_SEARCH_RANGE = (-10.0, 30.0)
SEED_RULE = "point seed = SeedSequence(master_seed, spawn_key=(mcs,)).generate_state(1, uint64)[0]"


class ThresholdUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class BlerPoint:
    mcs: int
    snr_db: float
    iterations: int
    blocks: int
    block_errors: int
    bits: int
    bit_errors: int
    throughput_bps: float
    seed: int
    cost: CostReport | None = None
    error_flags: tuple[bool, ...] = field(default=(), repr=False)
    diagnostics: tuple[str, ...] = ()
    skipped: bool = False
    failed: str | None = None
    isolated: bool = True

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks if self.blocks else math.nan

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else math.nan

    @property
    def rx_total_ns(self) -> int:
        if self.cost is None:
            return 0
        return sum(b.total_ns for b in self.cost.blocks if b.block in RX_BLOCKS)

    @property
    def rx_mean_ns(self) -> float:
        return self.rx_total_ns / self.blocks if self.blocks else math.nan

    @property
    def ok(self) -> bool:
        return not self.skipped and self.failed is None

    def key(self) -> tuple[int, float, int]:
        return self.mcs, self.snr_db, self.iterations


def throughput(mcs: int, bler: float | None = None, mode: str = "offered") -> float:
    """Bits per second: TBS per 1 ms TTI, or that times (1 - BLER) for goodput."""
    tbs = tbs_for_mcs(mcs)
    per_second = round(1.0 / TTI_SECONDS)
    if mode == "offered":
        return tbs * per_second
    if mode == "goodput":
        return tbs * per_second * (1.0 - (bler or 0.0))
    raise ValueError(f"unknown throughput mode {mode!r}")


def point_seed(master_seed: int, mcs: int) -> int:
    """Per-MCS seed; shared across SNRs and iteration counts so they see matched noise."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(mcs),))
    return int(ss.generate_state(1, np.uint64)[0])


def run_bler_point(mcs: int, snr_db: float, iterations: int, n_blocks: int, seed: int,
                   min_block_errors: int | None = DEFAULT_MIN_BLOCK_ERRORS,
                   min_blocks: int = MIN_BLOCKS_PER_POINT, cfg: GridConfig | None = None,
                   skip_unachievable: bool = False, cpu_time: bool = False,
                   throughput_mode: str = "offered", abort_above: int | None = None) -> BlerPoint:
    """Run ``n_blocks`` subframes through the TX -> AWGN -> RX graph.

    Stops early once ``min_block_errors`` errors are seen (after at least
    ``min_blocks`` blocks), or as soon as the error count exceeds
    ``abort_above``.  A block error is a failed CRC.
    """
    if n_blocks < 1:
        raise ValueError("n_blocks must be at least 1")
    cfg = cfg or GridConfig()
    vol = interface_volumes(mcs, cfg)
    if vol.diagnostics and skip_unachievable:
        return BlerPoint(mcs, snr_db, iterations, 0, 0, 0, 0, throughput(mcs), seed,
                         diagnostics=vol.diagnostics, skipped=True)
    rt = Runtime(pdsch_graph(mcs, snr_db, iterations, cfg), seed, cpu_time=cpu_time,
                 keep_sink_payloads=False)
    flags: list[bool] = []
    bits = bit_errors = 0
    for _ in range(n_blocks):
        got = rt.step()[SINK]
        decoded, sent = got["in"], got["ref"]
        flags.append(not decoded.meta["crc_pass"])
        bits += sent.data.size
        bit_errors += int(np.count_nonzero(decoded.data != sent.data))
        errors = sum(flags)
        if abort_above is not None and errors > abort_above:
            break
        if min_block_errors is not None and errors >= min_block_errors and len(flags) >= min_blocks:
            break
    res = rt.result()
    cost = res.cost().restrict(PHY_BLOCKS)
    errors = sum(flags)
    return BlerPoint(mcs, snr_db, iterations, len(flags), errors, bits, bit_errors,
                     throughput(mcs, errors / len(flags), throughput_mode), seed, cost,
                     tuple(flags), vol.diagnostics)


@dataclass(frozen=True)
class BlerConformance:
    passed: bool
    bler: float
    ci95: tuple[float, float]
    upper95: float
    point: BlerPoint

    @property
    def confident(self) -> bool:
        """True when the one-sided 95% upper bound is within the target."""
        return self.upper95 <= BLER_TARGET


def conformance_bler(mcs: int, snr_db: float, iterations: int = 5, n_blocks: int = 1000,
                     seed: int = 0, target: float = BLER_TARGET, **kw) -> BlerConformance:
    """Pass iff measured BLER <= target (10% boundary passes)."""
    kw.setdefault("min_block_errors", None)
    pt = run_bler_point(mcs, snr_db, iterations, n_blocks, seed, **kw)
    return BlerConformance(pt.bler <= target, pt.bler, clopper_pearson(pt.block_errors, pt.blocks),
                           upper_bound(pt.block_errors, pt.blocks), pt)


@dataclass(frozen=True)
class ThresholdResult:
    mcs: int
    iterations: int
    snr_db: float
    evaluations: tuple[tuple[float, int, int], ...]  # (snr, blocks, errors)


def snr_lattice(lo: float = SNR_SEARCH_RANGE[0], hi: float = SNR_SEARCH_RANGE[1],
                step: float = SNR_LATTICE_STEP) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def find_snr_threshold(mcs: int, iterations: int = 5, target: float = BLER_TARGET,
                       blocks_per_point: int = 200, seed: int = 0,
                       snr_range: tuple[float, float] = SNR_SEARCH_RANGE,
                       step: float = SNR_LATTICE_STEP, cfg: GridConfig | None = None) -> ThresholdResult:
    """Smallest lattice SNR with measured BLER <= target, by bisection.

    Every evaluation uses the same seed, so neighbouring SNRs see the same
    transport blocks and scaled copies of the same noise.  An evaluation is
    abandoned as soon as its error count rules out meeting the target.
    """
    grid = snr_lattice(*snr_range, step)
    budget_errors = int(math.floor(target * blocks_per_point + 1e-9))
    evals: dict[int, tuple[float, int, int]] = {}

    def passes(i: int) -> bool:
        pt = run_bler_point(mcs, float(grid[i]), iterations, blocks_per_point, seed,
                            min_block_errors=None, cfg=cfg, abort_above=budget_errors)
        evals[i] = (float(grid[i]), pt.blocks, pt.block_errors)
        return pt.blocks == blocks_per_point and pt.bler <= target

    lo, hi = 0, len(grid) - 1
    if not passes(hi):
        raise ThresholdUnreachable(
            f"mcs {mcs}: BLER target {target} not met at {grid[hi]:.2f} dB "
            f"(search range {snr_range[0]}..{snr_range[1]} dB)"
        )
    if passes(lo):
        hi = lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(mcs, iterations, float(grid[hi]), tuple(evals[i] for i in sorted(evals)))


@dataclass(frozen=True)
class SweepSpec:
    mcs: tuple[int, ...]
    snr_db: tuple[float, ...]
    iterations: tuple[int, ...]
    blocks: int = 200
    min_block_errors: int | None = DEFAULT_MIN_BLOCK_ERRORS
    seed: int = 0
    workers: int = 1
    isolation: bool = True
    throughput_mode: str = "offered"

    def __post_init__(self):
        if not (self.mcs and self.snr_db and self.iterations):
            raise ValueError("sweep lists must be non-empty")
        if self.blocks < MIN_BLOCKS_PER_POINT:
            raise ValueError(f"blocks per point must be >= {MIN_BLOCKS_PER_POINT}")
        for m in self.mcs:
            if not 0 <= m <= MAX_MCS:
                raise ValueError(f"mcs {m} out of range")

    def points(self) -> list[tuple[int, float, int]]:
        return [(m, float(s), it) for m in self.mcs for s in self.snr_db for it in self.iterations]

    def as_dict(self) -> dict:
        return {"mcs": list(self.mcs), "snr_db": [float(s) for s in self.snr_db],
                "iterations": list(self.iterations), "blocks": self.blocks,
                "min_block_errors": self.min_block_errors, "seed": self.seed,
                "workers": self.workers, "isolation": self.isolation,
                "throughput_mode": self.throughput_mode}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        return cls(tuple(d["mcs"]), tuple(float(s) for s in d["snr_db"]), tuple(d["iterations"]),
                   d["blocks"], d["min_block_errors"], d["seed"], d.get("workers", 1),
                   d.get("isolation", True), d.get("throughput_mode", "offered"))


def _run_one(args) -> BlerPoint:
    (mcs, snr, it), spec = args
    seed = point_seed(spec.seed, mcs)
    try:
        return run_bler_point(mcs, snr, it, spec.blocks, seed, spec.min_block_errors,
                              throughput_mode=spec.throughput_mode)
    except Exception as exc:  # partial failure: flag the point, keep the sweep
        log.warning("point mcs=%s snr=%s iters=%s failed: %s", mcs, snr, it, exc)
        return BlerPoint(mcs, snr, it, 0, 0, 0, 0, throughput(mcs), seed, failed=str(exc))


def sweep(spec: SweepSpec) -> list[BlerPoint]:
    """Every point of the sweep, ordered by (mcs, snr, iterations).

    Isolation mode runs points one at a time so timings are not skewed by
    contention; otherwise ``workers`` > 1 spreads points over processes and
    the resulting timings are flagged as not isolated.
    """
    jobs = [(p, spec) for p in spec.points()]
    if spec.workers > 1 and not spec.isolation:
        with ProcessPoolExecutor(spec.workers) as pool:
            results = [replace(r, isolated=False) for r in pool.map(_run_one, jobs)]
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=BlerPoint.key)


def total_cost(points: Sequence[BlerPoint]) -> CostReport:
    return merge_reports([p.cost for p in points if p.cost is not None])
