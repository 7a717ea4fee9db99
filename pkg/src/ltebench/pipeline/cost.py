"""Per-block computing-cost samples and their aggregation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

COST_CSV_HEADER = ("run_id", "block", "calls", "total_ns", "mean_ns", "max_ns", "share")


@dataclass(frozen=True)
class CostSample:
    block: str
    invocation: int
    elapsed_ns: int
    consumed: int
    produced: int
    cpu_ns: int | None = None


@dataclass(frozen=True)
class BlockCost:
    block: str
    calls: int
    total_ns: int
    mean_ns: float
    max_ns: int
    share: float


@dataclass(frozen=True)
class CostReport:
    blocks: tuple[BlockCost, ...]
    wall_ns: int

    def __getitem__(self, name: str) -> BlockCost:
        for b in self.blocks:
            if b.block == name:
                return b
        raise KeyError(name)

    @property
    def total_ns(self) -> int:
        return sum(b.total_ns for b in self.blocks)

    def largest(self) -> BlockCost:
        return max(self.blocks, key=lambda b: b.total_ns)

    def restrict(self, names: Iterable[str]) -> "CostReport":
        """Report over a subset of blocks, shares renormalised to that subset."""
        keep = set(names)
        return _aggregate(
            [(b.block, b.calls, b.total_ns, b.max_ns) for b in self.blocks if b.block in keep],
            self.wall_ns,
        )


def _aggregate(rows, wall_ns: int) -> CostReport:
    grand = sum(r[2] for r in rows)
    blocks = []
    for name, calls, total, peak in rows:
        share = total / grand if grand > 0 else 1.0 / len(rows)
        blocks.append(BlockCost(name, calls, total, total / calls if calls else 0.0, peak, share))
    return CostReport(tuple(blocks), int(wall_ns))


def cost_report(samples: Sequence[CostSample], wall_ns: int) -> CostReport:
    """Aggregate samples per block, in first-appearance order."""
    if not samples:
        raise ValueError("cannot build a cost report from no samples")
    acc: dict[str, list[int]] = {}
    for s in samples:
        if s.elapsed_ns < 0:
            raise ValueError(f"negative elapsed time in sample {s}")
        row = acc.setdefault(s.block, [0, 0, 0])
        row[0] += 1
        row[1] += s.elapsed_ns
        row[2] = max(row[2], s.elapsed_ns)
    return _aggregate([(name, *vals) for name, vals in acc.items()], wall_ns)


def merge_reports(reports: Sequence[CostReport]) -> CostReport:
    acc: dict[str, list[int]] = {}
    for rep in reports:
        for b in rep.blocks:
            row = acc.setdefault(b.block, [0, 0, 0])
            row[0] += b.calls
            row[1] += b.total_ns
            row[2] = max(row[2], b.max_ns)
    return _aggregate([(name, *vals) for name, vals in acc.items()],
                      sum(r.wall_ns for r in reports))


def cost_rows(run_id: str, report: CostReport) -> list[dict]:
    return [
        {"run_id": run_id, "block": b.block, "calls": b.calls, "total_ns": b.total_ns,
         "mean_ns": f"{b.mean_ns:.1f}", "max_ns": b.max_ns, "share": f"{b.share:.6f}"}
        for b in report.blocks
    ]


def cost_csv(reports: Iterable[tuple[str, CostReport]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COST_CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for run_id, rep in reports:
        writer.writerows(cost_rows(run_id, rep))
    return buf.getvalue()
