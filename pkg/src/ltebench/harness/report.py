"""Result CSVs and the figure analogues (BLER vs MCS, throughput/cost vs MCS)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..pipeline.cost import COST_CSV_HEADER, BlockCost, CostReport, cost_csv  # noqa: E402
from .bler import BlerPoint  # noqa: E402
from .chain import RX_BLOCKS, TX_BLOCKS  # noqa: E402

RESULTS_HEADER = ("mcs", "snr_db", "iters", "blocks", "block_errors", "bler", "bits", "bit_errors",
                  "ber", "throughput_bps", "rx_total_ns", "seed")
TIMING_COLUMNS = ("rx_total_ns", "total_ns", "mean_ns", "max_ns", "share")

plt.rcParams["svg.hashsalt"] = "ltebench"


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def run_id(p: BlerPoint) -> str:
    return f"mcs{p.mcs}_snr{_fmt(float(p.snr_db))}_it{p.iterations}"


def results_csv(points: Sequence[BlerPoint]) -> str:
    if not points:
        raise ValueError("no points to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for p in points:
        done = p.ok and p.blocks > 0
        w.writerow([p.mcs, _fmt(float(p.snr_db)), p.iterations, p.blocks, p.block_errors,
                    _fmt(p.bler) if done else "", p.bits, p.bit_errors,
                    _fmt(p.ber) if done else "", _fmt(p.throughput_bps),
                    p.rx_total_ns if done else "", p.seed])
    return buf.getvalue()


def emit_csv(points: Sequence[BlerPoint], path) -> Path:
    path = Path(path)
    path.write_text(results_csv(points))
    return path


def emit_cost_csv(points: Sequence[BlerPoint], path) -> Path:
    path = Path(path)
    path.write_text(cost_csv((run_id(p), p.cost) for p in points if p.cost is not None))
    return path


def strip_timing(text: str) -> str:
    """CSV text with timing columns removed, for determinism comparisons."""
    rows = list(csv.reader(io.StringIO(text)))
    keep = [i for i, h in enumerate(rows[0]) if h not in TIMING_COLUMNS]
    return "\n".join(",".join(r[i] for i in keep) for r in rows) + "\n"


def read_results(path) -> list[BlerPoint]:
    """Rebuild points from a results CSV (and its sibling costs.csv, if present)."""
    path = Path(path)
    costs = read_costs(path.with_name("costs.csv")) if path.with_name("costs.csv").exists() else {}
    out = []
    with path.open(newline="") as fh:
        for r in csv.DictReader(fh):
            p = BlerPoint(int(r["mcs"]), float(r["snr_db"]), int(r["iters"]), int(r["blocks"]),
                          int(r["block_errors"]), int(r["bits"]), int(r["bit_errors"]),
                          float(r["throughput_bps"]), int(r["seed"]))
            out.append(replace(p, cost=costs.get(run_id(p)), failed=None if p.blocks else "not run"))
    return out


def read_costs(path) -> dict[str, CostReport]:
    rows: dict[str, list[BlockCost]] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COST_CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for r in reader:
            rows.setdefault(r["run_id"], []).append(
                BlockCost(r["block"], int(r["calls"]), int(r["total_ns"]), float(r["mean_ns"]),
                          int(r["max_ns"]), float(r["share"])))
    return {k: CostReport(tuple(v), sum(b.total_ns for b in v)) for k, v in rows.items()}


def _series(points: Iterable[BlerPoint], **match):
    sel = [p for p in points if p.ok and p.blocks and all(getattr(p, k) == v for k, v in match.items())]
    return sorted(sel, key=lambda p: p.mcs)


def plot_bler(points: Sequence[BlerPoint], path) -> Path:
    """BLER (log) vs MCS per SNR; solid lines 1 iteration, markers for the others."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    snrs = sorted({p.snr_db for p in points})
    iters = sorted({p.iterations for p in points})
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    floor = 1e-4
    for ci, snr in enumerate(snrs):
        for it in iters:
            s = _series(points, snr_db=snr, iterations=it)
            if not s:
                continue
            style = "-" if it == min(iters) else "o"
            ax.semilogy([p.mcs for p in s], [max(p.bler, floor) for p in s], style,
                        color=colors[ci % len(colors)], label=f"SNR {snr:g} dB, {it} it")
    ax.axhline(0.1, color="k", lw=0.8, ls="--")
    ax.set_xlabel("MCS")
    ax.set_ylabel("BLER")
    ax.set_ylim(floor / 2, 1.5)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_cost_throughput(points: Sequence[BlerPoint], path, iterations: int | None = None) -> Path:
    """Mean PHY time per subframe and offered throughput vs MCS."""
    iterations = iterations or min(p.iterations for p in points)
    by_mcs: dict[int, list[BlerPoint]] = {}
    for p in _series(points, iterations=iterations):
        by_mcs.setdefault(p.mcs, []).append(p)
    mcs = sorted(by_mcs)
    cost_us = [sum(p.cost.total_ns for p in by_mcs[m] if p.cost) / max(1, sum(p.blocks for p in by_mcs[m])) / 1e3
               for m in mcs]
    thr = [by_mcs[m][0].throughput_bps / 1e6 for m in mcs]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(mcs, cost_us, "o-", label="computing cost")
    ax.set_xlabel("MCS")
    ax.set_ylabel("PHY time per subframe (us)")
    ax2 = ax.twinx()
    ax2.plot(mcs, thr, "s--", color="tab:red", label="throughput")
    ax2.set_ylabel("throughput (Mbit/s)")
    ax.set_title(f"{iterations} decoder iteration(s)")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_module_costs(points: Sequence[BlerPoint], path, iterations: int | None = None) -> Path:
    """Stacked per-module time per subframe vs MCS."""
    iterations = iterations or max(p.iterations for p in points)
    by_mcs: dict[int, dict[str, float]] = {}
    blocks: dict[int, int] = {}
    for p in _series(points, iterations=iterations):
        if p.cost is None:
            continue
        acc = by_mcs.setdefault(p.mcs, {})
        blocks[p.mcs] = blocks.get(p.mcs, 0) + p.blocks
        for b in p.cost.blocks:
            acc[b.block] = acc.get(b.block, 0.0) + b.total_ns
    mcs = sorted(by_mcs)
    modules = [m for m in TX_BLOCKS + RX_BLOCKS if any(m in by_mcs[x] for x in mcs)]
    fig, ax = plt.subplots(figsize=(8, 4.8))
    bottom = [0.0] * len(mcs)
    cmap = plt.get_cmap("tab20")
    for i, mod in enumerate(modules):
        vals = [by_mcs[m].get(mod, 0.0) / blocks[m] / 1e3 for m in mcs]
        ax.bar(mcs, vals, bottom=bottom, label=mod, color=cmap(i % 20))
        bottom = [a + b for a, b in zip(bottom, vals)]
    ax.set_xlabel("MCS")
    ax.set_ylabel("time per subframe (us)")
    ax.set_title(f"per-module cost, {iterations} decoder iterations")
    ax.legend(fontsize=6, ncol=3)
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def emit_plot(points: Sequence[BlerPoint], path, axes: str = "bler") -> Path:
    """Render one figure analogue: ``bler`` (fig3), ``cost`` (fig4a) or ``modules`` (fig4b)."""
    if not points:
        raise ValueError("no points to plot")
    kinds = {"bler": plot_bler, "cost": plot_cost_throughput, "modules": plot_module_costs}
    try:
        return kinds[axes](points, path)
    except KeyError:
        raise ValueError(f"unknown axes spec {axes!r}; one of {sorted(kinds)}") from None


def emit_all(points: Sequence[BlerPoint], out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"results": emit_csv(points, out / "results.csv"),
             "costs": emit_cost_csv(points, out / "costs.csv")}
    usable = [p for p in points if p.ok and p.blocks]
    if usable:
        files["fig3"] = emit_plot(usable, out / "fig3.svg", "bler")
        files["fig4a"] = emit_plot(usable, out / "fig4a.svg", "cost")
        files["fig4b"] = emit_plot(usable, out / "fig4b.svg", "modules")
    return files
