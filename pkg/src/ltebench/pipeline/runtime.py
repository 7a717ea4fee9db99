"""Single-threaded, deterministic execution of a validated graph.

One iteration invokes every block once in schedule order.  Each invocation is
timed with the monotonic ``perf_counter_ns`` clock (optionally also the
thread CPU clock).  Block random streams derive from ``(seed, block name)``
only, so payloads do not depend on timing or on unrelated blocks.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..channel import derive_rng
from .appfile import AppGraph, Edge, schedule, validate_graph, AppError
from .cost import CostReport, CostSample, cost_report
from .fifo import FifoChannel
from .registry import Context, Packet, lookup


class BlockError(RuntimeError):
    def __init__(self, block: str, exc: BaseException):
        self.block = block
        super().__init__(f"block '{block}' failed: {type(exc).__name__}: {exc}")


@dataclass
class RunResult:
    sinks: dict[str, dict[str, list[Packet]]]
    samples: list[CostSample]
    wall_ns: int
    iterations: int
    edge_counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def cost(self) -> CostReport:
        return cost_report(self.samples, self.wall_ns)

    def payload_digest(self) -> str:
        """SHA-256 over all sink payloads, in sink/port/iteration order."""
        h = hashlib.sha256()
        for sink in sorted(self.sinks):
            for port in sorted(self.sinks[sink]):
                for pkt in self.sinks[sink][port]:
                    h.update(f"{sink}.{port}:{pkt.data.dtype.str}:{pkt.data.size};".encode())
                    h.update(np.ascontiguousarray(pkt.data).tobytes())
        return h.hexdigest()


class Runtime:
    """Instantiated graph that can be stepped one iteration at a time."""

    def __init__(self, graph: AppGraph, seed: int = 0, cpu_time: bool = False,
                 capacities: Mapping[str, int] | None = None, keep_sink_payloads: bool = True):
        diags = validate_graph(graph)
        if diags:
            raise AppError(diags)
        self.graph = graph
        self.seed = int(seed)
        self.cpu_time = cpu_time
        self.keep = keep_sink_payloads
        self.order = schedule(graph)
        self.blocks = {}
        for spec in graph.blocks:
            cls = lookup(spec.kind)
            self.blocks[spec.name] = cls(spec.name, spec.param_dict, derive_rng(self.seed, spec.name))
        capacities = dict(capacities or {})
        self.fifos: dict[Edge, FifoChannel] = {}
        self.inbound: dict[str, dict[str, FifoChannel]] = {n: {} for n in self.blocks}
        self.outbound: dict[str, dict[str, list[FifoChannel]]] = {n: {} for n in self.blocks}
        for e in graph.edges:
            kind = type(self.blocks[e.src]).outputs[e.src_port]
            fifo = FifoChannel(str(e), kind, capacities.get(str(e)))
            self.fifos[e] = fifo
            self.inbound[e.dst][e.dst_port] = fifo
            self.outbound[e.src].setdefault(e.src_port, []).append(fifo)
        self.sink_names = [n for n in self.order if not type(self.blocks[n]).outputs]
        self.sinks: dict[str, dict[str, list[Packet]]] = {
            n: {p: [] for p in type(self.blocks[n]).inputs} for n in self.sink_names
        }
        self.samples: list[CostSample] = []
        self.iteration = 0
        self.wall_ns = 0

    def step(self) -> dict[str, dict[str, Packet]]:
        """Run one iteration; returns this iteration's sink inputs."""
        ctx = Context(self.iteration, self.seed)
        got: dict[str, dict[str, Packet]] = {}
        t_start = time.perf_counter_ns()
        for name in self.order:
            block = self.blocks[name]
            inputs = {port: fifo.pop() for port, fifo in self.inbound[name].items()}
            consumed = sum(len(p) for p in inputs.values())
            c0 = time.thread_time_ns() if self.cpu_time else 0
            t0 = time.perf_counter_ns()
            try:
                outputs = block.work(inputs, ctx)
            except Exception as exc:
                raise BlockError(name, exc) from exc
            t1 = time.perf_counter_ns()
            cpu = time.thread_time_ns() - c0 if self.cpu_time else None
            missing = set(type(block).outputs) - set(outputs)
            if missing:
                raise BlockError(name, RuntimeError(f"no packet on output(s) {sorted(missing)}"))
            produced = 0
            for port, pkt in outputs.items():
                produced += len(pkt)
                for fifo in self.outbound[name].get(port, ()):
                    fifo.push(pkt)
            self.samples.append(CostSample(name, self.iteration, t1 - t0, consumed, produced, cpu))
            if name in self.sinks:
                got[name] = inputs
                if self.keep:
                    for port, pkt in inputs.items():
                        self.sinks[name][port].append(pkt)
        self.wall_ns += time.perf_counter_ns() - t_start
        self.iteration += 1
        return got

    def result(self) -> RunResult:
        return RunResult(
            sinks=self.sinks, samples=list(self.samples), wall_ns=self.wall_ns,
            iterations=self.iteration,
            edge_counts={f.name: (f.pushed, f.popped) for f in self.fifos.values()},
        )


def run_graph(graph: AppGraph, iterations: int, seed: int = 0, cpu_time: bool = False,
              capacities: Mapping[str, int] | None = None,
              stop: Callable[[dict[str, dict[str, Packet]]], bool] | None = None) -> RunResult:
    """Run up to ``iterations`` iterations; ``stop`` may end the run early."""
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    rt = Runtime(graph, seed, cpu_time=cpu_time, capacities=capacities)
    for _ in range(iterations):
        got = rt.step()
        if stop is not None and stop(got):
            break
    return rt.result()
