"""Generic sources, sinks and plumbing blocks."""

from __future__ import annotations

import numpy as np

from .registry import ANY, BIT, BYTE, COMPLEX, DTYPES, SOFT, Block, BlockConfigError, register


@register
class VectorSource(Block):
    kind = "vector_source"
    outputs = {"out": ANY}
    defaults = {"value": 1, "length": 1, "type": BIT}

    def __init__(self, name, params=None, rng=None):
        super().__init__(name, params, rng)
        if self.params["type"] not in DTYPES:
            raise BlockConfigError(f"{name}: type must be one of {sorted(DTYPES)}")
        if int(self.params["length"]) < 1:
            raise BlockConfigError(f"{name}: length must be positive")

    def work(self, inputs, ctx):
        dtype = DTYPES[self.params["type"]]
        data = np.full(int(self.params["length"]), self.params["value"], dtype=dtype)
        return {"out": self.emit("out", data)}


@register
class RandomBitSource(Block):
    kind = "bit_source"
    outputs = {"out": BIT}
    defaults = {"length": 1000}

    def work(self, inputs, ctx):
        return {"out": self.emit("out", self.rng.integers(0, 2, int(self.params["length"])))}


@register
class NullSink(Block):
    kind = "null_sink"
    inputs = {"in": ANY}

    def work(self, inputs, ctx):
        return {}


@register
class Copy(Block):
    kind = "copy"
    inputs = {"in": ANY}
    outputs = {"out": ANY}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        return {"out": self.emit("out", pkt.data, pkt.meta)}


__all__ = ["VectorSource", "RandomBitSource", "NullSink", "Copy", "BIT", "SOFT", "COMPLEX", "BYTE"]
