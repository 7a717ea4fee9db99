"""Transmitter and receiver blocks for ``.app`` graphs.

Per-subframe signalling (MCS, grid layout, subframe number, code block
size, noise variance) travels as packet metadata, standing in for the
control channel that the chain does not decode.
"""

from __future__ import annotations

import numpy as np

from ..params import GridConfig, interface_volumes, mcs_to_params, transport_block_size
from ..pipeline.registry import BIT, COMPLEX, SOFT, Block, register
from .crc import CRC_LEN, crc24a_attach, crc24a_check
from .modulation import modulate, soft_demodulate
from .ofdm import ofdm_demodulate, ofdm_modulate
from .ratematch import rate_dematch, rate_match
from .resources import ResourceGrid, demap_resources, map_resources
from .scrambling import DEFAULT_RNTI, gold_scramble, pdsch_c_init
from .segmentation import segment_code_blocks
from .turbo import turbo_decode, turbo_encode

MIN_NOISE_VAR = 1e-4

TX_KINDS = ("crc24a", "segment", "turbo_enc", "rate_match", "scramble", "mod_mapper", "res_map", "ofdm_mod")
RX_KINDS = ("ofdm_demod", "res_demap", "soft_demod", "descramble", "rate_dematch", "turbo_dec", "crc_check")


def grid_config(meta) -> GridConfig:
    return GridConfig(control_symbols=int(meta.get("control_symbols", 3)),
                      crs_per_prb=int(meta.get("crs_per_prb", 6)),
                      cell_id=int(meta.get("cell_id", 1)))


def c_init_for(meta, params) -> int:
    return pdsch_c_init(int(meta.get("subframe", 0)), int(params.get("rnti", DEFAULT_RNTI)),
                        int(params.get("q", 0)), int(meta.get("cell_id", 1)))


@register
class TransportBlockSource(Block):
    """Random transport blocks of TBS(mcs) bits, one per subframe."""

    kind = "tb_source"
    outputs = {"out": BIT}
    defaults = {"mcs": 0, "control_symbols": 3, "crs_per_prb": 6, "cell_id": 1}

    def __init__(self, name, params=None, rng=None):
        super().__init__(name, params, rng)
        self.entry = mcs_to_params(int(self.params["mcs"]))
        self.tbs = transport_block_size(self.entry.itbs)
        GridConfig(control_symbols=int(self.params["control_symbols"]),
                   crs_per_prb=int(self.params["crs_per_prb"]), cell_id=int(self.params["cell_id"]))

    def work(self, inputs, ctx):
        bits = self.rng.integers(0, 2, self.tbs, dtype=np.uint8)
        meta = {"mcs": self.entry.mcs, "qm": self.entry.qm, "tbs": self.tbs,
                "subframe": ctx.iteration % 10,
                "control_symbols": int(self.params["control_symbols"]),
                "crs_per_prb": int(self.params["crs_per_prb"]),
                "cell_id": int(self.params["cell_id"])}
        return {"out": self.emit("out", bits, meta)}


@register
class CrcAttach(Block):
    kind = "crc24a"
    inputs = {"in": BIT}
    outputs = {"out": BIT}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        return {"out": self.emit("out", crc24a_attach(pkt.data), pkt.meta)}


@register
class Segment(Block):
    kind = "segment"
    inputs = {"in": BIT}
    outputs = {"out": BIT}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        blocks = segment_code_blocks(pkt.data)
        if len(blocks) != 1:
            raise ValueError(f"{len(blocks)} code blocks; the chain carries a single code block")
        cb = blocks[0]
        return {"out": self.emit("out", cb.bits, pkt.meta, k=cb.k, filler=cb.filler)}


@register
class TurboEncoder(Block):
    kind = "turbo_enc"
    inputs = {"in": BIT}
    outputs = {"out": BIT}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        return {"out": self.emit("out", turbo_encode(pkt.data).flat(), pkt.meta)}


@register
class RateMatcher(Block):
    kind = "rate_match"
    inputs = {"in": BIT}
    outputs = {"out": BIT}
    defaults = {"rv": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        e = interface_volumes(int(pkt.meta["mcs"]), grid_config(pkt.meta)).e
        out = rate_match(pkt.data, e, int(self.params["rv"]), int(pkt.meta.get("filler", 0)))
        return {"out": self.emit("out", out, pkt.meta, e=e, rv=int(self.params["rv"]))}


@register
class Scrambler(Block):
    kind = "scramble"
    inputs = {"in": BIT}
    outputs = {"out": BIT}
    defaults = {"rnti": DEFAULT_RNTI, "q": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        return {"out": self.emit("out", gold_scramble(pkt.data, c_init_for(pkt.meta, self.params)), pkt.meta)}


@register
class ModMapper(Block):
    kind = "mod_mapper"
    inputs = {"in": BIT}
    outputs = {"out": COMPLEX}
    defaults = {"qm": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        qm = int(self.params["qm"]) or int(pkt.meta["qm"])
        return {"out": self.emit("out", modulate(pkt.data, qm), pkt.meta, qm=qm)}


@register
class ResourceMapper(Block):
    kind = "res_map"
    inputs = {"in": COMPLEX}
    outputs = {"out": COMPLEX}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        cfg = grid_config(pkt.meta)
        grid = map_resources(pkt.data, cfg, c_init_for(pkt.meta, {}))
        return {"out": self.emit("out", grid.values, pkt.meta)}


@register
class OfdmModulator(Block):
    kind = "ofdm_mod"
    inputs = {"in": COMPLEX}
    outputs = {"out": COMPLEX}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        grid = ResourceGrid(np.asarray(pkt.data), grid_config(pkt.meta))
        return {"out": self.emit("out", ofdm_modulate(grid), pkt.meta)}


@register
class OfdmDemodulator(Block):
    kind = "ofdm_demod"
    inputs = {"in": COMPLEX}
    outputs = {"out": COMPLEX}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        grid = ofdm_demodulate(pkt.data, grid_config(pkt.meta))
        return {"out": self.emit("out", grid.values, pkt.meta)}


@register
class ResourceDemapper(Block):
    """RESDEMAP: splits a received grid into data and control symbols."""

    kind = "res_demap"
    inputs = {"in": COMPLEX}
    outputs = {"data": COMPLEX, "control": COMPLEX}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        data, control = demap_resources(ResourceGrid(np.asarray(pkt.data), grid_config(pkt.meta)))
        return {"data": self.emit("data", data, pkt.meta),
                "control": self.emit("control", control, pkt.meta)}


@register
class SoftDemapper(Block):
    kind = "soft_demod"
    inputs = {"in": COMPLEX}
    outputs = {"out": SOFT}
    defaults = {"qm": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        qm = int(self.params["qm"]) or int(pkt.meta["qm"])
        noise_var = max(float(pkt.meta.get("noise_var", 0.0)), MIN_NOISE_VAR)
        return {"out": self.emit("out", soft_demodulate(pkt.data, qm, noise_var), pkt.meta)}


@register
class Descrambler(Block):
    kind = "descramble"
    inputs = {"in": SOFT}
    outputs = {"out": SOFT}
    defaults = {"rnti": DEFAULT_RNTI, "q": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        return {"out": self.emit("out", gold_scramble(pkt.data, c_init_for(pkt.meta, self.params)), pkt.meta)}


@register
class RateDematcher(Block):
    kind = "rate_dematch"
    inputs = {"in": SOFT}
    outputs = {"out": SOFT}
    defaults = {"rv": 0}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        out = rate_dematch(pkt.data, int(pkt.meta["k"]), int(self.params["rv"]), int(pkt.meta.get("filler", 0)))
        return {"out": self.emit("out", out, pkt.meta)}


@register
class TurboDecoder(Block):
    kind = "turbo_dec"
    inputs = {"in": SOFT}
    outputs = {"out": BIT}
    defaults = {"iterations": 5}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        res = turbo_decode(pkt.data, int(self.params["iterations"]), int(pkt.meta.get("filler", 0)),
                           check_crc=False)
        return {"out": self.emit("out", res.bits, pkt.meta, iterations=res.iterations)}


@register
class CrcCheck(Block):
    kind = "crc_check"
    inputs = {"in": BIT}
    outputs = {"out": BIT}

    def work(self, inputs, ctx):
        pkt = inputs["in"]
        cb = np.asarray(pkt.data)[int(pkt.meta.get("filler", 0)):]
        ok = crc24a_check(cb)
        return {"out": self.emit("out", cb[:-CRC_LEN], pkt.meta, crc_pass=bool(ok))}


@register
class TransportBlockSink(Block):
    """Collects decoded blocks next to the transmitted reference."""

    kind = "tb_sink"
    inputs = {"in": BIT, "ref": BIT}

    def work(self, inputs, ctx):
        return {}
