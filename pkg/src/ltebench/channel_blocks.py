from __future__ import annotations

from .channel import ChannelConfig, apply_awgn, derive_rng, parse_snr
from .pipeline.registry import COMPLEX, Block, register


@register
class AwgnChannel(Block):
    """AWGN on time-domain samples; the noise variance rides along as metadata.

    The noise stream is ``derive_rng(run seed, block name, seed parameter)``.
    """

    kind = "awgn"
    inputs = {"in": COMPLEX}
    outputs = {"out": COMPLEX}
    defaults = {"snr_db": "inf", "seed": 0}

    def __init__(self, name, params=None, rng=None):
        super().__init__(name, params, rng)
        self.cfg = ChannelConfig(parse_snr(self.params["snr_db"]), int(self.params["seed"]))
        self._noise_rng = None

    def work(self, inputs, ctx):
        if self._noise_rng is None:
            self._noise_rng = derive_rng(ctx.seed, self.name, self.cfg.seed)
        pkt = inputs["in"]
        y, noise_var = apply_awgn(pkt.data, self.cfg, self._noise_rng)
        return {"out": self.emit("out", y, pkt.meta, noise_var=noise_var, snr_db=self.cfg.snr_db)}
