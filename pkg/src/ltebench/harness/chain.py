"""The PDSCH link as an ``.app`` graph, and the same link as plain function calls.

The function-composition reference exists to check that the dataflow runtime
adds no semantics: given the same seed both must decode identical bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channel import ChannelConfig, apply_awgn, derive_rng
from ..params import GridConfig, interface_volumes
from ..phy.blocks import MIN_NOISE_VAR
from ..phy.crc import CRC_LEN, crc24a_attach, crc24a_check
from ..phy.modulation import modulate, soft_demodulate
from ..phy.ofdm import ofdm_demodulate, ofdm_modulate
from ..phy.ratematch import rate_dematch, rate_match
from ..phy.resources import demap_resources, map_resources
from ..phy.scrambling import gold_scramble, pdsch_c_init
from ..phy.segmentation import segment_code_blocks
from ..phy.turbo import turbo_decode, turbo_encode
from ..pipeline.appfile import AppGraph, parse_app

SOURCE = "tb_source"
CHANNEL = "channel"
SINK = "sink"
TX_BLOCKS = ("crc24a", "segment", "turbo_enc", "rate_match", "scramble", "mod_mapper", "res_map", "ofdm_mod")
RX_BLOCKS = ("ofdm_demod", "res_demap", "soft_demod", "descramble", "rate_dematch", "turbo_dec", "crc_check")
PHY_BLOCKS = TX_BLOCKS + RX_BLOCKS


def _snr_param(snr_db: float) -> str:
    return '"inf"' if math.isinf(snr_db) else repr(float(snr_db))


def pdsch_app_text(mcs: int, snr_db: float = math.inf, iterations: int = 5,
                   cfg: GridConfig | None = None, channel_seed: int = 0) -> str:
    """TX -> AWGN -> RX graph; block names equal their kinds."""
    cfg = cfg or GridConfig()
    lines = [
        "# PDSCH link: eNodeB transmitter, AWGN channel, UE receiver",
        f'module {SOURCE} {{ lib = "tb_source"; mcs = {mcs}; control_symbols = {cfg.control_symbols}; '
        f"crs_per_prb = {cfg.crs_per_prb}; cell_id = {cfg.cell_id} }}",
    ]
    for kind in TX_BLOCKS:
        lines.append(f'module {kind} {{ lib = "{kind}" }}')
    lines.append(f'module {CHANNEL} {{ lib = "awgn"; snr_db = {_snr_param(snr_db)}; seed = {channel_seed} }}')
    for kind in RX_BLOCKS:
        extra = f"; iterations = {iterations}" if kind == "turbo_dec" else ""
        lines.append(f'module {kind} {{ lib = "{kind}"{extra} }}')
    lines.append(f'module {SINK} {{ lib = "tb_sink" }}')
    lines.append("")
    chain = [SOURCE, *TX_BLOCKS, CHANNEL, *RX_BLOCKS]
    for a, b in zip(chain, chain[1:]):
        out = "data" if a == "res_demap" else "out"
        lines.append(f"connect {a}.{out} -> {b}.in")
    lines.append(f"connect crc_check.out -> {SINK}.in")
    lines.append(f"connect {SOURCE}.out -> {SINK}.ref")
    return "\n".join(lines) + "\n"


def pdsch_graph(mcs: int, snr_db: float = math.inf, iterations: int = 5,
                cfg: GridConfig | None = None, channel_seed: int = 0) -> AppGraph:
    return parse_app(pdsch_app_text(mcs, snr_db, iterations, cfg, channel_seed))


@dataclass(frozen=True)
class ReferenceBlock:
    sent: np.ndarray
    decoded: np.ndarray
    crc_pass: bool


def reference_chain(mcs: int, snr_db: float, iterations: int, n_blocks: int, seed: int,
                    cfg: GridConfig | None = None, channel_seed: int = 0) -> list[ReferenceBlock]:
    """Direct function composition of the link, using the runtime's seed derivation."""
    cfg = cfg or GridConfig()
    vol = interface_volumes(mcs, cfg)
    src_rng = derive_rng(seed, SOURCE)
    noise_rng = derive_rng(seed, CHANNEL, channel_seed)
    chan = ChannelConfig(snr_db, channel_seed)
    out = []
    for i in range(n_blocks):
        c_init = pdsch_c_init(i % 10, cell_id=cfg.cell_id)
        tb = src_rng.integers(0, 2, vol.tb_bits, dtype=np.uint8)
        (cb,) = segment_code_blocks(crc24a_attach(tb))
        e_bits = rate_match(turbo_encode(cb.bits).flat(), vol.e, 0, cb.filler)
        grid = map_resources(modulate(gold_scramble(e_bits, c_init), vol.qm), cfg, c_init)
        rx, noise_var = apply_awgn(ofdm_modulate(grid), chan, noise_rng)
        data, _ = demap_resources(ofdm_demodulate(rx, cfg))
        llr = soft_demodulate(data, vol.qm, max(noise_var, MIN_NOISE_VAR))
        soft = rate_dematch(gold_scramble(llr, c_init), cb.k, 0, cb.filler)
        dec = turbo_decode(soft, iterations, cb.filler, check_crc=False).bits[cb.filler:]
        out.append(ReferenceBlock(tb, dec[:-CRC_LEN], crc24a_check(dec)))
    return out
