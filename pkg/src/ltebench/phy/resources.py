"""Resource grid layout, mapping and demapping (RESDEMAP) for one subframe."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

from ..params import CRS_SYMBOLS, GridConfig, grid_dimensions
from .modulation import modulate
from .scrambling import gold_sequence


class ReClass(IntEnum):
    DATA = 0
    CONTROL = 1
    REFERENCE = 2
    UNUSED = 3


@lru_cache(maxsize=None)
def re_layout(cfg: GridConfig) -> np.ndarray:
    """(subcarriers, symbols) array of :class:`ReClass` codes."""
    layout = np.full((cfg.subcarriers, cfg.symbols), ReClass.DATA, dtype=np.int8)
    v_shift = cfg.cell_id % 6
    remaining = cfg.crs_per_prb
    for sym in CRS_SYMBOLS:
        offset = (v_shift + (3 if sym in (4, 11) else 0)) % 6
        sc = np.arange(offset, cfg.subcarriers, 6)
        if sym < cfg.control_symbols:
            layout[sc, sym] = ReClass.REFERENCE
        elif remaining > 0:
            layout[sc, sym] = ReClass.REFERENCE
            remaining -= 2
    ctrl = layout[:, :cfg.control_symbols]
    ctrl[ctrl == ReClass.DATA] = ReClass.CONTROL
    layout.setflags(write=False)
    n_data = int(np.count_nonzero(layout == ReClass.DATA))
    assert n_data == grid_dimensions(cfg)[0], (n_data, cfg)
    return layout


@lru_cache(maxsize=None)
def _positions(cfg: GridConfig, cls: ReClass) -> tuple[np.ndarray, np.ndarray]:
    # frequency first, then time
    sym, sc = np.nonzero(re_layout(cfg).T == cls)
    sym.setflags(write=False)
    sc.setflags(write=False)
    return sc, sym


@dataclass(frozen=True)
class ResourceGrid:
    values: np.ndarray
    cfg: GridConfig

    @property
    def classes(self) -> np.ndarray:
        return re_layout(self.cfg)

    def data_count(self) -> int:
        return int(np.count_nonzero(self.classes == ReClass.DATA))


def placeholder_symbols(n: int, c_init: int) -> np.ndarray:
    """Deterministic QPSK filler for control and reference REs."""
    return modulate(gold_sequence(c_init, 2 * n), 2)


def map_resources(symbols, cfg: GridConfig | None = None, c_init: int = 1) -> ResourceGrid:
    cfg = cfg or GridConfig()
    symbols = np.asarray(symbols, dtype=np.complex128)
    n_data = grid_dimensions(cfg)[0]
    if symbols.size != n_data:
        raise ValueError(f"expected {n_data} data symbols, got {symbols.size}")
    grid = np.zeros((cfg.subcarriers, cfg.symbols), dtype=np.complex128)
    sc, sym = _positions(cfg, ReClass.DATA)
    grid[sc, sym] = symbols
    other_sc, other_sym = [], []
    for cls in (ReClass.CONTROL, ReClass.REFERENCE):
        s, t = _positions(cfg, cls)
        other_sc.append(s)
        other_sym.append(t)
    osc, osym = np.concatenate(other_sc), np.concatenate(other_sym)
    grid[osc, osym] = placeholder_symbols(osc.size, c_init)
    return ResourceGrid(grid, cfg)


def demap_resources(grid: ResourceGrid) -> tuple[np.ndarray, np.ndarray]:
    """(data symbols in mapping order, control-region symbols)."""
    sc, sym = _positions(grid.cfg, ReClass.DATA)
    csc, csym = _positions(grid.cfg, ReClass.CONTROL)
    return grid.values[sc, sym], grid.values[csc, csym]
