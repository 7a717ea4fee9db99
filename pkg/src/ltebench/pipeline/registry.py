"""Block base class and the registry of block kinds usable in ``.app`` files."""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from typing import Any, ClassVar, Mapping

import numpy as np

BIT = "bit"
SOFT = "soft"
COMPLEX = "complex"
BYTE = "byte"
ANY = "any"
ELEMENT_KINDS = (BIT, SOFT, COMPLEX, BYTE, ANY)

DTYPES = {BIT: np.uint8, SOFT: np.float64, COMPLEX: np.complex128, BYTE: np.uint8}

# Kinds whose slot exists but that have no implementation (RF front ends).
RESERVED_KINDS = {
    "rf_source": "RF hardware source (reserved, not implemented)",
    "rf_sink": "RF hardware sink (reserved, not implemented)",
}

_BUILTIN_MODULES = (
    "ltebench.pipeline.stdblocks",
    "ltebench.phy.blocks",
    "ltebench.channel_blocks",
)

_REGISTRY: dict[str, type["Block"]] = {}


class BlockConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Packet:
    """One payload travelling on a FIFO, with out-of-band metadata."""

    data: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(np.asarray(self.data).size)


@dataclass
class Context:
    iteration: int
    seed: int


class Block:
    """A processing module.

    Subclasses declare ``kind``, their ports (name -> element kind) and
    parameter defaults, and implement :meth:`work`, which receives one packet
    per input port and returns one packet per output port.
    """

    kind: ClassVar[str] = ""
    inputs: ClassVar[dict[str, str]] = {}
    outputs: ClassVar[dict[str, str]] = {}
    defaults: ClassVar[dict[str, Any]] = {}

    def __init__(self, name: str, params: Mapping[str, Any] | None = None,
                 rng: np.random.Generator | None = None):
        self.name = name
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise BlockConfigError(f"{self.kind} block '{name}': unknown parameter(s) {sorted(unknown)}")
        self.params = {**self.defaults, **params}
        self.rng = rng

    def work(self, inputs: dict[str, Packet], ctx: Context) -> dict[str, Packet]:
        raise NotImplementedError

    def emit(self, port: str, data, meta: Mapping[str, Any] | None = None, **extra) -> Packet:
        kind = self.outputs[port]
        arr = np.asarray(data, dtype=DTYPES.get(kind)) if kind != ANY else np.asarray(data)
        arr.setflags(write=False)
        return Packet(arr, {**(meta or {}), **extra})


def register(cls: type[Block]) -> type[Block]:
    if not cls.kind:
        raise ValueError(f"{cls.__name__} has no kind")
    if cls.kind in _REGISTRY and _REGISTRY[cls.kind] is not cls:
        raise ValueError(f"block kind '{cls.kind}' registered twice")
    _REGISTRY[cls.kind] = cls
    return cls


def load_builtin() -> None:
    for mod in _BUILTIN_MODULES:
        importlib.import_module(mod)


def registry() -> dict[str, type[Block]]:
    load_builtin()
    return dict(_REGISTRY)


def lookup(kind: str) -> type[Block]:
    reg = registry()
    if kind in RESERVED_KINDS:
        raise BlockConfigError(f"block kind '{kind}': {RESERVED_KINDS[kind]}")
    try:
        return reg[kind]
    except KeyError:
        raise BlockConfigError(f"unknown block kind '{kind}'") from None


def kinds_compatible(src: str, dst: str) -> bool:
    return src == dst or ANY in (src, dst)
