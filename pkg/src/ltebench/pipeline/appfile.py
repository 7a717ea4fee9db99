"""The ``.app`` dataflow description: parsing, validation, serialisation, scheduling.

Grammar (whitespace-insensitive, ``#`` comments to end of line)::

    module <name> { lib = "<kind>" [; <key> = <value>]* }
    connect <name>.<port> -> <name>.<port>

Values are signed integers, decimals or double-quoted strings.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from typing import Any, Union

from . import registry as reg

Value = Union[int, float, str]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    block: str | None = None
    port: str | None = None
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        if self.line is None:
            where = ""
        elif self.column is None:
            where = f"{self.line}: "
        else:
            where = f"{self.line}:{self.column}: "
        return f"{where}{self.code}: {self.message}"


class AppError(ValueError):
    """Raised when an ``.app`` text does not describe a valid graph."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class BlockSpec:
    name: str
    kind: str
    params: tuple[tuple[str, Value], ...] = ()
    line: int | None = field(default=None, compare=False)

    @property
    def param_dict(self) -> dict[str, Value]:
        return dict(self.params)


@dataclass(frozen=True)
class Edge:
    src: str
    src_port: str
    dst: str
    dst_port: str
    line: int | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.src}.{self.src_port} -> {self.dst}.{self.dst_port}"


@dataclass(frozen=True)
class AppGraph:
    blocks: tuple[BlockSpec, ...]
    edges: tuple[Edge, ...]

    def block(self, name: str) -> BlockSpec:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.blocks]


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{};=.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


class _SyntaxError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(msg)
        self.diag = Diagnostic("syntax", msg, line=line, column=col)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise _SyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s[1:-1])


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text else kind
            got = repr(tok.text) if tok.text else "end of input"
            raise _SyntaxError(f"expected {want}, got {got}", tok.line, tok.col)
        return tok

    def value(self) -> Value:
        tok = self.next()
        if tok.kind == "string":
            return _unquote(tok.text)
        if tok.kind == "number":
            if re.fullmatch(r"[+-]?\d+", tok.text):
                return int(tok.text)
            return float(tok.text)
        raise _SyntaxError(f"expected a number or quoted string, got {tok.text!r}", tok.line, tok.col)

    def module(self, diags: list[Diagnostic]) -> BlockSpec:
        kw = self.expect("ident", "module")
        name = self.expect("ident").text
        self.expect("punct", "{")
        params: list[tuple[str, Value]] = []
        kind = None
        seen: set[str] = set()
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            key_tok = self.expect("ident")
            self.expect("punct", "=")
            val = self.value()
            if key_tok.text in seen:
                diags.append(Diagnostic("duplicate-param", f"parameter '{key_tok.text}' repeated",
                                        block=name, line=key_tok.line, column=key_tok.col))
            seen.add(key_tok.text)
            if key_tok.text == "lib":
                if not isinstance(val, str):
                    raise _SyntaxError("lib must be a quoted string", key_tok.line, key_tok.col)
                kind = val
            else:
                params.append((key_tok.text, val))
            if self.peek().kind == "punct" and self.peek().text == ";":
                self.next()
            elif not (self.peek().kind == "punct" and self.peek().text == "}"):
                tok = self.peek()
                raise _SyntaxError(f"expected ';' or '}}', got {tok.text!r}", tok.line, tok.col)
        self.expect("punct", "}")
        if kind is None:
            raise _SyntaxError(f"module '{name}' has no lib", kw.line, kw.col)
        return BlockSpec(name, kind, tuple(params), line=kw.line)

    def connect(self) -> Edge:
        kw = self.expect("ident", "connect")
        src = self.expect("ident").text
        self.expect("punct", ".")
        sp = self.expect("ident").text
        self.expect("arrow")
        dst = self.expect("ident").text
        self.expect("punct", ".")
        dp = self.expect("ident").text
        return Edge(src, sp, dst, dp, line=kw.line)

    def parse(self) -> tuple[AppGraph, list[Diagnostic]]:
        blocks, edges, diags = [], [], []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "ident" and tok.text == "module":
                blocks.append(self.module(diags))
            elif tok.kind == "ident" and tok.text == "connect":
                edges.append(self.connect())
            else:
                raise _SyntaxError(f"expected 'module' or 'connect', got {tok.text!r}", tok.line, tok.col)
        return AppGraph(tuple(blocks), tuple(edges)), diags


def parse_app(text: str) -> AppGraph:
    """Parse and validate ``.app`` text; raises :class:`AppError` with diagnostics."""
    try:
        graph, diags = _Parser(text).parse()
    except _SyntaxError as exc:
        raise AppError([exc.diag]) from None
    diags += validate_graph(graph)
    if diags:
        raise AppError(diags)
    return graph


def _format_value(v: Value) -> str:
    if isinstance(v, bool):
        raise TypeError("boolean parameters are not representable")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        text = repr(v)
        if "inf" in text or "nan" in text:
            raise ValueError(f"non-finite parameter {v!r}; use a string sentinel")
        return text
    escaped = v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def serialize_app(graph: AppGraph) -> str:
    lines = []
    for b in graph.blocks:
        items = [f'lib = "{b.kind}"'] + [f"{k} = {_format_value(v)}" for k, v in b.params]
        lines.append(f"module {b.name} {{ {'; '.join(items)} }}")
    if graph.edges:
        lines.append("")
    for e in graph.edges:
        lines.append(f"connect {e.src}.{e.src_port} -> {e.dst}.{e.dst_port}")
    return "\n".join(lines) + "\n"


def _ordering(names: list[str], edges) -> tuple[list[str], set[str]]:
    succ: dict[str, set[str]] = {n: set() for n in names}
    indeg = {n: 0 for n in names}
    for src, dst in {(e.src, e.dst) for e in edges if e.src in succ and e.dst in succ}:
        succ[src].add(dst)
        indeg[dst] += 1
    ready = [n for n in names if indeg[n] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(ready, m)
    return order, {n for n in names if n not in order}


def schedule(graph: AppGraph) -> list[str]:
    """Topological order, ties broken by lexicographic block name."""
    order, stuck = _ordering(graph.names, graph.edges)
    if stuck:
        raise CycleError(f"cycle detected among blocks {sorted(stuck)}")
    return order


def validate_graph(graph: AppGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if not graph.blocks:
        return [Diagnostic("no-blocks", "no blocks defined")]
    known = reg.registry()
    classes: dict[str, type[reg.Block]] = {}
    seen: set[str] = set()
    for b in graph.blocks:
        if b.name in seen:
            diags.append(Diagnostic("duplicate-block", f"block name '{b.name}' defined twice",
                                    block=b.name, line=b.line))
            continue
        seen.add(b.name)
        if b.kind in reg.RESERVED_KINDS:
            diags.append(Diagnostic("reserved-kind", f"'{b.kind}': {reg.RESERVED_KINDS[b.kind]}",
                                    block=b.name, line=b.line))
        elif b.kind not in known:
            diags.append(Diagnostic("unknown-kind", f"unknown block kind '{b.kind}'",
                                    block=b.name, line=b.line))
        else:
            cls = known[b.kind]
            classes[b.name] = cls
            keys = [k for k, _ in b.params]
            for k in keys:
                if k not in cls.defaults:
                    diags.append(Diagnostic("unknown-param", f"'{b.kind}' has no parameter '{k}'",
                                            block=b.name, line=b.line))
            for k in {k for k in keys if keys.count(k) > 1}:
                diags.append(Diagnostic("duplicate-param", f"parameter '{k}' repeated",
                                        block=b.name, line=b.line))

    drivers: dict[tuple[str, str], list[Edge]] = {}
    for e in graph.edges:
        ok = True
        for name, port, side in ((e.src, e.src_port, "outputs"), (e.dst, e.dst_port, "inputs")):
            if name not in seen:
                diags.append(Diagnostic("dangling-edge", f"edge {e} references unknown block '{name}'",
                                        block=name, port=port, line=e.line))
                ok = False
            elif name in classes and port not in getattr(classes[name], side):
                what = "output" if side == "outputs" else "input"
                diags.append(Diagnostic("dangling-edge", f"edge {e}: block '{name}' has no {what} port '{port}'",
                                        block=name, port=port, line=e.line))
                ok = False
        if not ok:
            continue
        drivers.setdefault((e.dst, e.dst_port), []).append(e)
        if e.src in classes and e.dst in classes:
            sk = classes[e.src].outputs[e.src_port]
            dk = classes[e.dst].inputs[e.dst_port]
            if not reg.kinds_compatible(sk, dk):
                diags.append(Diagnostic("type-mismatch", f"edge {e} connects {sk} output to {dk} input",
                                        block=e.dst, port=e.dst_port, line=e.line))

    for (dst, port), edges in drivers.items():
        if len(edges) > 1:
            diags.append(Diagnostic("multiple-drivers",
                                    f"input port {dst}.{port} has {len(edges)} incoming edges",
                                    block=dst, port=port, line=edges[1].line))
    for name, cls in classes.items():
        for port in cls.inputs:
            if (name, port) not in drivers:
                diags.append(Diagnostic("unconnected-input", f"input port {name}.{port} is not connected",
                                        block=name, port=port, line=graph.block(name).line))

    _, stuck = _ordering(sorted(seen), graph.edges)
    if stuck:
        diags.append(Diagnostic("cycle", f"cycle detected among blocks {sorted(stuck)}",
                                block=min(stuck)))
    else:
        has_in = {e.dst for e in graph.edges}
        has_out = {e.src for e in graph.edges}
        if not any(n not in has_in for n in seen):
            diags.append(Diagnostic("no-source", "graph has no source block"))
        if not any(n not in has_out for n in seen):
            diags.append(Diagnostic("no-sink", "graph has no sink block"))
    return diags
