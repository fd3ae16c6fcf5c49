"""Flat combinational gate netlists.

Nets are identified by their name; every net has exactly one driver, either
a primary input or the output of one gate. Gate input order is significant
for AO21, whose pins ``(a, b, c)`` compute ``(a & b) | c``.

JSON interchange schema::

    {
      "name": str,
      "library": str,            # library name, informational on import
      "pis": [str, ...],
      "pos": [str, ...],
      "gates": [{"kind": str, "fanin": int, "inputs": [str, ...],
                 "output": str, "tag": str}, ...]
    }
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .celllib import Cell, CellKind, CellLibrary, builtin_library

__all__ = [
    "GateInstance",
    "Netlist",
    "NetlistBuilder",
    "NetlistError",
    "Violation",
    "ValidationReport",
    "Stats",
    "validate",
    "audit_fanin",
    "stats",
    "fanin_cone",
    "export",
    "to_verilog",
    "to_dot",
    "to_json",
    "from_json",
]

PIN_NAMES = "abcdefghijklmnop"


class NetlistError(ValueError):
    pass


@dataclass(frozen=True)
class GateInstance:
    cell: Cell
    inputs: tuple[str, ...]
    output: str
    tag: str = ""

    @property
    def kind(self) -> CellKind:
        return self.cell.kind


@dataclass(frozen=True)
class Netlist:
    name: str
    primary_inputs: tuple[str, ...]
    primary_outputs: tuple[str, ...]
    gates: tuple[GateInstance, ...]
    library: CellLibrary = field(compare=False, repr=False)

    @cached_property
    def driver(self) -> dict[str, int]:
        """Net -> index of its driving gate, or -1 for primary inputs."""
        d = {pi: -1 for pi in self.primary_inputs}
        for i, g in enumerate(self.gates):
            d.setdefault(g.output, i)
        return d

    @cached_property
    def readers(self) -> dict[str, list[int]]:
        r: dict[str, list[int]] = defaultdict(list)
        for i, g in enumerate(self.gates):
            for n in g.inputs:
                r[n].append(i)
        return dict(r)

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """Gate indices in dependency order; only valid for acyclic netlists."""
        order = _kahn(self)
        if len(order) != len(self.gates):
            raise NetlistError(f"netlist {self.name!r} is cyclic")
        return tuple(order)

    @property
    def nets(self) -> list[str]:
        return list(self.primary_inputs) + [g.output for g in self.gates]

    def gate_driving(self, net: str) -> GateInstance | None:
        i = self.driver.get(net, -1)
        return None if i < 0 else self.gates[i]


def _kahn(nl: Netlist) -> list[int]:
    producer: dict[str, int] = {}
    for i, g in enumerate(nl.gates):
        producer.setdefault(g.output, i)
    indeg = [0] * len(nl.gates)
    succ: dict[int, list[int]] = defaultdict(list)
    for i, g in enumerate(nl.gates):
        for n in g.inputs:
            j = producer.get(n)
            if j is not None:
                indeg[i] += 1
                succ[j].append(i)
    q = deque(i for i, d in enumerate(indeg) if d == 0)
    order = []
    while q:
        i = q.popleft()
        order.append(i)
        for k in succ[i]:
            indeg[k] -= 1
            if indeg[k] == 0:
                q.append(k)
    return order


@dataclass(frozen=True)
class Violation:
    kind: str  # cycle | undriven | multi-driven | fanin-mismatch | undriven-output
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate(nl: Netlist) -> ValidationReport:
    out: list[Violation] = []
    drivers: Counter[str] = Counter(nl.primary_inputs)
    for g in nl.gates:
        drivers[g.output] += 1
    for net, n in sorted(drivers.items()):
        if n > 1:
            out.append(Violation("multi-driven", f"net {net!r} has {n} drivers"))
    for i, g in enumerate(nl.gates):
        if len(g.inputs) != g.cell.fanin:
            out.append(
                Violation(
                    "fanin-mismatch",
                    f"gate {i} ({g.cell.name}, tag {g.tag!r}) has {len(g.inputs)} inputs, cell expects {g.cell.fanin}",
                )
            )
        for n in g.inputs:
            if n not in drivers:
                out.append(Violation("undriven", f"gate {i} ({g.tag!r}) reads undriven net {n!r}"))
    for po in nl.primary_outputs:
        if po not in drivers:
            out.append(Violation("undriven-output", f"primary output {po!r} is undriven"))
    order = _kahn(nl)
    if len(order) != len(nl.gates):
        stuck = sorted(set(range(len(nl.gates))) - set(order))
        out.append(Violation("cycle", "combinational cycle through gates " + ", ".join(map(str, stuck[:10]))))
    return ValidationReport(out)


def audit_fanin(nl: Netlist, max_fanin: int) -> list[GateInstance]:
    return [g for g in nl.gates if g.cell.fanin > max_fanin]


@dataclass(frozen=True)
class Stats:
    gate_count: dict[str, int]  # by cell name, e.g. {"AND4": 3, "AO21": 8}
    by_kind: dict[str, int]
    total_gates: int
    total_area: float
    net_count: int


def stats(nl: Netlist) -> Stats:
    by_cell = Counter(g.cell.name for g in nl.gates)
    by_kind = Counter(g.cell.kind.value for g in nl.gates)
    return Stats(
        gate_count=dict(sorted(by_cell.items())),
        by_kind=dict(sorted(by_kind.items())),
        total_gates=len(nl.gates),
        total_area=sum(g.cell.area for g in nl.gates),
        net_count=len(set(nl.primary_inputs) | {g.output for g in nl.gates}),
    )


def fanin_cone(nl: Netlist, net: str) -> set[str]:
    """All nets (including ``net``) in the transitive fan-in of ``net``."""
    seen = {net}
    stack = [net]
    while stack:
        g = nl.gate_driving(stack.pop())
        if g is None:
            continue
        for n in g.inputs:
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return seen


class NetlistBuilder:
    """Incremental construction; ``build()`` validates and freezes."""

    def __init__(self, library: CellLibrary, name: str = "top"):
        self.library = library
        self.name = name
        self._pis: list[str] = []
        self._pos: list[str] = []
        self._gates: list[GateInstance] = []
        self._nets: set[str] = set()
        self._auto = 0

    def _claim(self, net: str) -> str:
        if net in self._nets:
            raise NetlistError(f"net {net!r} already driven")
        self._nets.add(net)
        return net

    def fresh(self, prefix: str = "n") -> str:
        while True:
            name = f"{prefix}{self._auto}"
            self._auto += 1
            if name not in self._nets:
                return name

    def add_input(self, net: str) -> str:
        self._pis.append(self._claim(net))
        return net

    def add_inputs(self, nets: Iterable[str]) -> list[str]:
        return [self.add_input(n) for n in nets]

    def add_output(self, net: str) -> str:
        self._pos.append(net)
        return net

    def gate(self, kind: CellKind, inputs: Sequence[str], out: str | None = None, tag: str = "") -> str:
        cell = self.library.lookup(kind, len(inputs))
        out = self._claim(out if out is not None else self.fresh())
        self._gates.append(GateInstance(cell, tuple(inputs), out, tag))
        return out

    def build(self) -> Netlist:
        nl = Netlist(self.name, tuple(self._pis), tuple(self._pos), tuple(self._gates), self.library)
        report = validate(nl)
        if not report.ok:
            raise NetlistError("; ".join(v.detail for v in report.violations))
        return nl


# ---------------------------------------------------------------- export


_VERILOG_BODY = {
    CellKind.INV: "~a",
    CellKind.BUF: "a",
    CellKind.XOR: "a ^ b",
    CellKind.XNOR: "~(a ^ b)",
    CellKind.AO21: "(a & b) | c",
}
_VERILOG_OP = {CellKind.AND: "&", CellKind.OR: "|", CellKind.NAND: "&", CellKind.NOR: "|"}


def _vident(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_$]*", name):
        return name
    return "\\" + name + " "


def _cell_module(cell: Cell) -> str:
    pins = PIN_NAMES[: cell.fanin]
    if cell.kind in _VERILOG_BODY:
        body = _VERILOG_BODY[cell.kind]
    else:
        body = f" {_VERILOG_OP[cell.kind]} ".join(pins)
        if cell.kind in (CellKind.NAND, CellKind.NOR):
            body = f"~({body})"
    return (
        f"module {cell.name} (input {', '.join(pins)}, output out);\n"
        f"  assign out = {body};\n"
        f"endmodule\n"
    )


def to_verilog(nl: Netlist, include_cells: bool = True) -> str:
    lines = [f"// {nl.name}: {len(nl.gates)} cells, library {nl.library.name}"]
    ports = [_vident(p) for p in nl.primary_inputs] + [_vident(p) for p in nl.primary_outputs if p not in nl.primary_inputs]
    lines.append(f"module {_vident(re.sub(r'[^A-Za-z0-9_]', '_', nl.name))} (")
    lines.append("  " + ",\n  ".join(ports))
    lines.append(");")
    for p in nl.primary_inputs:
        lines.append(f"  input {_vident(p)};")
    pos = set(nl.primary_outputs)
    for p in nl.primary_outputs:
        if p not in nl.primary_inputs:
            lines.append(f"  output {_vident(p)};")
    for g in nl.gates:
        if g.output not in pos:
            lines.append(f"  wire {_vident(g.output)};")
    for i, g in enumerate(nl.gates):
        conns = ", ".join(f".{PIN_NAMES[k]}({_vident(n)})" for k, n in enumerate(g.inputs))
        comment = f"  // {g.tag}" if g.tag else ""
        lines.append(f"  {g.cell.name} g{i} ({conns}, .out({_vident(g.output)}));{comment}")
    lines.append("endmodule")
    text = "\n".join(lines) + "\n"
    if include_cells:
        used = sorted({g.cell.name: g.cell for g in nl.gates}.items())
        text += "".join("\n" + _cell_module(c) for _, c in used)
    return text


def _dq(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(nl: Netlist) -> str:
    lines = [f"digraph {_dq(nl.name)} {{", "  rankdir=LR;"]
    for p in nl.primary_inputs:
        lines.append(f"  {_dq('pi:' + p)} [shape=box, label={_dq(p)}];")
    for i, g in enumerate(nl.gates):
        label = g.cell.name + (f"\\n{g.tag}" if g.tag else "")
        lines.append(f"  g{i} [shape=ellipse, label={_dq(label)}];")
    for p in nl.primary_outputs:
        lines.append(f"  {_dq('po:' + p)} [shape=box, label={_dq(p)}];")

    def src(net: str) -> str:
        d = nl.driver[net]
        return _dq("pi:" + net) if d < 0 else f"g{d}"

    for i, g in enumerate(nl.gates):
        for k, n in enumerate(g.inputs):
            lines.append(f"  {src(n)} -> g{i} [label={_dq(n)}, headlabel={_dq(PIN_NAMES[k])}];")
    for p in nl.primary_outputs:
        lines.append(f"  {src(p)} -> {_dq('po:' + p)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(nl: Netlist) -> str:
    doc = {
        "name": nl.name,
        "library": nl.library.name,
        "pis": list(nl.primary_inputs),
        "pos": list(nl.primary_outputs),
        "gates": [
            {"kind": g.cell.kind.value, "fanin": g.cell.fanin, "inputs": list(g.inputs), "output": g.output, "tag": g.tag}
            for g in nl.gates
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def from_json(text: str, library: CellLibrary | None = None) -> Netlist:
    """Rebuild a netlist; cells are re-resolved against ``library``.

    Without an explicit library the builtin of the recorded name is used.
    """
    doc = json.loads(text)
    if library is None:
        library = builtin_library(doc.get("library", "builtin"))
    gates = []
    for g in doc["gates"]:
        cell = library.lookup(CellKind(g["kind"]), int(g["fanin"]))
        gates.append(GateInstance(cell, tuple(g["inputs"]), g["output"], g.get("tag", "")))
    return Netlist(doc["name"], tuple(doc["pis"]), tuple(doc["pos"]), tuple(gates), library)


def export(nl: Netlist, fmt: str) -> str:
    if fmt == "verilog":
        return to_verilog(nl)
    if fmt == "dot":
        return to_dot(nl)
    if fmt == "json":
        return to_json(nl)
    raise ValueError(f"unknown export format {fmt!r}; expected verilog, dot or json")
