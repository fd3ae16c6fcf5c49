"""Static timing: longest topological paths with fixed per-cell delays."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .netlist import Netlist

__all__ = [
    "TimingReport",
    "UnreachableError",
    "analyze",
    "path_delay",
    "worst_path",
    "rank_by_delay",
    "format_path",
    "format_report",
    "report_to_json",
]


class UnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class TimingReport:
    arrival: dict[str, float]
    per_output: dict[str, float]
    critical_delay: float
    critical_path: tuple[int, ...]  # gate indices, PI side first
    source: str  # primary input starting the critical path
    sink: str  # primary output ending it
    time_unit: str = "ns"


def analyze(nl: Netlist) -> TimingReport:
    arrival: dict[str, float] = {pi: 0.0 for pi in nl.primary_inputs}
    for i in nl.topo_order:
        g = nl.gates[i]
        arrival[g.output] = g.cell.delay + max(arrival[n] for n in g.inputs)
    per_output = {po: arrival[po] for po in nl.primary_outputs}
    if not per_output:
        return TimingReport(arrival, {}, 0.0, (), "", "", nl.library.units["time"])
    # first PO in port order wins ties
    sink = max(nl.primary_outputs, key=lambda po: (per_output[po], -nl.primary_outputs.index(po)))
    source, path = _backtrack(nl, arrival, sink)
    return TimingReport(arrival, per_output, per_output[sink], path, source, sink, nl.library.units["time"])


def _backtrack(nl: Netlist, arrival: dict[str, float], net: str) -> tuple[str, tuple[int, ...]]:
    path: list[int] = []
    while (d := nl.driver[net]) >= 0:
        path.append(d)
        g = nl.gates[d]
        worst = max(arrival[n] for n in g.inputs)
        # among tied inputs prefer the lowest driving gate index; PIs only tie with PIs
        cands = [n for n in g.inputs if arrival[n] == worst]
        net = min(cands, key=lambda n: (nl.driver[n] if nl.driver[n] >= 0 else len(nl.gates) + nl.primary_inputs.index(n)))
    path.reverse()
    return net, tuple(path)


def worst_path(nl: Netlist, report: TimingReport, net: str) -> tuple[str, tuple[int, ...]]:
    """Latest-arriving path into ``net``: (source PI, gate indices)."""
    return _backtrack(nl, report.arrival, net)


def path_delay(nl: Netlist, src: str, dst: str) -> float:
    """Longest delay over paths from net ``src`` to net ``dst``."""
    if src not in nl.driver:
        raise UnreachableError(f"unknown net {src!r}")
    if src == dst:
        return 0.0
    dist: dict[str, float] = {src: 0.0}
    for i in nl.topo_order:
        g = nl.gates[i]
        reach = [dist[n] for n in g.inputs if n in dist]
        if reach and g.output != src:
            dist[g.output] = g.cell.delay + max(reach)
    if dst not in dist:
        raise UnreachableError(f"no path from {src!r} to {dst!r}")
    return dist[dst]


def rank_by_delay(reports: Sequence[tuple[str, TimingReport]]) -> list[tuple[str, TimingReport]]:
    return sorted(reports, key=lambda nr: (nr[1].critical_delay, nr[0]))


def format_path(nl: Netlist, report: TimingReport) -> str:
    """``PI -> CELL(tag) @t -> ... -> PO`` with cumulative arrival times."""
    parts = [f"{report.source} @0"]
    for i in report.critical_path:
        g = nl.gates[i]
        parts.append(f"{g.cell.name}({g.tag}) @{report.arrival[g.output]:g}")
    parts.append(f"{report.sink} @{report.critical_delay:g}")
    return " -> ".join(parts)


def format_report(nl: Netlist, report: TimingReport) -> str:
    u = report.time_unit
    w = max([len(po) for po in report.per_output] + [6])
    lines = [f"timing report: {nl.name}", f"critical delay: {report.critical_delay:g} {u}", ""]
    lines.append(f"{'output':<{w}}  arrival ({u})")
    for po, t in report.per_output.items():
        lines.append(f"{po:<{w}}  {t:g}")
    lines += ["", "critical path:", "  " + format_path(nl, report)]
    return "\n".join(lines) + "\n"


def report_to_json(nl: Netlist, report: TimingReport) -> str:
    doc = {
        "name": nl.name,
        "time_unit": report.time_unit,
        "critical_delay": report.critical_delay,
        "source": report.source,
        "sink": report.sink,
        "critical_path": [
            {"gate": i, "cell": nl.gates[i].cell.name, "tag": nl.gates[i].tag, "output": nl.gates[i].output,
             "arrival": report.arrival[nl.gates[i].output]}
            for i in report.critical_path
        ],
        "per_output": report.per_output,
    }
    return json.dumps(doc, indent=1) + "\n"
