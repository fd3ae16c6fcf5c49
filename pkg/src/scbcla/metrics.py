"""Power, area, delay and the figure of merit.

Power is a settled-state activity surrogate::

    dynamic = sum(toggles(net) * switch_energy(driver)) / (vectors * period)
    leakage = sum(cell leakage)

Primary-input nets have no driving cell and contribute nothing. The figure
of merit is ``10^6 / (power * delay * area)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .logicsim import SimTrace, Stimulus, run_sequence
from .netlist import Netlist, stats
from .timing import analyze

__all__ = [
    "FOM_SCALE",
    "PowerReport",
    "MetricsReport",
    "ComparisonRow",
    "estimate_power",
    "compute_fom",
    "make_report",
    "compare",
    "evaluate_design",
    "reports_to_csv",
    "reports_from_csv",
    "comparisons_to_csv",
    "fmt_fom",
    "fmt_pct",
]

FOM_SCALE = 1e6


@dataclass(frozen=True)
class PowerReport:
    dynamic: float
    leakage: float
    total: float
    unit: str = "fJ/ns"


def estimate_power(trace: SimTrace, nl: Netlist) -> PowerReport:
    if not trace.period > 0:
        raise ValueError("trace period must be > 0")
    energy = 0.0
    for g in nl.gates:
        energy += trace.toggles.get(g.output, 0) * g.cell.switch_energy
    dynamic = energy / (trace.count * trace.period) if trace.count else 0.0
    leakage = sum(g.cell.leakage for g in nl.gates)
    return PowerReport(dynamic, leakage, dynamic + leakage, nl.library.units["power"])


def compute_fom(power: float, delay: float, area: float) -> float:
    for label, v in (("power", power), ("delay", delay), ("area", area)):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{label} must be a positive finite number, got {v!r}")
    return FOM_SCALE / (power * delay * area)


@dataclass(frozen=True)
class MetricsReport:
    """One design's row. Any of power/delay/area may be unknown (``None``)
    when only a published FOM or delay is available."""

    name: str
    power: float | None
    delay: float | None
    area: float | None
    fom: float | None
    units: Mapping[str, str] = field(default_factory=lambda: {"power": "uW", "time": "ns", "area": "um2"}, compare=False)


def make_report(
    name: str,
    power: float | None = None,
    delay: float | None = None,
    area: float | None = None,
    fom: float | None = None,
    units: Mapping[str, str] | None = None,
) -> MetricsReport:
    """Build a report, deriving the FOM when all three metrics are known."""
    if fom is None and None not in (power, delay, area):
        fom = compute_fom(power, delay, area)
    u = dict(units) if units else {"power": "uW", "time": "ns", "area": "um2"}
    return MetricsReport(name, power, delay, area, fom, u)


def _ratio_pct(new: float | None, old: float | None) -> float | None:
    if new is None or old is None:
        return None
    return (new / old - 1.0) * 100.0


@dataclass(frozen=True)
class ComparisonRow:
    baseline: MetricsReport
    candidate: MetricsReport
    delta_percent: dict[str, float | None]
    fom_gain_percent: float | None
    delay_reduction_percent: float | None
    speedup_percent: float | None


def compare(baseline: MetricsReport, candidate: MetricsReport) -> ComparisonRow:
    """Percent changes of ``candidate`` relative to ``baseline`` (exact, unrounded)."""
    for key in ("power", "time", "area"):
        bu, cu = baseline.units.get(key), candidate.units.get(key)
        if bu != cu:
            raise ValueError(f"unit mismatch for {key}: {bu!r} vs {cu!r}")
    delta = {m: _ratio_pct(getattr(candidate, m), getattr(baseline, m)) for m in ("power", "delay", "area", "fom")}
    bd, cd = baseline.delay, candidate.delay
    reduction = None if bd is None or cd is None else (1.0 - cd / bd) * 100.0
    speedup = None if bd is None or cd is None else (bd / cd - 1.0) * 100.0
    return ComparisonRow(baseline, candidate, delta, delta["fom"], reduction, speedup)


def evaluate_design(
    nl: Netlist,
    vectors: Stimulus | Sequence[Mapping[str, int]],
    period: float,
    name: str | None = None,
) -> MetricsReport:
    trace = run_sequence(nl, vectors, period)
    power = estimate_power(trace, nl).total
    delay = analyze(nl).critical_delay
    area = stats(nl).total_area
    u = nl.library.units
    fom = compute_fom(power, delay, area) if power > 0 and delay > 0 and area > 0 else None
    return MetricsReport(name or nl.name, power, delay, area, fom, {"power": u["power"], "time": u["time"], "area": u["area"]})


# ---------------------------------------------------------------- display


def fmt_fom(x: float | None) -> str:
    return "" if x is None else f"{x:.2f}"


def fmt_pct(x: float | None) -> str:
    return "" if x is None else f"{x:.1f}"


def _num(x: float | None) -> str:
    return "" if x is None else f"{x:.6g}"


CSV_COLUMNS = ("name", "power", "delay", "area", "fom")


def reports_to_csv(reports: Iterable[MetricsReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.name, _num(r.power), _num(r.delay), _num(r.area), fmt_fom(r.fom)])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[MetricsReport]:
    """Read either bench output (``name,power,delay,area[,fom]``) or the
    published-values layout (``name,power_uw,delay_ns,area_um2[,fom]``).

    Empty cells mean unknown; a missing FOM is derived when possible.
    """
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k}

        def get(*keys: str) -> float | None:
            for k in keys:
                if row.get(k):
                    return float(row[k])
            return None

        out.append(
            make_report(
                row["name"],
                get("power", "power_uw"),
                get("delay", "delay_ns"),
                get("area", "area_um2"),
                get("fom"),
            )
        )
    return out


COMPARISON_COLUMNS = (
    "baseline",
    "candidate",
    "power_delta_pct",
    "delay_delta_pct",
    "area_delta_pct",
    "fom_gain_pct",
    "delay_reduction_pct",
    "speedup_pct",
)


def comparisons_to_csv(rows: Iterable[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for r in rows:
        d = r.delta_percent
        w.writerow(
            [
                r.baseline.name,
                r.candidate.name,
                fmt_pct(d["power"]),
                fmt_pct(d["delay"]),
                fmt_pct(d["area"]),
                fmt_pct(r.fom_gain_percent),
                fmt_pct(r.delay_reduction_percent),
                fmt_pct(r.speedup_percent),
            ]
        )
    return buf.getvalue()
