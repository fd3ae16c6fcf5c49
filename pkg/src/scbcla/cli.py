"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 build error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import genarch, logicsim, metrics, netlist, timing
from .celllib import CellLibrary, CellNotFoundError, LibraryError, resolve_library

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUILD = 0, 1, 2, 3
LIBRARY_ENV = "SCBCLA_LIBRARY"
BUILTIN_TABLES = {"published": "published_tables.csv", "prior": "prior_work.csv"}


class UsageError(Exception):
    pass


class BuildError(Exception):
    pass


def _library(arg: str | None) -> CellLibrary:
    try:
        return resolve_library(arg or os.environ.get(LIBRARY_ENV) or "builtin")
    except (LibraryError, OSError) as exc:
        raise UsageError(f"cannot load library: {exc}") from None


def _spec(arch: str, style: str | None) -> genarch.AdderSpec:
    try:
        return genarch.parse_spec(arch, style=style)
    except genarch.SpecError as exc:
        raise UsageError(str(exc)) from None


def _build(spec: genarch.AdderSpec, lib: CellLibrary) -> netlist.Netlist:
    try:
        return genarch.build_adder(spec, lib)
    except CellNotFoundError as exc:
        raise BuildError(f"cannot build {spec.name!r}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_table(src: str) -> str:
    if src in BUILTIN_TABLES:
        return resources.files("scbcla").joinpath("data").joinpath(BUILTIN_TABLES[src]).read_text()
    return Path(src).read_text()


def _stimulus(source: str, nl: netlist.Netlist) -> logicsim.Stimulus:
    kind, _, rest = source.partition(":")
    if kind == "random":
        try:
            count, seed = (int(x) for x in rest.split(":"))
        except ValueError:
            raise UsageError("random vectors need count and seed: random:<count>:<seed>") from None
        if count < 1:
            raise UsageError("vector count must be >= 1")
        return logicsim.random_stimulus(nl.primary_inputs, count, seed)
    if kind == "file":
        try:
            return logicsim.read_vectors(rest, logicsim.adder_width(nl))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read vectors: {exc}") from None
    raise UsageError(f"vector source must be random:<count>:<seed> or file:<path>, got {source!r}")


# ------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    lib = _library(args.lib)
    nl = _build(_spec(args.arch, args.style), lib)
    report = netlist.validate(nl)
    if not report.ok:
        raise BuildError("; ".join(v.detail for v in report.violations))
    _emit(netlist.export(nl, args.format), args.out)
    if args.out:
        s = netlist.stats(nl)
        print(f"{nl.name}: {s.total_gates} cells, area {s.total_area:g} -> {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    lib = _library(args.lib)
    spec = _spec(args.arch, args.style)
    n = spec.total_width
    if args.exhaustive and n > logicsim.MAX_EXHAUSTIVE_WIDTH:
        raise UsageError(
            f"exhaustive verification is capped at width {logicsim.MAX_EXHAUSTIVE_WIDTH} "
            f"({spec.name} is {n} bits); use --random <count> --seed <seed>"
        )
    if not args.exhaustive and args.seed is None:
        raise UsageError("--random needs --seed")
    nl = _build(spec, lib)
    if args.exhaustive:
        verdict = logicsim.verify_adder(nl, n, "exhaustive")
    else:
        verdict = logicsim.verify_adder(nl, n, "random", count=args.random, seed=args.seed)
    if verdict.passed:
        print(f"PASS {spec.name}: {verdict.vectors} vectors")
        return EXIT_OK
    print(f"FAIL {spec.name}: {verdict.counterexample}")
    return EXIT_FAIL


def cmd_timing(args) -> int:
    lib = _library(args.lib)
    nl = _build(_spec(args.arch, args.style), lib)
    rep = timing.analyze(nl)
    _emit(timing.report_to_json(nl, rep) if args.json else timing.format_report(nl, rep), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    lib = _library(args.lib)
    nl = _build(_spec(args.arch, args.style), lib)
    trace = logicsim.run_sequence(nl, _stimulus(args.vectors, nl), args.period)
    pw = metrics.estimate_power(trace, nl)
    print(f"{nl.name}: {trace.count} vectors, {trace.total_toggles} net toggles")
    print(f"power: dynamic {pw.dynamic:.6g} + leakage {pw.leakage:.6g} = {pw.total:.6g} {pw.unit}")
    if args.vcd:
        logicsim.dump_vcd(trace, nl, args.vcd)
        print(f"vcd -> {args.vcd}")
    return EXIT_OK


def _bench_one(job: tuple[genarch.AdderSpec, CellLibrary, str, float]) -> metrics.MetricsReport:
    spec, lib, vectors, period = job
    nl = _build(spec, lib)
    return metrics.evaluate_design(nl, _stimulus(vectors, nl), period, name=spec.name)


def cmd_bench(args) -> int:
    if args.table:
        try:
            reports = metrics.reports_from_csv(_read_table(args.table))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read metrics table: {exc}") from None
    else:
        lib = _library(args.lib)
        if args.all:
            specs = genarch.named_specs()
        elif args.arch:
            specs = [_spec(a, None) for a in args.arch]
        else:
            raise UsageError("bench needs --all, --arch or --from-table")
        if args.style:
            specs = [s.with_style(args.style) for s in specs]
        if args.period <= 0:
            raise UsageError("--period must be > 0")
        jobs = [(s, lib, args.vectors, args.period) for s in specs]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                reports = list(pool.map(_bench_one, jobs))  # map keeps input order
        else:
            reports = [_bench_one(j) for j in jobs]
    _emit(metrics.reports_to_csv(reports), args.out)
    if args.svg:
        from .plotting import fom_bar_chart

        fom_bar_chart(reports, args.svg)
    if args.metrics_plot:
        from .plotting import metrics_panel

        metrics_panel(reports, args.metrics_plot)
    return EXIT_OK


def cmd_compare(args) -> int:
    table: dict[str, metrics.MetricsReport] = {}
    for src in args.source:
        try:
            for r in metrics.reports_from_csv(_read_table(src)):
                table[r.name] = r
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read {src}: {exc}") from None
    for name in (args.baseline, args.candidate):
        if name not in table:
            raise UsageError(f"design {name!r} not found; available: {', '.join(table)}")
    try:
        row = metrics.compare(table[args.baseline], table[args.candidate])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(metrics.comparisons_to_csv([row]), args.out)
    return EXIT_OK


# --------------------------------------------------------------- parser


def _arch_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--arch", required=True, help="named design (e.g. hybrid-scbcla-4) or segment list like 'rca:2,scbcla:4*7,scbcla:2'")
    p.add_argument("--style", choices=["basic", "decomposed"], help="override the lookahead generator style")
    p.add_argument("--lib", help=f"library file, 'builtin', 'builtin-ideal' or 'graded' (default ${LIBRARY_ENV} or builtin)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scbcla", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a netlist and export it")
    _arch_args(p)
    p.add_argument("--format", choices=["verilog", "dot", "json"], default="verilog")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a design against integer addition")
    _arch_args(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", type=int, metavar="COUNT")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("timing", help="static timing report")
    _arch_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("simulate", help="simulate a vector sequence, report power, optionally dump VCD")
    _arch_args(p)
    p.add_argument("--vectors", default="random:1000:7", help="random:<count>:<seed> or file:<path>")
    p.add_argument("--period", type=float, default=5.0)
    p.add_argument("--vcd")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="power/delay/area/FOM table")
    p.add_argument("--all", action="store_true", help="the ten canonical 32-bit designs")
    p.add_argument("--arch", action="append", help="design to include (repeatable)")
    p.add_argument("--style", choices=["basic", "decomposed"])
    p.add_argument("--lib")
    p.add_argument("--vectors", default="random:1000:7")
    p.add_argument("--period", type=float, default=5.0)
    p.add_argument("--from-table", "--paper-mode", dest="table", metavar="CSV", help="score published name,power_uw,delay_ns,area_um2 rows ('published' for the packaged tables)")
    p.add_argument("--out", help="CSV output (default stdout)")
    p.add_argument("--svg", help="FOM bar chart (format from extension)")
    p.add_argument("--metrics-plot", help="power/delay/area bar charts")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="percentage comparison of two designs")
    p.add_argument("--baseline", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--source", action="append", required=True, help="CSV with design rows ('published', 'prior' for packaged data); repeatable")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BuildError as exc:
        print(f"build error: {exc}", file=sys.stderr)
        return EXIT_BUILD


if __name__ == "__main__":
    sys.exit(main())
