"""Netlist generators for ripple-carry, conventional and section-carry CLAs.

Signal naming follows the carry equations: ``P_i = A_i ^ B_i``,
``G_i = A_i & B_i``, lookahead carries ``C_i``, sums ``Sum_i``. Bit indices
are global within a composed adder, so a block occupying bits 8..11 produces
``P_8``..``P_11`` and the carry ``C_12``. The adder's own carry-in and
carry-out are ``Cin`` and ``Cout``.

Decomposed lookahead generators factor every carry as::

    C_{i+1} = N_i + M_i & C_0
    N_i     = G_i + P_i G_{i-1} + P_i P_{i-1} G_{i-2} + ... + P_i..P_1 G_0
    M_i     = P_i P_{i-1} .. P_0

with N and M built as fan-in bounded AND/OR trees and the last stage mapped
to one AO21 cell whose pins are ``(a, b, c) = (M_i, C_0, N_i)``. The carry-in
therefore only ever meets a single AO21.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .celllib import CellKind, CellLibrary, CellNotFoundError, builtin_unit_library
from .netlist import Netlist, NetlistBuilder

__all__ = [
    "Arch",
    "Style",
    "SegmentSpec",
    "AdderSpec",
    "CarryPlan",
    "SpecError",
    "decomposition_plan",
    "build_pg",
    "build_basic_clg",
    "build_decomposed_clg",
    "build_basic_sclg",
    "build_decomposed_sclg",
    "build_rca",
    "build_ccla_block",
    "build_scbcla_block",
    "build_adder",
    "named_specs",
    "ALIASES",
    "parse_spec",
    "format_spec",
]


class Arch(str, enum.Enum):
    RCA = "rca"
    CCLA = "ccla"
    SCBCLA = "scbcla"


class Style(str, enum.Enum):
    BASIC = "basic"
    DECOMPOSED = "decomposed"


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SegmentSpec:
    kind: Arch
    width: int
    style: Style = Style.DECOMPOSED

    def __post_init__(self):
        object.__setattr__(self, "kind", Arch(self.kind))
        object.__setattr__(self, "style", Style(self.style))
        if self.width < 1:
            raise SpecError(f"segment width must be >= 1, got {self.width}")


@dataclass(frozen=True)
class AdderSpec:
    name: str
    segments: tuple[SegmentSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise SpecError("adder spec needs at least one segment")

    @property
    def total_width(self) -> int:
        return sum(s.width for s in self.segments)

    def with_style(self, style: Style | str) -> "AdderSpec":
        segs = tuple(s if s.kind is Arch.RCA else replace(s, style=Style(style)) for s in self.segments)
        return AdderSpec(self.name, segs)


@dataclass(frozen=True)
class CarryPlan:
    """Factoring of one lookahead output ``C_{index+1}`` over local bits.

    ``terms`` are the product groups OR-ed into N, most significant first:
    ``("G_i",)``, then ``("G_{i-1}", "P_i")`` and so on. ``m_product`` is
    the full propagate product M. Neither mentions the carry-in.
    """

    index: int
    terms: tuple[tuple[str, ...], ...]
    m_product: tuple[str, ...]


def decomposition_plan(m: int) -> list[CarryPlan]:
    plans = []
    for i in range(m):
        terms = [(f"G_{i}",)]
        for j in range(i - 1, -1, -1):
            terms.append((f"G_{j}",) + tuple(f"P_{k}" for k in range(j + 1, i + 1)))
        plans.append(CarryPlan(i, tuple(terms), tuple(f"P_{k}" for k in range(i + 1))))
    return plans


def _chunks(seq: Sequence[str], k: int) -> list[list[str]]:
    return [list(seq[i : i + k]) for i in range(0, len(seq), k)]


class _Emitter:
    """Builder wrapper with memoized fan-in bounded AND/OR reduction."""

    def __init__(self, b: NetlistBuilder):
        self.b = b
        self.lib = b.library
        self._memo: dict[tuple[CellKind, tuple[str, ...]], str] = {}

    def reduce(self, kind: CellKind, signals: Sequence[str], out: str | None = None, tag: str = "") -> str:
        signals = tuple(signals)
        if len(signals) == 1:
            return signals[0]
        key = (kind, signals)
        if key in self._memo:
            return self._memo[key]
        width = self.lib.widest(kind)
        if len(signals) <= width:
            net = self.b.gate(kind, signals, out=out, tag=tag)
        else:
            parts = [self.reduce(kind, c, tag=f"{tag}.sub") for c in _chunks(signals, width)]
            net = self.reduce(kind, parts, out=out, tag=tag)
        self._memo[key] = net
        return net

    # --- building blocks, all bit indices global ---

    def pg(self, bits: range, tag: str) -> None:
        for i in bits:
            self.b.gate(CellKind.XOR, [f"A_{i}", f"B_{i}"], out=f"P_{i}", tag=f"{tag}.pg.xor.p{i}")
            self.b.gate(CellKind.AND, [f"A_{i}", f"B_{i}"], out=f"G_{i}", tag=f"{tag}.pg.and.g{i}")

    def decomposed_carries(self, bits: range, cin: str, outs: dict[int, str], tag: str) -> None:
        """Emit lookahead carries for local indices listed in ``outs``.

        ``outs`` maps local plan index i (output C_{i+1}) to the net name.
        """
        base = bits.start

        def net(sym: str) -> str:
            letter, idx = sym.split("_")
            return f"{letter}_{base + int(idx)}"

        for plan in decomposition_plan(len(bits)):
            if plan.index not in outs:
                continue
            c = base + plan.index + 1
            term_nets = []
            for t in plan.terms:
                if len(t) == 1:
                    term_nets.append(net(t[0]))
                else:
                    g = int(t[0].split("_")[1]) + base
                    term_nets.append(self.reduce(CellKind.AND, [net(s) for s in t], out=f"T_{c}_{g}", tag=f"{tag}.and.t{c}_{g}"))
            n_net = self.reduce(CellKind.OR, term_nets, out=f"N_{c}", tag=f"{tag}.or.n{c}")
            m_net = self.reduce(CellKind.AND, [net(s) for s in plan.m_product], out=f"M_{c}", tag=f"{tag}.and.m{c}")
            self.b.gate(CellKind.AO21, [m_net, cin, n_net], out=outs[plan.index], tag=f"{tag}.ao21.c{c}")

    def basic_carries(self, bits: range, cin: str, outs: dict[int, str], tag: str) -> None:
        """Flat two-level AND-OR per carry, nothing shared between carries."""
        base = bits.start
        for i in sorted(outs):
            c = base + i + 1
            terms = [f"G_{base + i}"]
            for j in range(i - 1, -1, -1):
                ins = [f"P_{base + k}" for k in range(i, j, -1)] + [f"G_{base + j}"]
                terms.append(self.b.gate(CellKind.AND, ins, out=self.b.fresh(f"T_{c}_{base + j}_"), tag=f"{tag}.and.t{c}_{base + j}"))
            ins = [f"P_{base + k}" for k in range(i, -1, -1)] + [cin]
            terms.append(self.b.gate(CellKind.AND, ins, out=self.b.fresh(f"M_{c}_"), tag=f"{tag}.and.m{c}"))
            self.b.gate(CellKind.OR, terms, out=outs[i], tag=f"{tag}.or.c{c}")

    def carries(self, style: Style, bits: range, cin: str, outs: dict[int, str], tag: str) -> None:
        if style is Style.BASIC:
            _require_basic(self.lib, [i + 1 for i in outs])
            self.basic_carries(bits, cin, outs, tag)
        else:
            self.decomposed_carries(bits, cin, outs, tag)

    def rca(self, bits: range, cin: str, cout: str, tag: str) -> None:
        carry = cin
        for i in bits:
            t = f"{tag}.fa{i}"
            self.b.gate(CellKind.XOR, [f"A_{i}", f"B_{i}"], out=f"P_{i}", tag=f"{t}.xor.p")
            self.b.gate(CellKind.AND, [f"A_{i}", f"B_{i}"], out=f"G_{i}", tag=f"{t}.and.g")
            self.b.gate(CellKind.XOR, [f"P_{i}", carry], out=f"Sum_{i}", tag=f"{t}.xor.s")
            nxt = cout if i == bits.stop - 1 else f"C_{i + 1}"
            self.b.gate(CellKind.AO21, [f"P_{i}", carry, f"G_{i}"], out=nxt, tag=f"{t}.ao21.c")
            carry = nxt

    def ccla(self, bits: range, cin: str, cout: str, style: Style, tag: str) -> None:
        self.pg(bits, tag)
        m = len(bits)
        outs = {i: (cout if i == m - 1 else f"C_{bits.start + i + 1}") for i in range(m)}
        self.carries(style, bits, cin, outs, f"{tag}.clg")
        for k, i in enumerate(bits):
            c = cin if k == 0 else outs[k - 1]
            self.b.gate(CellKind.XOR, [f"P_{i}", c], out=f"Sum_{i}", tag=f"{tag}.sum.xor.s{i}")

    def scbcla(self, bits: range, cin: str, cout: str, style: Style, tag: str, ripple_out: str | None = None) -> None:
        self.pg(bits, tag)
        m = len(bits)
        self.carries(style, bits, cin, {m - 1: cout}, f"{tag}.sclg")
        carry = cin
        for k, i in enumerate(bits):
            self.b.gate(CellKind.XOR, [f"P_{i}", carry], out=f"Sum_{i}", tag=f"{tag}.sum.xor.s{i}")
            if k < m - 1:
                nxt = f"Cr_{i + 1}"
            elif ripple_out is not None:
                nxt = ripple_out
            else:
                break
            self.b.gate(CellKind.AO21, [f"P_{i}", carry, f"G_{i}"], out=nxt, tag=f"{tag}.ripple.ao21.c{i + 1}")
            carry = nxt


def _require_basic(lib: CellLibrary, carry_indices: Iterable[int]) -> None:
    """Fail up front, naming every wide gate a flat generator would need."""
    need = set()
    for k in carry_indices:
        for w in range(2, k + 2):
            need.add((CellKind.AND, w))
        need.add((CellKind.OR, k + 1))
    missing = [kf for kf in need if kf[1] >= 2 and not lib.has(*kf)]
    if missing:
        raise CellNotFoundError(missing, lib.name, "basic generator needs flat gates; use the decomposed style or an ideal-mode library")


def _lib(library: CellLibrary | None) -> CellLibrary:
    return library if library is not None else builtin_unit_library()


def _adder_ports(b: NetlistBuilder, n: int) -> None:
    b.add_inputs(f"A_{i}" for i in range(n))
    b.add_inputs(f"B_{i}" for i in range(n))
    b.add_input("Cin")


def _adder_outputs(b: NetlistBuilder, n: int) -> None:
    for i in range(n):
        b.add_output(f"Sum_{i}")
    b.add_output("Cout")


def build_pg(width: int, library: CellLibrary | None = None) -> Netlist:
    b = NetlistBuilder(_lib(library), f"pg{width}")
    b.add_inputs(f"A_{i}" for i in range(width))
    b.add_inputs(f"B_{i}" for i in range(width))
    _Emitter(b).pg(range(width), "pg")
    for i in range(width):
        b.add_output(f"P_{i}")
    for i in range(width):
        b.add_output(f"G_{i}")
    return b.build()


def _generator(width: int, library: CellLibrary | None, style: Style, section: bool) -> Netlist:
    lib = _lib(library)
    kind = "sclg" if section else "clg"
    b = NetlistBuilder(lib, f"{style.value}_{kind}{width}")
    b.add_inputs(f"P_{i}" for i in range(width))
    b.add_inputs(f"G_{i}" for i in range(width))
    b.add_input("C_0")
    idx = [width - 1] if section else list(range(width))
    outs = {i: f"C_{i + 1}" for i in idx}
    _Emitter(b).carries(style, range(width), "C_0", outs, kind)
    for i in idx:
        b.add_output(f"C_{i + 1}")
    return b.build()


def build_basic_clg(width: int, library: CellLibrary | None = None) -> Netlist:
    """Flat AND-OR lookahead generator; needs (width+1)-input gates."""
    return _generator(width, library, Style.BASIC, section=False)


def build_decomposed_clg(width: int, library: CellLibrary | None = None) -> Netlist:
    return _generator(width, library, Style.DECOMPOSED, section=False)


def build_basic_sclg(width: int, library: CellLibrary | None = None) -> Netlist:
    return _generator(width, library, Style.BASIC, section=True)


def build_decomposed_sclg(width: int, library: CellLibrary | None = None) -> Netlist:
    return _generator(width, library, Style.DECOMPOSED, section=True)


def build_rca(width: int, library: CellLibrary | None = None) -> Netlist:
    b = NetlistBuilder(_lib(library), f"rca{width}")
    _adder_ports(b, width)
    _Emitter(b).rca(range(width), "Cin", "Cout", "rca")
    _adder_outputs(b, width)
    return b.build()


def build_ccla_block(width: int, style: Style | str = Style.DECOMPOSED, library: CellLibrary | None = None) -> Netlist:
    style = Style(style)
    b = NetlistBuilder(_lib(library), f"ccla{width}_{style.value}")
    _adder_ports(b, width)
    _Emitter(b).ccla(range(width), "Cin", "Cout", style, "ccla")
    _adder_outputs(b, width)
    return b.build()


def build_scbcla_block(
    width: int,
    style: Style | str = Style.DECOMPOSED,
    library: CellLibrary | None = None,
    expose_ripple_carry: bool = False,
) -> Netlist:
    """m-bit section-carry block.

    Sums ripple internally; ``Cout`` comes from the section-carry generator.
    With ``expose_ripple_carry`` the chain is extended by one AO21 whose
    output ``Cr_<width>`` becomes an extra primary output, for checking the
    two carry paths against each other.
    """
    style = Style(style)
    b = NetlistBuilder(_lib(library), f"scbcla{width}_{style.value}")
    _adder_ports(b, width)
    ripple = f"Cr_{width}" if expose_ripple_carry else None
    _Emitter(b).scbcla(range(width), "Cin", "Cout", style, "scbcla", ripple_out=ripple)
    _adder_outputs(b, width)
    if ripple:
        b.add_output(ripple)
    return b.build()


def build_adder(spec: AdderSpec, library: CellLibrary | None = None) -> Netlist:
    n = spec.total_width
    b = NetlistBuilder(_lib(library), spec.name)
    _adder_ports(b, n)
    em = _Emitter(b)
    lo = 0
    carry = "Cin"
    for k, seg in enumerate(spec.segments):
        bits = range(lo, lo + seg.width)
        cout = "Cout" if k == len(spec.segments) - 1 else f"C_{bits.stop}"
        tag = f"s{k}.{seg.kind.value}"
        if seg.kind is Arch.RCA:
            em.rca(bits, carry, cout, tag)
        elif seg.kind is Arch.CCLA:
            em.ccla(bits, carry, cout, seg.style, tag)
        else:
            em.scbcla(bits, carry, cout, seg.style, tag)
        carry = cout
        lo = bits.stop
    _adder_outputs(b, n)
    return b.build()


# ------------------------------------------------------------ named designs


def _topologies(block: Arch) -> list[tuple[str, str, list[SegmentSpec]]]:
    R = lambda w: SegmentSpec(Arch.RCA, w)  # noqa: E731
    X = lambda w: SegmentSpec(block, w)  # noqa: E731
    up = block.value.upper()
    lo = block.value
    return [
        (f"Homogeneous {up}", f"homogeneous-{lo}", [X(4)] * 8),
        (f"Hybrid {up}_1", f"hybrid-{lo}-1", [R(4)] + [X(4)] * 7),
        (f"Hybrid {up}_2", f"hybrid-{lo}-2", [R(2), X(2)] + [X(4)] * 7),
        # MSB nibble: 3-bit block at bits 28..30, 1-bit RCA at bit 31
        (f"Hybrid {up}_3", f"hybrid-{lo}-3", [R(2), X(2)] + [X(4)] * 6 + [X(3), R(1)]),
        (f"Hybrid {up}_4", f"hybrid-{lo}-4", [R(2), X(2)] + [X(4)] * 6 + [X(2), R(2)]),
    ]


def named_specs() -> list[AdderSpec]:
    """The ten 32-bit designs: five CCLA then five SCBCLA topologies."""
    return [AdderSpec(name, tuple(segs)) for block in (Arch.CCLA, Arch.SCBCLA) for name, _, segs in _topologies(block)]


ALIASES: dict[str, str] = {
    alias: name for block in (Arch.CCLA, Arch.SCBCLA) for name, alias, _ in _topologies(block)
}

_SEG_RE = re.compile(r"^\s*(rca|ccla|scbcla)\s*:\s*(\d+)\s*(?::\s*(basic|decomposed)\s*)?(?:\*\s*(\d+)\s*)?$", re.I)


def parse_spec(text: str, style: Style | str | None = None, name: str | None = None) -> AdderSpec:
    """Parse ``rca:2,scbcla:2,scbcla:4*6,scbcla:3,rca:1`` (LSB first) or an alias.

    A segment may carry its own style, ``ccla:4:basic``; ``style`` overrides
    every lookahead segment when given.
    """
    key = text.strip()
    by_name = {s.name: s for s in named_specs()}
    if key.lower() in ALIASES:
        spec = by_name[ALIASES[key.lower()]]
    elif key in by_name:
        spec = by_name[key]
    else:
        segs: list[SegmentSpec] = []
        for part in key.split(","):
            mt = _SEG_RE.match(part)
            if not mt:
                raise SpecError(
                    f"cannot parse segment {part.strip()!r}; expected kind:width[:style][*count] "
                    f"with kind in rca/ccla/scbcla, or one of: {', '.join(ALIASES)}"
                )
            kind, width, st, count = mt.groups()
            if count is not None and int(count) < 1:
                raise SpecError(f"repeat count must be >= 1 in {part.strip()!r}")
            seg = SegmentSpec(Arch(kind.lower()), int(width), Style(st.lower()) if st else Style.DECOMPOSED)
            segs.extend([seg] * int(count or 1))
        spec = AdderSpec(name or key.replace(" ", ""), tuple(segs))
    if style is not None:
        spec = spec.with_style(style)
    return spec


def format_spec(spec: AdderSpec) -> str:
    """Compact LSB-first text form, inverse of ``parse_spec`` for custom specs."""
    out: list[str] = []
    segs = list(spec.segments)
    i = 0
    while i < len(segs):
        j = i
        while j < len(segs) and segs[j] == segs[i]:
            j += 1
        s = segs[i]
        tok = f"{s.kind.value}:{s.width}"
        if s.kind is not Arch.RCA and s.style is Style.BASIC:
            tok += ":basic"
        if j - i > 1:
            tok += f"*{j - i}"
        out.append(tok)
        i = j
    return ",".join(out)
