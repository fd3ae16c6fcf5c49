"""Standard-cell library model.

A library is a set of combinational cells keyed by ``(kind, fanin)``. Each
cell carries a fixed propagation delay, an area, the energy dissipated per
output toggle, and a static leakage power. Units are abstract labels carried
alongside the numbers.

Two modes exist. A *constrained* library refuses any gate wider than
``max_fanin``. An *ideal* library additionally synthesizes AND/OR gates of any
width on demand, extrapolating their figures from the 2-input cell::

    delay(k)         = delay(2) * (1 + 0.2 * (k - 2))
    area(k)          = area(2) * (k - 1)
    switch_energy(k) = switch_energy(2) * (k - 1)
    leakage(k)       = leakage(2) * (k - 1)

Library file format (``#`` starts a comment, blank lines ignored)::

    name=unit
    max_fanin=4
    mode=constrained          # or: ideal
    units_time=ns
    units_area=um2
    units_energy=fJ
    units_power=uW            # optional, defaults to <energy>/<time>
    [cell] kind=AND fanin=3 delay=1.0 area=1.0 switch_energy=1.0 leakage=0.0

Header keys must precede the first ``[cell]`` line. Every ``[cell]`` line
must give all six fields.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

__all__ = [
    "CellKind",
    "Cell",
    "CellLibrary",
    "LibraryError",
    "LibraryParseError",
    "LibraryValidationError",
    "CellNotFoundError",
    "MANDATORY_CELLS",
    "builtin_unit_library",
    "builtin_library",
    "load_library",
    "parse_library",
    "dump_library",
    "lookup",
    "resolve_library",
]


class CellKind(str, enum.Enum):
    INV = "INV"
    BUF = "BUF"
    AND = "AND"
    OR = "OR"
    NAND = "NAND"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    AO21 = "AO21"  # (a & b) | c

    def fanin_range(self, max_fanin: int | None) -> tuple[int, float]:
        """Legal (min, max) input count; ``max_fanin=None`` means unbounded."""
        if self in (CellKind.INV, CellKind.BUF):
            return 1, 1
        if self in (CellKind.XOR, CellKind.XNOR):
            return 2, 2
        if self is CellKind.AO21:
            return 3, 3
        return 2, (math.inf if max_fanin is None else max_fanin)


# Cells every generator in this package relies on.
MANDATORY_CELLS: tuple[tuple[CellKind, int], ...] = (
    (CellKind.XOR, 2),
    (CellKind.AND, 2),
    (CellKind.OR, 2),
    (CellKind.AO21, 3),
    (CellKind.INV, 1),
)

_WIDE_EXTRAPOLABLE = (CellKind.AND, CellKind.OR)
_FIXED_NAMES = {CellKind.INV, CellKind.BUF, CellKind.AO21}


class LibraryError(ValueError):
    """Base class for library loading and validation problems."""


class LibraryParseError(LibraryError):
    pass


class LibraryValidationError(LibraryError):
    pass


class CellNotFoundError(LookupError):
    """Raised when a gate is not available in a library.

    ``missing`` lists every ``(kind, fanin)`` pair that could not be resolved,
    so callers can name the offending wide gates in one message.
    """

    def __init__(self, missing: Iterable[tuple[CellKind, int]], library: str = "", reason: str = ""):
        self.missing = sorted(set(missing), key=lambda kf: (kf[0].value, kf[1]))
        self.library = library
        names = ", ".join(cell_name(k, f) for k, f in self.missing)
        msg = f"cell(s) not available in library {library!r}: {names}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


def cell_name(kind: CellKind, fanin: int) -> str:
    if kind in _FIXED_NAMES:
        return kind.value
    return f"{kind.value}{fanin}"


@dataclass(frozen=True)
class Cell:
    kind: CellKind
    fanin: int
    delay: float
    area: float
    switch_energy: float
    leakage: float = 0.0
    synthesized: bool = field(default=False, compare=False)

    @property
    def name(self) -> str:
        return cell_name(self.kind, self.fanin)

    def evaluate(self, bits: Iterable[int]) -> int:
        """Single-vector evaluation on 0/1 values."""
        v = list(bits)
        k = self.kind
        if k is CellKind.INV:
            return 1 - v[0]
        if k is CellKind.BUF:
            return v[0]
        if k is CellKind.AND:
            return int(all(v))
        if k is CellKind.OR:
            return int(any(v))
        if k is CellKind.NAND:
            return 1 - int(all(v))
        if k is CellKind.NOR:
            return 1 - int(any(v))
        if k is CellKind.XOR:
            return v[0] ^ v[1]
        if k is CellKind.XNOR:
            return 1 - (v[0] ^ v[1])
        return (v[0] & v[1]) | v[2]


class CellLibrary:
    """Immutable collection of cells with a fan-in policy."""

    def __init__(
        self,
        name: str,
        cells: Iterable[Cell],
        max_fanin: int = 4,
        mode: str = "constrained",
        units: Mapping[str, str] | None = None,
    ):
        table: dict[tuple[CellKind, int], Cell] = {}
        for c in cells:
            key = (c.kind, c.fanin)
            if key in table:
                raise LibraryValidationError(f"duplicate cell definition: {c.name}")
            table[key] = c
        self.name = name
        self.max_fanin = int(max_fanin)
        self.mode = mode
        self._cells = MappingProxyType(table)
        u = {"time": "ns", "area": "um2", "energy": "fJ"}
        u.update(units or {})
        u.setdefault("power", f"{u['energy']}/{u['time']}")
        self.units = MappingProxyType(u)
        self.validate()

    @property
    def cells(self) -> Mapping[tuple[CellKind, int], Cell]:
        return self._cells

    @property
    def ideal(self) -> bool:
        return self.mode == "ideal"

    def __repr__(self) -> str:
        return f"CellLibrary(name={self.name!r}, mode={self.mode!r}, max_fanin={self.max_fanin}, cells={len(self._cells)})"

    def __reduce__(self):
        # mapping proxies do not pickle; rebuild from plain data (process pools)
        return (CellLibrary, (self.name, list(self._cells.values()), self.max_fanin, self.mode, dict(self.units)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CellLibrary):
            return NotImplemented
        return (
            self.name == other.name
            and self.max_fanin == other.max_fanin
            and self.mode == other.mode
            and dict(self.units) == dict(other.units)
            and dict(self._cells) == dict(other._cells)
        )

    __hash__ = None  # type: ignore[assignment]

    def validate(self) -> None:
        if self.mode not in ("constrained", "ideal"):
            raise LibraryValidationError(f"unknown mode {self.mode!r}; expected 'constrained' or 'ideal'")
        if self.max_fanin < 2:
            raise LibraryValidationError(f"max_fanin must be >= 2, got {self.max_fanin}")
        limit = self.max_fanin if self.mode == "constrained" else None
        for c in self._cells.values():
            lo, hi = c.kind.fanin_range(limit)
            if not lo <= c.fanin <= hi:
                if limit is not None and c.fanin > limit and c.kind.fanin_range(None)[1] > limit:
                    raise LibraryValidationError(
                        f"{c.name}: fan-in {c.fanin} exceeds max_fanin={self.max_fanin} of a constrained library"
                    )
                raise LibraryValidationError(f"{c.name}: illegal fan-in {c.fanin} for {c.kind.value}")
            if not c.delay > 0:
                raise LibraryValidationError(f"{c.name}: delay must be > 0")
            for attr in ("area", "switch_energy", "leakage"):
                if getattr(c, attr) < 0:
                    raise LibraryValidationError(f"{c.name}: {attr} must be >= 0")
        missing = [cell_name(k, f) for k, f in MANDATORY_CELLS if (k, f) not in self._cells]
        if missing:
            raise LibraryValidationError("library is missing mandatory cell(s): " + ", ".join(missing))

    def has(self, kind: CellKind, fanin: int) -> bool:
        try:
            self.lookup(kind, fanin)
        except CellNotFoundError:
            return False
        return True

    def lookup(self, kind: CellKind, fanin: int) -> Cell:
        kind = CellKind(kind)
        cell = self._cells.get((kind, fanin))
        if cell is not None:
            return cell
        if self.ideal and kind in _WIDE_EXTRAPOLABLE and fanin >= 2:
            return self._extrapolate(kind, fanin)
        reason = ""
        if self.mode == "constrained" and fanin > self.max_fanin:
            reason = f"fan-in {fanin} exceeds max_fanin={self.max_fanin}"
        raise CellNotFoundError([(kind, fanin)], self.name, reason)

    def _extrapolate(self, kind: CellKind, fanin: int) -> Cell:
        base = self._cells[(kind, 2)]
        return Cell(
            kind,
            fanin,
            delay=base.delay * (1 + 0.2 * (fanin - 2)),
            area=base.area * (fanin - 1),
            switch_energy=base.switch_energy * (fanin - 1),
            leakage=base.leakage * (fanin - 1),
            synthesized=True,
        )

    def widest(self, kind: CellKind) -> int:
        """Largest fan-in <= max_fanin for which ``kind`` is available."""
        for k in range(self.max_fanin, 1, -1):
            if (kind, k) in self._cells:
                return k
        raise CellNotFoundError([(kind, 2)], self.name)

    def scaled(self, delay: float = 1.0, area: float = 1.0, energy: float = 1.0, leakage: float = 1.0) -> "CellLibrary":
        """Copy of the library with every cell's figures multiplied."""
        cells = [
            replace(
                c,
                delay=c.delay * delay,
                area=c.area * area,
                switch_energy=c.switch_energy * energy,
                leakage=c.leakage * leakage,
            )
            for c in self._cells.values()
        ]
        return CellLibrary(self.name, cells, self.max_fanin, self.mode, self.units)

    def with_mode(self, mode: str) -> "CellLibrary":
        name = self.name if mode == self.mode else f"{self.name}-{mode}"
        return CellLibrary(name, self._cells.values(), self.max_fanin, mode, self.units)


def lookup(lib: CellLibrary, kind: CellKind, fanin: int) -> Cell:
    return lib.lookup(kind, fanin)


def _unit_cells() -> list[Cell]:
    spec = [
        (CellKind.INV, 1),
        (CellKind.BUF, 1),
        (CellKind.XOR, 2),
        (CellKind.XNOR, 2),
        (CellKind.AO21, 3),
    ]
    for k in (CellKind.AND, CellKind.OR, CellKind.NAND, CellKind.NOR):
        spec += [(k, 2), (k, 3), (k, 4)]
    return [Cell(k, f, delay=1.0, area=1.0, switch_energy=1.0, leakage=0.0) for k, f in spec]


def builtin_unit_library(mode: str = "constrained") -> CellLibrary:
    """Default library: unit delay/area/energy, zero leakage, fan-in <= 4.

    With ``mode="ideal"`` the same cells are returned but wider AND/OR gates
    are synthesized on demand.
    """
    name = "unit" if mode == "constrained" else f"unit-{mode}"
    return CellLibrary(name, _unit_cells(), max_fanin=4, mode=mode)


def builtin_library(name: str) -> CellLibrary:
    """Resolve ``builtin``, ``builtin-ideal`` or a packaged file name such as ``graded``."""
    if name in ("builtin", "unit"):
        return builtin_unit_library()
    if name in ("builtin-ideal", "unit-ideal"):
        return builtin_unit_library("ideal")
    ref = resources.files("scbcla").joinpath("data").joinpath(f"{name}.lib")
    if not ref.is_file():
        raise LibraryError(f"no builtin library named {name!r}")
    return parse_library(ref.read_text(encoding="utf-8"), source=f"<builtin {name}>")


def resolve_library(spec: str | None) -> CellLibrary:
    """A builtin name or a path to a library file."""
    if spec is None or spec in ("builtin", "unit", "builtin-ideal", "unit-ideal"):
        return builtin_library(spec or "builtin")
    p = Path(spec)
    if p.exists():
        return load_library(p)
    return builtin_library(spec)


_HEADER_KEYS = {"name", "max_fanin", "mode", "units_time", "units_area", "units_energy", "units_power"}
_CELL_KEYS = ("kind", "fanin", "delay", "area", "switch_energy", "leakage")


def _parse_pairs(text: str, lineno: int, source: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for tok in text.split():
        if "=" not in tok:
            raise LibraryParseError(f"{source}:{lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if not k or not v:
            raise LibraryParseError(f"{source}:{lineno}: empty key or value in {tok!r}")
        if k in out:
            raise LibraryParseError(f"{source}:{lineno}: repeated key {k!r}")
        out[k] = v
    return out


def parse_library(text: str, source: str = "<string>") -> CellLibrary:
    header: dict[str, str] = {}
    cells: list[Cell] = []
    seen: set[tuple[CellKind, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[cell]"):
            kv = _parse_pairs(line[len("[cell]"):], lineno, source)
            unknown = set(kv) - set(_CELL_KEYS)
            absent = [k for k in _CELL_KEYS if k not in kv]
            if unknown:
                raise LibraryParseError(f"{source}:{lineno}: unknown cell field(s) {sorted(unknown)}")
            if absent:
                raise LibraryParseError(f"{source}:{lineno}: missing cell field(s) {absent}")
            try:
                kind = CellKind(kv["kind"].upper())
            except ValueError:
                raise LibraryParseError(f"{source}:{lineno}: unknown cell kind {kv['kind']!r}") from None
            try:
                cell = Cell(
                    kind,
                    int(kv["fanin"]),
                    float(kv["delay"]),
                    float(kv["area"]),
                    float(kv["switch_energy"]),
                    float(kv["leakage"]),
                )
            except ValueError as exc:
                raise LibraryParseError(f"{source}:{lineno}: bad number ({exc})") from None
            key = (cell.kind, cell.fanin)
            if key in seen:
                raise LibraryValidationError(f"{source}:{lineno}: duplicate cell definition: {cell.name}")
            seen.add(key)
            cells.append(cell)
            continue
        if line.startswith("["):
            raise LibraryParseError(f"{source}:{lineno}: unknown section {line.split()[0]!r}")
        if cells:
            raise LibraryParseError(f"{source}:{lineno}: header key after first [cell] line")
        kv = _parse_pairs(line, lineno, source)
        for k, v in kv.items():
            if k not in _HEADER_KEYS:
                raise LibraryParseError(f"{source}:{lineno}: unknown header key {k!r}")
            if k in header:
                raise LibraryParseError(f"{source}:{lineno}: repeated header key {k!r}")
            header[k] = v

    try:
        max_fanin = int(header.get("max_fanin", "4"))
    except ValueError:
        raise LibraryParseError(f"{source}: max_fanin must be an integer") from None
    units = {k[len("units_"):]: v for k, v in header.items() if k.startswith("units_")}
    return CellLibrary(
        header.get("name", Path(source).stem if not source.startswith("<") else "custom"),
        cells,
        max_fanin=max_fanin,
        mode=header.get("mode", "constrained"),
        units=units,
    )


def load_library(path: str | Path) -> CellLibrary:
    p = Path(path)
    return parse_library(p.read_text(encoding="utf-8"), source=str(p))


def dump_library(lib: CellLibrary) -> str:
    """Serialize to the text format; ``parse_library`` inverts it."""
    lines = [
        f"name={lib.name}",
        f"max_fanin={lib.max_fanin}",
        f"mode={lib.mode}",
    ]
    lines += [f"units_{k}={lib.units[k]}" for k in ("time", "area", "energy", "power")]
    for (kind, fanin), c in sorted(lib.cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
        lines.append(
            f"[cell] kind={kind.value} fanin={fanin} delay={c.delay!r} area={c.area!r} "
            f"switch_energy={c.switch_energy!r} leakage={c.leakage!r}"
        )
    return "\n".join(lines) + "\n"
