"""Levelized zero-delay simulation.

Vectors are simulated bit-parallel: each net's values over a whole vector
sequence are packed into one Python integer, bit ``v`` holding the settled
value under vector ``v``. A gate is then a single bitwise operation.
Toggles are counted between consecutive settled states; glitches are not
modeled.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .celllib import CellKind
from .netlist import Netlist

__all__ = [
    "Stimulus",
    "SimTrace",
    "Counterexample",
    "Verdict",
    "AdderShapeError",
    "MAX_EXHAUSTIVE_WIDTH",
    "simulate",
    "evaluate",
    "run_sequence",
    "random_stimulus",
    "exhaustive_stimulus",
    "adder_stimulus",
    "adder_width",
    "verify_adder",
    "dump_vcd",
    "read_vectors",
    "write_vectors",
]

MAX_EXHAUSTIVE_WIDTH = 10


class AdderShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Stimulus:
    """Packed input sequence: ``words[pi]`` bit v is the PI value at vector v."""

    words: Mapping[str, int]
    count: int

    def vector(self, v: int) -> dict[str, int]:
        return {pi: (w >> v) & 1 for pi, w in self.words.items()}


@dataclass
class SimTrace:
    values: dict[str, int]  # packed settled value of every net
    toggles: dict[str, int]
    count: int
    period: float
    primary_outputs: tuple[str, ...]
    time_unit: str = "ns"

    def output_values(self, v: int) -> dict[str, int]:
        return {po: (self.values[po] >> v) & 1 for po in self.primary_outputs}

    @property
    def total_toggles(self) -> int:
        return sum(self.toggles.values())


def _pack(vectors: Sequence[Mapping[str, int]], pis: Sequence[str]) -> Stimulus:
    words = {pi: 0 for pi in pis}
    for v, vec in enumerate(vectors):
        missing = set(pis) - set(vec)
        extra = set(vec) - set(pis)
        if missing or extra:
            raise ValueError(f"vector {v} must assign every primary input exactly once (missing {sorted(missing)}, unknown {sorted(extra)})")
        for pi in pis:
            if vec[pi] & 1:
                words[pi] |= 1 << v
    return Stimulus(words, len(vectors))


def simulate(nl: Netlist, stim: Stimulus) -> dict[str, int]:
    """Packed settled values for every net."""
    mask = (1 << stim.count) - 1
    val = {pi: stim.words[pi] & mask for pi in nl.primary_inputs}
    gates = nl.gates
    for i in nl.topo_order:
        g = gates[i]
        ins = [val[n] for n in g.inputs]
        k = g.cell.kind
        if k is CellKind.AO21:
            r = (ins[0] & ins[1]) | ins[2]
        elif k is CellKind.XOR:
            r = ins[0] ^ ins[1]
        elif k in (CellKind.AND, CellKind.NAND):
            r = ins[0]
            for x in ins[1:]:
                r &= x
            if k is CellKind.NAND:
                r ^= mask
        elif k in (CellKind.OR, CellKind.NOR):
            r = ins[0]
            for x in ins[1:]:
                r |= x
            if k is CellKind.NOR:
                r ^= mask
        elif k is CellKind.XNOR:
            r = ins[0] ^ ins[1] ^ mask
        elif k is CellKind.INV:
            r = ins[0] ^ mask
        else:
            r = ins[0]
        val[g.output] = r
    return val


def evaluate(nl: Netlist, vector: Mapping[str, int]) -> dict[str, int]:
    values = simulate(nl, _pack([vector], nl.primary_inputs))
    return {po: values[po] & 1 for po in nl.primary_outputs}


def _toggles(word: int, count: int) -> int:
    if count < 2:
        return 0
    return ((word ^ (word >> 1)) & ((1 << (count - 1)) - 1)).bit_count()


def run_sequence(
    nl: Netlist,
    vectors: Stimulus | Sequence[Mapping[str, int]],
    period: float,
    time_unit: str | None = None,
) -> SimTrace:
    if not period > 0:
        raise ValueError("period must be > 0")
    stim = vectors if isinstance(vectors, Stimulus) else _pack(vectors, nl.primary_inputs)
    values = simulate(nl, stim)
    toggles = {net: _toggles(w, stim.count) for net, w in values.items()}
    return SimTrace(
        values,
        toggles,
        stim.count,
        float(period),
        nl.primary_outputs,
        time_unit or nl.library.units["time"],
    )


def _from_bit_matrix(bits: np.ndarray, names: Sequence[str]) -> dict[str, int]:
    """Pack columns of a (count, len(names)) 0/1 matrix into per-name ints."""
    words = {}
    for j, name in enumerate(names):
        packed = np.packbits(bits[:, j].astype(np.uint8), bitorder="little")
        words[name] = int.from_bytes(packed.tobytes(), "little")
    return words


def random_stimulus(pis: Sequence[str], count: int, seed: int) -> Stimulus:
    """i.i.d. uniform bits on every primary input, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(count, len(pis)), dtype=np.uint8)
    return Stimulus(_from_bit_matrix(bits, pis), count)


def exhaustive_stimulus(pis: Sequence[str]) -> Stimulus:
    """All 2^k assignments; vector v sets PI j to bit j of v."""
    k = len(pis)
    count = 1 << k
    idx = np.arange(count, dtype=np.uint64)
    bits = np.stack([(idx >> np.uint64(j)) & np.uint64(1) for j in range(k)], axis=1)
    return Stimulus(_from_bit_matrix(bits, pis), count)


def adder_width(nl: Netlist) -> int:
    n = sum(1 for p in nl.primary_inputs if p.startswith("A_"))
    expect_in = {f"A_{i}" for i in range(n)} | {f"B_{i}" for i in range(n)} | {"Cin"}
    expect_out = {f"Sum_{i}" for i in range(n)} | {"Cout"}
    if set(nl.primary_inputs) != expect_in or not expect_out <= set(nl.primary_outputs):
        raise AdderShapeError(f"netlist {nl.name!r} does not have the A_i/B_i/Cin -> Sum_i/Cout port shape")
    return n


def adder_stimulus(width: int, a: Sequence[int], b: Sequence[int], cin: Sequence[int]) -> Stimulus:
    if not len(a) == len(b) == len(cin):
        raise ValueError("operand sequences differ in length")
    words: dict[str, int] = {}
    for i in range(width):
        words[f"A_{i}"] = sum(((x >> i) & 1) << v for v, x in enumerate(a))
        words[f"B_{i}"] = sum(((x >> i) & 1) << v for v, x in enumerate(b))
    words["Cin"] = sum((c & 1) << v for v, c in enumerate(cin))
    return Stimulus(words, len(a))


def _unpack(word: int, count: int, dtype=np.int64) -> np.ndarray:
    raw = word.to_bytes((count + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:count].astype(dtype)


def _operands(words: Mapping[str, int], prefix: str, width: int, count: int, dtype=np.int64) -> np.ndarray:
    """Per-vector integer value of bus ``prefix_0..prefix_{width-1}``."""
    total = np.zeros(count, dtype=dtype)
    for i in range(width):
        total = total + (_unpack(words[f"{prefix}_{i}"], count, dtype) << i)
    return total


@dataclass(frozen=True)
class Counterexample:
    index: int
    a: int
    b: int
    cin: int
    expected_sum: int
    expected_cout: int
    got_sum: int
    got_cout: int

    def __str__(self) -> str:
        return (
            f"vector {self.index}: A=0x{self.a:x} B=0x{self.b:x} Cin={self.cin} -> "
            f"got Sum=0x{self.got_sum:x} Cout={self.got_cout}, "
            f"expected Sum=0x{self.expected_sum:x} Cout={self.expected_cout}"
        )


@dataclass(frozen=True)
class Verdict:
    passed: bool
    vectors: int
    counterexample: Counterexample | None = None

    def __bool__(self) -> bool:
        return self.passed


def verify_adder(nl: Netlist, width: int, mode: str = "exhaustive", count: int = 1000, seed: int | None = None) -> Verdict:
    """Check ``Sum + 2^n Cout == A + B + Cin`` by simulation.

    ``mode`` is ``"exhaustive"`` (n <= 10) or ``"random"`` (needs ``seed``).
    """
    actual = adder_width(nl)
    if actual != width:
        raise AdderShapeError(f"netlist has width {actual}, asked to verify width {width}")
    pis = [f"A_{i}" for i in range(width)] + [f"B_{i}" for i in range(width)] + ["Cin"]
    if mode == "exhaustive":
        if width > MAX_EXHAUSTIVE_WIDTH:
            raise ValueError(
                f"exhaustive verification is capped at width {MAX_EXHAUSTIVE_WIDTH} "
                f"(2^{2 * MAX_EXHAUSTIVE_WIDTH + 1} vectors); use random mode for width {width}"
            )
        stim = exhaustive_stimulus(pis)
    elif mode == "random":
        if seed is None:
            raise ValueError("random verification requires a seed")
        stim = random_stimulus(pis, count, seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    values = simulate(nl, stim)
    n = stim.count
    dt = np.int64 if width <= 61 else object  # object arrays hold arbitrary-width ints
    a = _operands(stim.words, "A", width, n, dt)
    b = _operands(stim.words, "B", width, n, dt)
    c = _unpack(stim.words["Cin"], n, dt)
    expected = a + b + c
    got = _operands(values, "Sum", width, n, dt) + (_unpack(values["Cout"], n, dt) << width)
    bad = np.nonzero(expected != got)[0]
    if len(bad) == 0:
        return Verdict(True, n)
    v = int(bad[0])
    e, g = int(expected[v]), int(got[v])
    mask = (1 << width) - 1
    return Verdict(
        False,
        n,
        Counterexample(v, int(a[v]), int(b[v]), int(c[v]), e & mask, e >> width, g & mask, g >> width),
    )


# ------------------------------------------------------------------ VCD

_TIME_UNITS = ["s", "ms", "us", "ns", "ps", "fs"]


def _timescale(period: float, unit: str) -> tuple[str, int]:
    """Pick a VCD timescale in which ``period`` is an integer tick count."""
    if unit not in _TIME_UNITS:
        raise ValueError(f"unsupported time unit {unit!r} for VCD")
    start = _TIME_UNITS.index(unit)
    for k, u in enumerate(_TIME_UNITS[start:]):
        ticks = period * 10 ** (3 * k)
        if abs(ticks - round(ticks)) < 1e-9 * max(1.0, ticks):
            return f"1{u}", int(round(ticks))
    raise ValueError(f"period {period}{unit} is not representable at femtosecond resolution")


def _vcd_id(n: int) -> str:
    chars = []
    n += 1
    while n:
        n, r = divmod(n - 1, 94)
        chars.append(chr(33 + r))
    return "".join(chars)


def dump_vcd(trace: SimTrace, nl: Netlist, path: str | Path, module: str | None = None) -> Path:
    """Write the settled-state waveform; one timestamp per vector."""
    path = Path(path)
    scale, step = _timescale(trace.period, trace.time_unit)
    nets = nl.nets
    ids = {net: _vcd_id(k) for k, net in enumerate(nets)}
    out = [
        "$version scbcla logicsim $end",
        f"$timescale {scale} $end",
        f"$scope module {module or nl.name.replace(' ', '_')} $end",
    ]
    out += [f"$var wire 1 {ids[n]} {n} $end" for n in nets]
    out += ["$upscope $end", "$enddefinitions $end"]
    prev: dict[str, int] = {}
    for v in range(trace.count):
        out.append(f"#{v * step}")
        if v == 0:
            out.append("$dumpvars")
        for n in nets:
            bit = (trace.values[n] >> v) & 1
            if prev.get(n) != bit:
                out.append(f"{bit}{ids[n]}")
                prev[n] = bit
        if v == 0:
            out.append("$end")
    path.write_text("\n".join(out) + "\n", encoding="ascii")
    return path


# ------------------------------------------------------------ vector files


def read_vectors(path: str | Path, width: int) -> Stimulus:
    """Parse ``A=<hex> B=<hex> Cin=<0|1>`` lines into an adder stimulus."""
    a, b, c = [], [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            kv = dict(tok.split("=", 1) for tok in line.split())
            av, bv, cv = int(kv["A"], 16), int(kv["B"], 16), int(kv["Cin"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: expected 'A=<hex> B=<hex> Cin=<0|1>' ({exc})") from None
        if av >> width or bv >> width or cv not in (0, 1):
            raise ValueError(f"{path}:{lineno}: operand out of range for width {width}")
        a.append(av)
        b.append(bv)
        c.append(cv)
    return adder_stimulus(width, a, b, c)


def write_vectors(path: str | Path, width: int, count: int, seed: int) -> Path:
    rng = random.Random(seed)
    digits = max(1, (width + 3) // 4)
    lines = [
        f"A={rng.getrandbits(width):0{digits}x} B={rng.getrandbits(width):0{digits}x} Cin={rng.getrandbits(1)}"
        for _ in range(count)
    ]
    p = Path(path)
    p.write_text("\n".join(lines) + "\n")
    return p
