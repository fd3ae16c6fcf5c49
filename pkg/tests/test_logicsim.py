import dataclasses
import random
import re

import pytest

from conftest import adder_vector, naive_eval, read_sum
from scbcla import genarch
from scbcla.celllib import CellKind
from scbcla.logicsim import (
    AdderShapeError,
    adder_stimulus,
    dump_vcd,
    evaluate,
    exhaustive_stimulus,
    random_stimulus,
    read_vectors,
    run_sequence,
    simulate,
    verify_adder,
    write_vectors,
)
from scbcla.netlist import GateInstance, NetlistBuilder


def single_gate(lib, kind, n):
    b = NetlistBuilder(lib, kind.value.lower())
    ins = b.add_inputs([f"i{k}" for k in range(n)])
    b.gate(kind, ins, out="y")
    b.add_output("y")
    return b.build()


@pytest.mark.parametrize("vec,want", [((1, 1, 0), 1), ((0, 1, 0), 0), ((0, 0, 1), 1), ((1, 0, 0), 0)])
def test_ao21(unit_lib, vec, want):
    nl = single_gate(unit_lib, CellKind.AO21, 3)
    assert evaluate(nl, dict(zip(["i0", "i1", "i2"], vec)))["y"] == want


def test_every_cell_against_truth_table(unit_lib):
    import itertools

    from conftest import TRUTH

    for cell in unit_lib.cells.values():
        nl = single_gate(unit_lib, cell.kind, cell.fanin)
        for bits in itertools.product((0, 1), repeat=cell.fanin):
            vec = {f"i{k}": b for k, b in enumerate(bits)}
            assert evaluate(nl, vec)["y"] == TRUTH[cell.kind.value](list(bits)), (cell.name, bits)


def test_ccla_five_plus_three(unit_lib):
    nl = genarch.build_ccla_block(4, library=unit_lib)
    assert read_sum(evaluate(nl, adder_vector(4, 0b0101, 0b0011, 0)), 4) == (0b1000, 0)


def test_and2_toggle_count(unit_lib):
    nl = single_gate(unit_lib, CellKind.AND, 2)
    seq = [{"i0": 0, "i1": 0}, {"i0": 1, "i1": 1}, {"i0": 1, "i1": 0}]
    tr = run_sequence(nl, seq, period=1.0)
    assert tr.toggles["y"] == 2
    assert tr.toggles["i0"] == 1 and tr.toggles["i1"] == 2


def test_constant_sequence_no_toggles(unit_lib):
    nl = genarch.build_rca(4, unit_lib)
    vec = adder_vector(4, 9, 6, 1)
    tr = run_sequence(nl, [vec] * 50, period=2.0)
    assert tr.total_toggles == 0


def test_single_vector_no_toggles(unit_lib):
    tr = run_sequence(genarch.build_rca(2, unit_lib), [adder_vector(2, 3, 3, 1)], period=1.0)
    assert tr.total_toggles == 0


def test_toggles_match_naive_reference(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("homogeneous-scbcla"), unit_lib)
    stim = random_stimulus(nl.primary_inputs, 1000, seed=1)
    tr = run_sequence(nl, stim, period=5.0)
    states = [naive_eval(nl, stim.vector(v)) for v in range(1000)]
    for net in nl.nets:
        want = sum(states[v][net] != states[v + 1][net] for v in range(999))
        assert tr.toggles[net] == want, net


def test_zero_period_rejected(unit_lib):
    with pytest.raises(ValueError):
        run_sequence(genarch.build_rca(1, unit_lib), [adder_vector(1, 0, 0, 0)], period=0)


def test_exhaustive_rca4(unit_lib):
    v = verify_adder(genarch.build_rca(4, unit_lib), 4)
    assert v.passed and v.vectors == 512


def test_exhaustive_stimulus_covers_all(unit_lib):
    stim = exhaustive_stimulus(["x", "y", "z"])
    seen = {tuple(stim.vector(v)[n] for n in "xyz") for v in range(stim.count)}
    assert stim.count == 8 and len(seen) == 8


def _swap_ao21_legs(nl, index):
    gates = list(nl.gates)
    g = gates[index]
    a, b, c = g.inputs
    gates[index] = GateInstance(g.cell, (a, c, b), g.output, g.tag)  # (a&c)|b
    return dataclasses.replace(nl, gates=tuple(gates))


def test_mutation_found(unit_lib):
    nl = genarch.build_ccla_block(4, library=unit_lib)
    idx = next(i for i, g in enumerate(nl.gates) if g.kind is CellKind.AO21)
    bad = _swap_ao21_legs(nl, idx)
    v = verify_adder(bad, 4)
    assert not v.passed
    ce = v.counterexample
    assert ce.a + ce.b + ce.cin == ce.expected_sum + (ce.expected_cout << 4)
    assert (ce.got_sum, ce.got_cout) != (ce.expected_sum, ce.expected_cout)
    assert "expected" in str(ce)
    # the counterexample really fails under an independent evaluator
    got = read_sum(naive_eval(bad, adder_vector(4, ce.a, ce.b, ce.cin)), 4)
    assert got == (ce.got_sum, ce.got_cout)


def test_mutation_found_in_32_bit_random(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("hybrid-scbcla-4"), unit_lib)
    idx = next(i for i, g in enumerate(nl.gates) if "sclg.ao21" in g.tag)
    assert not verify_adder(_swap_ao21_legs(nl, idx), 32, "random", count=10_000, seed=3).passed


def test_hybrid_ccla2_random(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("hybrid-ccla-2"), unit_lib)
    v = verify_adder(nl, 32, "random", count=100_000, seed=42)
    assert v.passed and v.vectors == 100_000


def test_random_needs_seed(unit_lib):
    with pytest.raises(ValueError):
        verify_adder(genarch.build_rca(4, unit_lib), 4, "random", count=10)


def test_exhaustive_width_capped(unit_lib):
    with pytest.raises(ValueError, match="capped"):
        verify_adder(genarch.build_rca(11, unit_lib), 11)


def test_shape_error(unit_lib):
    with pytest.raises(AdderShapeError):
        verify_adder(genarch.build_rca(4, unit_lib), 5)


def test_random_stimulus_reproducible():
    a = random_stimulus(["x", "y"], 100, seed=9)
    b = random_stimulus(["x", "y"], 100, seed=9)
    c = random_stimulus(["x", "y"], 100, seed=10)
    assert a.words == b.words and a.words != c.words


def test_simulation_deterministic(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("hybrid-ccla-3"), unit_lib)
    stim = random_stimulus(nl.primary_inputs, 500, seed=4)
    assert run_sequence(nl, stim, 5.0).toggles == run_sequence(nl, stim, 5.0).toggles


def test_gate_order_does_not_matter(unit_lib):
    nl = genarch.build_ccla_block(4, library=unit_lib)
    gates = list(nl.gates)
    random.Random(0).shuffle(gates)
    shuffled = dataclasses.replace(nl, gates=tuple(gates))
    stim = random_stimulus(nl.primary_inputs, 300, seed=2)
    assert simulate(nl, stim) == simulate(shuffled, stim)


# ------------------------------------------------------------------ VCD


def parse_vcd(text):
    """Minimal reader: returns (timescale, {name: [(time, value), ...]})."""
    scale = re.search(r"\$timescale\s+(\S+)\s+\$end", text).group(1)
    ids = {m.group(1): m.group(2) for m in re.finditer(r"\$var wire 1 (\S+) (\S+) \$end", text)}
    body = text.split("$enddefinitions $end", 1)[1]
    changes = {name: [] for name in ids.values()}
    t = None
    for tok in body.split():
        if tok.startswith("#"):
            t = int(tok[1:])
        elif tok in ("$dumpvars", "$end"):
            continue
        else:
            changes[ids[tok[1:]]].append((t, int(tok[0])))
    return scale, changes


def test_vcd_toggles_match_trace(unit_lib, tmp_path):
    nl = genarch.build_ccla_block(4, library=unit_lib)
    tr = run_sequence(nl, random_stimulus(nl.primary_inputs, 200, seed=8), period=5.0)
    text = dump_vcd(tr, nl, tmp_path / "w.vcd").read_text()
    scale, changes = parse_vcd(text)
    assert scale == "1ns"
    assert set(changes) == set(nl.nets)
    for net, ch in changes.items():
        assert ch[0][0] == 0
        assert len(ch) - 1 == tr.toggles[net]
    stamps = re.findall(r"^#(\d+)$", text, re.M)
    assert [int(s) for s in stamps] == [5 * v for v in range(200)]


def test_vcd_constant_trace(unit_lib, tmp_path):
    nl = genarch.build_rca(2, unit_lib)
    tr = run_sequence(nl, [adder_vector(2, 1, 2, 0)] * 4, period=2.5)
    text = dump_vcd(tr, nl, tmp_path / "c.vcd").read_text()
    scale, changes = parse_vcd(text)
    assert scale == "1ps"
    assert re.findall(r"^#(\d+)$", text, re.M) == ["0", "2500", "5000", "7500"]
    assert all(len(ch) == 1 for ch in changes.values())


# --------------------------------------------------------- vector files


def test_vector_file_round_trip(unit_lib, tmp_path):
    p = write_vectors(tmp_path / "v.txt", 8, 50, seed=6)
    stim = read_vectors(p, 8)
    assert stim.count == 50
    nl = genarch.build_adder(genarch.parse_spec("scbcla:4*2"), unit_lib)
    values = simulate(nl, stim)
    for v, line in enumerate(p.read_text().splitlines()):
        kv = dict(t.split("=") for t in line.split())
        a, b, c = int(kv["A"], 16), int(kv["B"], 16), int(kv["Cin"])
        s = sum(((values[f"Sum_{i}"] >> v) & 1) << i for i in range(8))
        assert s + (((values["Cout"] >> v) & 1) << 8) == a + b + c


@pytest.mark.parametrize("line", ["A=1 B=2", "A=zz B=1 Cin=0", "A=100 B=1 Cin=0", "A=1 B=1 Cin=2"])
def test_vector_file_errors(tmp_path, line):
    p = tmp_path / "bad.txt"
    p.write_text(line + "\n")
    with pytest.raises(ValueError):
        read_vectors(p, 8)


def test_adder_stimulus_layout():
    stim = adder_stimulus(2, [1, 2], [3, 0], [0, 1])
    assert stim.vector(0) == adder_vector(2, 1, 3, 0)
    assert stim.vector(1) == adder_vector(2, 2, 0, 1)
