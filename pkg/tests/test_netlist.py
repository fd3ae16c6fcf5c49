import json

import pytest

from scbcla import genarch
from scbcla.celllib import CellKind
from scbcla.netlist import (
    GateInstance,
    Netlist,
    NetlistBuilder,
    NetlistError,
    audit_fanin,
    fanin_cone,
    from_json,
    stats,
    to_dot,
    to_json,
    to_verilog,
    validate,
)


def ao21_netlist(lib):
    b = NetlistBuilder(lib, "ao21")
    b.add_inputs(["a", "b", "c"])
    b.gate(CellKind.AO21, ["a", "b", "c"], out="out", tag="single")
    b.add_output("out")
    return b.build()


def test_generated_netlists_validate(unit_lib):
    for spec in genarch.named_specs():
        assert validate(genarch.build_adder(spec, unit_lib)).ok


def test_cycle_detected(unit_lib):
    and2 = unit_lib.lookup(CellKind.AND, 2)
    nl = Netlist("loop", ("a",), ("y",), (GateInstance(and2, ("a", "y"), "y"),), unit_lib)
    assert "cycle" in validate(nl).kinds()


def test_fanin_mismatch_detected(unit_lib):
    and2 = unit_lib.lookup(CellKind.AND, 2)
    nl = Netlist("bad", ("a", "b", "c"), ("y",), (GateInstance(and2, ("a", "b", "c"), "y"),), unit_lib)
    assert validate(nl).kinds() == {"fanin-mismatch"}


def test_undriven_and_multidriven(unit_lib):
    inv = unit_lib.lookup(CellKind.INV, 1)
    gates = (GateInstance(inv, ("a",), "y"), GateInstance(inv, ("ghost",), "y"))
    rep = validate(Netlist("bad", ("a",), ("y", "z"), gates, unit_lib))
    assert {"undriven", "multi-driven", "undriven-output"} <= rep.kinds()


def test_builder_rejects_second_driver(unit_lib):
    b = NetlistBuilder(unit_lib)
    b.add_input("a")
    with pytest.raises(NetlistError):
        b.gate(CellKind.INV, ["a"], out="a")


def test_audit_fanin_decomposed_clean(unit_lib):
    assert audit_fanin(genarch.build_decomposed_clg(4, unit_lib), 4) == []


def test_audit_fanin_basic_clg(ideal_lib):
    bad = audit_fanin(genarch.build_basic_clg(4, ideal_lib), 4)
    assert {g.cell.name for g in bad} == {"AND5", "OR5"}
    or5 = [g for g in bad if g.cell.name == "OR5"]
    assert [g.output for g in or5] == ["C_4"]


def test_audit_fanin_basic_sclg(ideal_lib):
    bad = audit_fanin(genarch.build_basic_sclg(4, ideal_lib), 4)
    assert sorted(g.cell.name for g in bad) == ["AND5", "OR5"]


def test_stats_empty(unit_lib):
    nl = Netlist("wire", ("a",), ("a",), (), unit_lib)
    s = stats(nl)
    assert s.total_gates == 0 and s.total_area == 0 and s.net_count == 1


def test_stats_single_ao21(unit_lib):
    s = stats(ao21_netlist(unit_lib))
    assert s.total_area == 1 and s.gate_count == {"AO21": 1}


def test_stats_homogeneous_ccla_area(unit_lib):
    # per 4-bit block: 4 XOR + 4 AND (P/G), 4 XOR (sums) and a 16-cell
    # decomposed generator (9 AND, 3 OR, 4 AO21) -> 28 cells, 8 blocks
    per_block = 4 + 4 + 4 + (9 + 3 + 4)
    nl = genarch.build_adder(genarch.parse_spec("homogeneous-ccla"), unit_lib)
    assert stats(nl).total_area == 8 * per_block == 224


def test_area_invariant_under_renaming(unit_lib):
    nl = genarch.build_ccla_block(4, library=unit_lib)
    ren = {n: f"x_{n}" for n in nl.nets}
    gates = tuple(GateInstance(g.cell, tuple(ren[i] for i in g.inputs), ren[g.output], g.tag) for g in nl.gates)
    nl2 = Netlist("r", tuple(ren[p] for p in nl.primary_inputs), tuple(ren[p] for p in nl.primary_outputs), gates, unit_lib)
    assert validate(nl2).ok
    assert stats(nl2).total_area == stats(nl).total_area


def test_verilog_ao21(unit_lib):
    v = to_verilog(ao21_netlist(unit_lib))
    assert v.count("AO21 g0 (.a(a), .b(b), .c(c), .out(out));") == 1
    assert "module AO21 (input a, b, c, output out);" in v
    assert "assign out = (a & b) | c;" in v


def test_dot_counts(unit_lib):
    nl = genarch.build_scbcla_block(4, library=unit_lib)
    dot = to_dot(nl)
    gate_nodes = [l for l in dot.splitlines() if l.strip().startswith("g") and "[shape=ellipse" in l]
    assert len(gate_nodes) == len(nl.gates)
    gate_edges = [l for l in dot.splitlines() if "-> g" in l]
    assert len(gate_edges) == sum(len(g.inputs) for g in nl.gates)


def test_json_round_trip_byte_identical(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("hybrid-scbcla-3"), unit_lib)
    text = to_json(nl)
    again = from_json(text)
    assert to_json(again) == text
    assert again == nl
    doc = json.loads(text)
    assert set(doc) == {"name", "library", "pis", "pos", "gates"}
    assert set(doc["gates"][0]) == {"kind", "fanin", "inputs", "output", "tag"}


def test_exports_deterministic(unit_lib):
    a = genarch.build_adder(genarch.parse_spec("hybrid-ccla-4"), unit_lib)
    b = genarch.build_adder(genarch.parse_spec("hybrid-ccla-4"), unit_lib)
    for f in (to_verilog, to_dot, to_json):
        assert f(a) == f(b)


def test_topo_order_respects_dependencies(unit_lib):
    nl = genarch.build_adder(genarch.parse_spec("hybrid-ccla-1"), unit_lib)
    pos = {i: k for k, i in enumerate(nl.topo_order)}
    for i, g in enumerate(nl.gates):
        for n in g.inputs:
            d = nl.driver[n]
            if d >= 0:
                assert pos[d] < pos[i]


def test_fanin_cone(unit_lib):
    nl = genarch.build_rca(2, unit_lib)
    cone = fanin_cone(nl, "Sum_0")
    assert cone == {"Sum_0", "P_0", "A_0", "B_0", "Cin"}
