import math

import numpy as np
import pytest

from conftest import circuit, line, lumped
from hybridq.circuit import (
    CircuitError,
    Component,
    DanglingNode,
    Disconnected,
    DuplicateComponent,
    FloatingResistor,
    InvalidParameter,
    MissingGround,
    assemble_admittance,
    build_circuit,
    reduce_lossless,
)
from hybridq.elements import PoleError
from hybridq.netlist import load_netlist

W5 = 2 * math.pi * 5e9

LC_DOC = {
    "nodes": ["gnd", "n1"],
    "components": [
        {"name": "C", "kind": "capacitor", "nodes": ["gnd", "n1"], "value": 100e-15},
        {"name": "L", "kind": "inductor", "nodes": ["gnd", "n1"], "value": 10e-9},
    ],
}


class TestBuild:
    def test_minimal_lc(self):
        c = build_circuit(LC_DOC)
        assert c.size == 1
        assert c.node_index == {"n1": 0}

    def test_dangling_node(self):
        doc = {**LC_DOC, "components": LC_DOC["components"] + [
            {"name": "X", "kind": "capacitor", "nodes": ["n1", "n9"], "value": 1e-15}]}
        with pytest.raises(DanglingNode, match="n9"):
            build_circuit(doc)

    def test_duplicate(self):
        doc = {**LC_DOC, "components": LC_DOC["components"] * 2}
        with pytest.raises(DuplicateComponent):
            build_circuit(doc)

    def test_non_positive(self):
        with pytest.raises(InvalidParameter):
            lumped("C", "capacitor", "gnd", "a", -1e-15)
        with pytest.raises(InvalidParameter):
            line("T", "a", "gnd", 0.0)

    def test_missing_ground(self):
        with pytest.raises(MissingGround):
            build_circuit({**LC_DOC, "nodes": ["n1"]})

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            circuit(["a", "b"], lumped("C", "capacitor", "a", "gnd", 1e-15))

    def test_node_order_is_insertion_order(self):
        c = circuit(["z", "a", "m"], lumped("C1", "capacitor", "z", "gnd", 1e-15),
                    lumped("C2", "capacitor", "a", "z", 1e-15), lumped("C3", "capacitor", "m", "a", 1e-15))
        assert list(c.node_index) == ["z", "a", "m"]

    def test_purcell_netlist_has_four_nodes(self, netlist_dir):
        c = build_circuit(load_netlist(netlist_dir / "purcell_pole.json"))
        assert c.size == 4

    def test_width_gap_line(self):
        doc = {"nodes": ["gnd", "a"], "components": [
            {"name": "T", "kind": "tline", "nodes": ["a", "gnd"], "width": 15e-6, "gap": 10e-6, "length": 1e-3}]}
        assert build_circuit(doc).component("T").z0 == pytest.approx(51.6, abs=0.1)


class TestAdmittance:
    def test_lc_entry(self):
        c = build_circuit(LC_DOC)
        Y = assemble_admittance(c, 1j * W5)
        assert Y[0, 0] == pytest.approx(1j * W5 * 100e-15 + 1 / (1j * W5 * 10e-9))

    def test_capacitor_stamp_value(self):
        c = circuit(["a"], lumped("C", "capacitor", "a", "gnd", 100e-15))
        assert assemble_admittance(c, 1j * W5)[0, 0] == pytest.approx(3.1416e-3j, rel=1e-4)

    def test_symmetric(self, netlist_dir):
        for name in ("notch_filter_qubit.json", "multiplexed.json", "coupler_feedline.json"):
            c = build_circuit(load_netlist(netlist_dir / name))
            for z in (1j * W5, -2e7 + 1j * 2 * math.pi * 7.7e9):
                Y = assemble_admittance(c, z)
                assert np.allclose(Y, Y.T, rtol=0, atol=1e-12 * np.abs(Y).max())

    def test_pole_is_reported(self):
        c = circuit(["a", "b"], line("T", "a", "b", 6e-3), lumped("C", "capacitor", "a", "gnd", 1e-18),
                    lumped("C2", "capacitor", "b", "gnd", 1e-18))
        f = c.wave.v / (2 * 6e-3)
        with pytest.raises(PoleError):
            assemble_admittance(c, 1j * 2 * math.pi * f)

    def test_pole_frequencies(self):
        c = circuit(["a"], line("T", "a", "gnd", 9.8e-3))
        f = c.pole_frequencies(1e9, 13e9)
        assert np.allclose(f, [c.wave.v / (2 * 9.8e-3), c.wave.v / 9.8e-3])

    def test_row_scale_is_finite_at_poles(self):
        c = circuit(["a"], line("T", "a", "gnd", 9.8e-3))
        f = c.wave.v / (2 * 9.8e-3)
        assert np.all(np.isfinite(c.row_scale(1j * 2 * math.pi * f)))


class TestReduceLossless:
    def test_absorbs_node(self):
        c = circuit(["n1", "n2"], lumped("R", "resistor", "gnd", "n2", 50.0),
                    lumped("C", "capacitor", "gnd", "n2", 1e-15), lumped("Cx", "capacitor", "n1", "n2", 1e-15),
                    lumped("L", "inductor", "n1", "gnd", 1e-9))
        r = reduce_lossless(c)
        assert r.nodes == ("gnd", "n1")
        assert not r.resistors
        assert [x.terminals for x in r.components if x.name == "Cx"] == [("n1", "gnd")]

    def test_identity_without_resistors(self):
        c = build_circuit(LC_DOC)
        assert reduce_lossless(c) is c

    def test_floating_resistor(self):
        c = circuit(["a", "b"], lumped("R", "resistor", "a", "b", 50.0),
                    lumped("L", "inductor", "a", "gnd", 1e-9), lumped("L2", "inductor", "b", "gnd", 1e-9))
        with pytest.raises(FloatingResistor):
            reduce_lossless(c)

    def test_feedline_ends_shorted(self, netlist_dir):
        c = reduce_lossless(build_circuit(load_netlist(netlist_dir / "coupler_feedline.json")))
        assert "f0" not in c.nodes and "f1" not in c.nodes
        assert c.component("K").terminals[2:] == ("gnd", "gnd")


def test_coupler_needs_geometry():
    with pytest.raises(InvalidParameter):
        Component("K", "coupler", ("a", "b", "c", "d"), length=1e-3)


def test_circuit_error_hierarchy():
    assert issubclass(DanglingNode, CircuitError) and issubclass(CircuitError, ValueError)
