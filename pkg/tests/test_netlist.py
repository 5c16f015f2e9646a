import json

import pytest

from hybridq.circuit import build_circuit
from hybridq.netlist import (
    NetlistDocument,
    NetlistSyntaxError,
    SchemaViolation,
    UnitSanityWarning,
    load_netlist,
    parse_netlist,
    render,
    schema,
    validate_sweep,
)

MINIMAL = {
    "schema_version": 1,
    "constants": {"eps_r": 11.9},
    "nodes": ["gnd", "a"],
    "components": [
        {"name": "C", "kind": "capacitor", "nodes": ["a", "gnd"], "value": 1e-13},
        {"name": "L", "kind": "inductor", "nodes": ["a", "gnd"], "value": 1e-8},
    ],
}


def text(data):
    return json.dumps(data, indent=2)


def edited(**changes):
    data = json.loads(json.dumps(MINIMAL))
    data.update(changes)
    return data


def test_minimal_document():
    doc = parse_netlist(text(MINIMAL))
    assert len(doc.components) == 2
    assert doc.component("L")["value"] == 1e-8
    with pytest.raises(KeyError):
        doc.component("X")


def test_misspelled_kind_names_the_field():
    data = edited()
    data["components"][0]["kind"] = "capacitr"
    with pytest.raises(SchemaViolation) as exc:
        parse_netlist(text(data))
    assert exc.value.path[:3] == ("components", 0, "kind")
    assert "components/0/kind" in str(exc.value)


def test_missing_value():
    data = edited()
    del data["components"][1]["value"]
    with pytest.raises(SchemaViolation, match="components/1"):
        parse_netlist(text(data))


def test_syntax_error_position():
    bad = text(MINIMAL).replace('"value": 1e-08', '"value": 1e-08,', 1)
    with pytest.raises(NetlistSyntaxError) as exc:
        parse_netlist(bad)
    lines = bad.splitlines()
    assert lines[exc.value.line - 1].strip().startswith("}")
    assert exc.value.column >= 1
    assert str(exc.value).startswith(f"line {exc.value.line}, column {exc.value.column}")


def test_top_level_must_be_object():
    with pytest.raises(SchemaViolation):
        parse_netlist("[1, 2]")


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d["components"][0].update(nodes=["a", "b"]), "components/0/nodes"),
    (lambda d: d["components"].append(dict(d["components"][0])), "components/2/name"),
    (lambda d: d.update(nodes=["a"], components=[]), "nodes"),
    (lambda d: d["components"].append({"name": "K", "kind": "coupler", "nodes": ["a", "gnd", "a", "gnd"],
                                       "geometry": "nope", "length": 1e-3}), "components/2/geometry"),
])
def test_cross_references(mutate, where):
    data = edited()
    mutate(data)
    with pytest.raises(SchemaViolation, match=where):
        parse_netlist(text(data))


def test_unit_sanity_warning():
    data = edited()
    data["components"][0]["value"] = 100.0  # 100 F: fF were meant
    with pytest.warns(UnitSanityWarning, match="components/0/value"):
        parse_netlist(text(data))


def test_round_trip(netlist_dir):
    for path in sorted(netlist_dir.glob("*.json")):
        doc = load_netlist(path)
        again = parse_netlist(render(doc))
        assert again == doc
        assert again.render() == doc.render()


def test_copy_is_deep():
    doc = parse_netlist(text(MINIMAL))
    other = doc.copy()
    other.component("C")["value"] = 2e-13
    assert doc.component("C")["value"] == 1e-13
    assert doc != other and doc != MINIMAL


def test_schema_is_versioned():
    assert "schema_version" in schema()["properties"]


def test_sweep_spec_validation():
    validate_sweep({"target": {"component": "L", "parameter": "value"},
                    "values": [1e-9, 2e-9], "observable": {"kind": "frequency", "mode": "index:0"}})
    with pytest.raises(SchemaViolation):
        validate_sweep({"target": {"component": "L"}, "values": [], "observable": {}})


def test_two_qubit_document(netlist_dir):
    doc = load_netlist(netlist_dir / "multiplexed.json")
    values = {c["name"]: c for c in doc.components}
    # qubit-structure values of the two tables
    assert values["Cq1"]["value"] == pytest.approx(85e-15)
    assert values["J1"]["value"] == pytest.approx(9.2e-9)
    assert values["Cg1"]["value"] == pytest.approx(6e-15)
    assert values["Tr1"]["length"] == pytest.approx(3.8e-3)
    assert values["Tp1"]["length"] == pytest.approx(3.8e-3)
    assert values["Crp1"]["value"] == pytest.approx(12e-15)
    assert values["Cf1"]["value"] == pytest.approx(20e-15)
    assert values["Cq2"]["value"] == pytest.approx(97e-15)
    assert values["J2"]["value"] == pytest.approx(16.3e-9)
    assert values["Cg2"]["value"] == pytest.approx(8e-15)
    assert values["K2"]["length"] == pytest.approx(0.7e-3)
    assert values["Tr2"]["length"] + values["K2"]["length"] == pytest.approx(5.85e-3)
    c = build_circuit(doc)
    assert sorted(j.name for j in c.junctions) == ["J1", "J2"]
    assert len(c.resistors) == 2  # the two feedline terminations
