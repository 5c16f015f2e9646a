"""JSON netlist parsing, schema validation and rendering."""
from __future__ import annotations

import copy
import json
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema

SCHEMA_VERSION = 1

# (kind, field) -> (upper bound, unit) for the unit-sanity check
_SANITY = {
    ("capacitor", "value"): (1e-6, "F"),
    ("inductor", "value"): (1e-3, "H"),
    ("junction", "value"): (1e-6, "H"),
    ("resistor", "value"): (1e9, "Ohm"),
    ("tline", "length"): (1.0, "m"),
    ("coupler", "length"): (1.0, "m"),
    ("tline", "width"): (1e-3, "m"),
    ("tline", "gap"): (1e-3, "m"),
}


class NetlistError(ValueError):
    """Malformed netlist text or document."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, msg, line, column):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class SchemaViolation(NetlistError):
    def __init__(self, msg, path):
        where = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"{where}: {msg}")
        self.path = tuple(path)


class UnitSanityWarning(UserWarning):
    """A value is implausibly large for a superconducting circuit; probably
    entered in the wrong unit."""


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("hybridq").joinpath("schema/netlist.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass
class NetlistDocument:
    data: dict

    @property
    def components(self) -> list[dict]:
        return self.data.get("components", [])

    @property
    def analysis(self) -> dict:
        return self.data.get("analysis", {})

    def component(self, name: str) -> dict:
        for c in self.components:
            if c["name"] == name:
                return c
        raise KeyError(name)

    def copy(self) -> "NetlistDocument":
        return NetlistDocument(copy.deepcopy(self.data))

    def render(self) -> str:
        return render(self)

    def __eq__(self, other):
        return isinstance(other, NetlistDocument) and self.data == other.data


def _best_error(errors):
    # prefer the deepest error; for a failed if/then the message names the field
    return max(errors, key=lambda e: (len(e.absolute_path), -len(e.message)))


def validate(data: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema())
    errors = list(validator.iter_errors(data))
    if errors:
        err = _best_error(errors)
        raise SchemaViolation(err.message, list(err.absolute_path))
    # cross references
    nodes = set(data["nodes"])
    ground = data.get("ground", "gnd")
    if ground not in nodes:
        raise SchemaViolation(f"ground node {ground!r} is not in the node list", ["nodes"])
    geos = data.get("cpw_geometries", {})
    names = set()
    for k, comp in enumerate(data["components"]):
        if comp["name"] in names:
            raise SchemaViolation(f"duplicate component name {comp['name']!r}", ["components", k, "name"])
        names.add(comp["name"])
        for t in comp["nodes"]:
            if t not in nodes:
                raise SchemaViolation(f"undeclared node {t!r}", ["components", k, "nodes"])
        if comp["kind"] == "coupler" and comp["geometry"] not in geos:
            raise SchemaViolation(f"unknown cpw geometry {comp['geometry']!r}", ["components", k, "geometry"])
    for gname, g in geos.items():
        if len(g["gap_widths"]) != len(g["line_widths"]) + 1:
            raise SchemaViolation("gap_widths must have one more entry than line_widths", ["cpw_geometries", gname])
    for k, sw in enumerate(data.get("analysis", {}).get("sweeps", [])):
        if sw["target"]["component"] not in names:
            raise SchemaViolation(f"sweep target {sw['target']['component']!r} is not a component",
                                  ["analysis", "sweeps", k, "target", "component"])
    for pname, pair in data.get("analysis", {}).get("ports", {}).items():
        for t in pair:
            if t not in nodes:
                raise SchemaViolation(f"undeclared node {t!r}", ["analysis", "ports", pname])


def validate_sweep(spec: dict) -> None:
    """Schema check of a stand-alone sweep specification."""
    sch = schema()
    validator = jsonschema.Draft202012Validator({**sch["$defs"]["sweep"], "$defs": sch["$defs"]})
    errors = list(validator.iter_errors(spec))
    if errors:
        err = _best_error(errors)
        raise SchemaViolation(err.message, list(err.absolute_path))


def _sanity(data: dict) -> None:
    for k, comp in enumerate(data["components"]):
        for (kind, fld), (limit, unit) in _SANITY.items():
            if comp["kind"] == kind and fld in comp and comp[fld] > limit:
                warnings.warn(
                    f"components/{k}/{fld}: {comp['name']} = {comp[fld]:g} {unit} is implausibly large "
                    "(values are in SI units)",
                    UnitSanityWarning,
                    stacklevel=3,
                )


def parse_netlist(text: str) -> NetlistDocument:
    """Parse and validate JSON netlist text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise SchemaViolation("top level must be an object", [])
    validate(data)
    _sanity(data)
    return NetlistDocument(data)


def load_netlist(path) -> NetlistDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_netlist(fh.read())


def render(doc: NetlistDocument) -> str:
    return json.dumps(doc.data, indent=2) + "\n"
