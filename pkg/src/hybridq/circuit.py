"""Circuit graph and total admittance assembly."""
from __future__ import annotations

import dataclasses
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import constants

from . import elements as el
from .geometry import DEFAULT_EPS_R, CouplerMatrices, CpwCrossSection, coupler_matrices, single_line_z0

KINDS = ("resistor", "capacitor", "inductor", "junction", "tline", "coupler")
N_TERMINALS = {"resistor": 2, "capacitor": 2, "inductor": 2, "junction": 2, "tline": 2, "coupler": 4}


class CircuitError(ValueError):
    pass


class DanglingNode(CircuitError):
    def __init__(self, node, component=None):
        where = f" (component {component!r})" if component else ""
        super().__init__(f"DanglingNode({node!r}){where}")
        self.node = node


class DuplicateComponent(CircuitError):
    pass


class InvalidParameter(CircuitError):
    pass


class MissingGround(CircuitError):
    pass


class FloatingResistor(CircuitError):
    pass


class Disconnected(CircuitError):
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    eps_r: float = DEFAULT_EPS_R
    c: float = constants.c
    hbar: float = constants.hbar
    e: float = constants.e


@dataclass(frozen=True)
class Component:
    """One element of the netlist.

    ``value`` is R [Ohm], C [F], L [H] or the total linear inductance of a
    junction array [H]. Lines carry ``z0`` and ``length``; couplers carry
    ``geometry`` (a :class:`CpwCrossSection`), ``length`` and
    ``grounded_center``. Coupler terminals are ordered (line1 start,
    line1 end, line2 start, line2 end).
    """

    name: str
    kind: str
    terminals: tuple[str, ...]
    value: float | None = None
    count: int = 1
    z0: float | None = None
    length: float | None = None
    geometry: CpwCrossSection | None = None
    grounded_center: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(self.terminals))
        if self.kind not in KINDS:
            raise InvalidParameter(f"{self.name}: unknown component kind {self.kind!r}")
        if len(self.terminals) != N_TERMINALS[self.kind]:
            raise InvalidParameter(f"{self.name}: {self.kind} needs {N_TERMINALS[self.kind]} terminals")
        if self.kind in el.LUMPED_KINDS:
            _positive(self, "value")
            if self.kind == "junction" and (int(self.count) != self.count or self.count < 1):
                raise InvalidParameter(f"{self.name}: junction count must be an integer >= 1")
        elif self.kind == "tline":
            _positive(self, "z0")
            _positive(self, "length")
        else:
            _positive(self, "length")
            if not isinstance(self.geometry, CpwCrossSection):
                raise InvalidParameter(f"{self.name}: coupler needs a CpwCrossSection geometry")
            need = 3 if self.grounded_center else 2
            if self.geometry.n != need:
                raise InvalidParameter(f"{self.name}: grounded_center={self.grounded_center} needs {need} lines")

    @property
    def stamp_inductance(self) -> float:
        return el.equivalent_junction(self.value, self.count)


def _positive(comp, attr):
    val = getattr(comp, attr)
    if val is None or not np.isfinite(val) or val <= 0:
        raise InvalidParameter(f"{comp.name}: {attr} must be a positive number, got {val!r}")


@lru_cache(maxsize=64)
def _coupler_mats(geometry: CpwCrossSection) -> CouplerMatrices:
    return coupler_matrices(geometry)


@dataclass(frozen=True)
class Circuit:
    nodes: tuple[str, ...]
    components: tuple[Component, ...]
    ground: str = "gnd"
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "components", tuple(self.components))
        self.validate()

    def validate(self):
        if self.nodes.count(self.ground) != 1:
            raise MissingGround(f"ground node {self.ground!r} must appear exactly once in the node list")
        if len(set(self.nodes)) != len(self.nodes):
            raise CircuitError("duplicate node names")
        known = set(self.nodes)
        names = set()
        for comp in self.components:
            if comp.name in names:
                raise DuplicateComponent(f"duplicate component name {comp.name!r}")
            names.add(comp.name)
            for t in comp.terminals:
                if t not in known:
                    raise DanglingNode(t, comp.name)
        # every node must reach ground through some component
        adj = {n: set() for n in self.nodes}
        for comp in self.components:
            for t in comp.terminals:
                adj[t].update(comp.terminals)
        seen, stack = {self.ground}, [self.ground]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        lost = [n for n in self.nodes if n not in seen]
        if lost:
            raise Disconnected(f"nodes not connected to ground: {lost}")

    # -- indexing -----------------------------------------------------------
    @cached_property
    def node_index(self) -> dict[str, int]:
        """Matrix index of every non-ground node, in declaration order."""
        return {n: i for i, n in enumerate(x for x in self.nodes if x != self.ground)}

    @property
    def size(self) -> int:
        return len(self.nodes) - 1

    @property
    def wave(self) -> el.WaveParameters:
        return el.WaveParameters(self.constants.eps_r)

    @property
    def junctions(self) -> list[Component]:
        return [c for c in self.components if c.kind == "junction"]

    @property
    def resistors(self) -> list[Component]:
        return [c for c in self.components if c.kind == "resistor"]

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def indices(self, comp: Component) -> list[int]:
        """Matrix index of each terminal; -1 for ground."""
        idx = self.node_index
        return [idx.get(t, -1) for t in comp.terminals]

    def coupler_matrices(self, comp: Component) -> CouplerMatrices:
        geo = comp.geometry
        if geo.eps_r != self.constants.eps_r:
            geo = dataclasses.replace(geo, eps_r=self.constants.eps_r)
        return _coupler_mats(geo)

    def replace_component(self, name: str, **changes) -> "Circuit":
        comps = tuple(dataclasses.replace(c, **changes) if c.name == name else c for c in self.components)
        if comps == self.components and name not in {c.name for c in self.components}:
            raise KeyError(name)
        return dataclasses.replace(self, components=comps)

    # -- physics --------------------------------------------------------------
    def stamp(self, comp: Component, z: complex) -> np.ndarray:
        if comp.kind in ("resistor", "capacitor", "inductor"):
            return el.two_terminal_stamp(el.lumped_admittance(comp.kind, comp.value, z))
        if comp.kind == "junction":
            return el.two_terminal_stamp(el.lumped_admittance("junction", comp.stamp_inductance, z))
        if comp.kind == "tline":
            return el.tml_admittance(comp.z0, comp.length, self.wave, z)
        return el.coupler_admittance(self.coupler_matrices(comp), comp.length, z, comp.grounded_center)

    def stamp_scale(self, comp: Component, z: complex) -> np.ndarray:
        """Cancellation-free magnitude of each terminal row of a stamp.

        Lumped elements contribute ``|y|``; lines and couplers their
        characteristic admittance, which stays finite at line poles.
        """
        if comp.kind in el.LUMPED_KINDS:
            val = comp.stamp_inductance if comp.kind == "junction" else comp.value
            y = abs(el.lumped_admittance(comp.kind, val, z))
            return np.array([y, y])
        if comp.kind == "tline":
            return np.full(2, 1.0 / comp.z0)
        mats = self.coupler_matrices(comp)
        i1, i2 = el.coupler_conductors(mats, comp.grounded_center)
        rows = np.abs(mats.Y_char).sum(axis=1)
        return np.array([rows[i1], rows[i1], rows[i2], rows[i2]])

    def row_scale(self, z: complex) -> np.ndarray:
        """Positive per-row scale used to normalise det Y(z)."""
        s = np.zeros(self.size)
        for comp in self.components:
            for i, w in zip(self.indices(comp), self.stamp_scale(comp, z)):
                if i >= 0:
                    s[i] += w
        s[s == 0] = 1.0
        return s

    def pole_frequencies(self, f_min: float, f_max: float) -> np.ndarray:
        """Frequencies in [f_min, f_max] where some line stamp is singular."""
        v = self.wave.v
        out = []
        for comp in self.components:
            if comp.kind in ("tline", "coupler"):
                f1 = v / (2.0 * comp.length)
                k = np.arange(max(1, math.ceil(f_min / f1)), math.floor(f_max / f1) + 1)
                out.extend(k * f1)
        return np.unique(np.array(out, dtype=float))

    def inductive_energy(self, comp: Component, V: np.ndarray, z: complex) -> float:
        """Inductive energy stored in ``comp`` for node voltages ``V``."""
        v = np.array([V[i] if i >= 0 else 0.0 for i in self.indices(comp)], dtype=complex)
        if comp.kind in ("resistor", "capacitor"):
            return 0.0
        if comp.kind == "inductor":
            return el.lumped_inductive_energy("inductor", comp.value, v[0] - v[1], z)
        if comp.kind == "junction":
            return el.lumped_inductive_energy("junction", comp.stamp_inductance, v[0] - v[1], z)
        if comp.kind == "tline":
            return el.tml_inductive_energy(comp.z0, comp.length, self.wave, z, v[0], v[1])
        return el.coupler_inductive_energy(self.coupler_matrices(comp), comp.length, z, v, comp.grounded_center)


def assemble_admittance(circuit: Circuit, z: complex) -> np.ndarray:
    """Nodal admittance matrix Y(z) over the non-ground nodes.

    Raises :class:`hybridq.elements.PoleError` when a distributed element is
    evaluated on one of its poles; callers treat it as a pole indicator.
    """
    if z == 0:
        raise ValueError("z = 0 is outside the evaluation domain")
    n = circuit.size
    Y = np.zeros((n, n), dtype=complex)
    for comp in circuit.components:
        S = circuit.stamp(comp, z)
        idx = circuit.indices(comp)
        for a, ia in enumerate(idx):
            if ia < 0:
                continue
            for b, ib in enumerate(idx):
                if ib >= 0:
                    Y[ia, ib] += S[a, b]
    return Y


def reduce_lossless(circuit: Circuit) -> Circuit:
    """Short every resistor to ground, absorbing its off-ground node.

    Every resistor must have a grounded terminal; otherwise
    :class:`FloatingResistor` is raised.
    """
    g = circuit.ground
    merged = set()
    for r in circuit.resistors:
        a, b = r.terminals
        if a != g and b != g:
            raise FloatingResistor(f"resistor {r.name!r} has no grounded terminal")
        merged.add(b if a == g else a)
    merged.discard(g)
    if not circuit.resistors:
        return circuit
    comps = []
    for c in circuit.components:
        if c.kind == "resistor":
            continue
        terms = tuple(g if t in merged else t for t in c.terminals)
        if len(terms) == 2 and terms[0] == terms[1]:
            continue
        comps.append(dataclasses.replace(c, terminals=terms))
    nodes = tuple(n for n in circuit.nodes if n not in merged)
    return dataclasses.replace(circuit, nodes=nodes, components=tuple(comps))


# ---------------------------------------------------------------------------
# netlist document -> circuit
# ---------------------------------------------------------------------------

def build_circuit(document) -> Circuit:
    """Build a validated :class:`Circuit` from a netlist document.

    ``document`` is a :class:`hybridq.netlist.NetlistDocument` or the plain
    mapping obtained from the JSON file.
    """
    doc = getattr(document, "data", document)
    if not isinstance(doc, Mapping):
        raise CircuitError("netlist document must be a mapping")
    consts = doc.get("constants", {})
    eps_r = float(consts.get("eps_r", DEFAULT_EPS_R))
    ground = doc.get("ground", "gnd")
    nodes = list(doc.get("nodes", []))
    if ground not in nodes:
        raise MissingGround(f"ground node {ground!r} is not declared")
    geos = {}
    for gname, g in doc.get("cpw_geometries", {}).items():
        geos[gname] = CpwCrossSection(tuple(g["line_widths"]), tuple(g["gap_widths"]), eps_r)
    comps = []
    for rec in doc.get("components", []):
        comps.append(_component_from_record(rec, geos, eps_r))
    return Circuit(tuple(nodes), tuple(comps), ground, PhysicalConstants(eps_r=eps_r))


def _component_from_record(rec, geos, eps_r) -> Component:
    kind = rec["kind"]
    name = rec["name"]
    terms = tuple(rec["nodes"])
    if kind in el.LUMPED_KINDS:
        return Component(name, kind, terms, value=rec["value"], count=int(rec.get("count", 1)))
    if kind == "tline":
        z0 = rec.get("z0")
        if z0 is None:
            z0 = single_line_z0(rec["width"], rec["gap"], eps_r)
        return Component(name, kind, terms, z0=z0, length=rec["length"])
    if kind == "coupler":
        try:
            geo = geos[rec["geometry"]]
        except KeyError:
            raise CircuitError(f"{name}: unknown cpw geometry {rec['geometry']!r}") from None
        return Component(name, kind, terms, length=rec["length"], geometry=geo,
                         grounded_center=bool(rec.get("grounded_center", False)))
    raise InvalidParameter(f"{name}: unknown component kind {kind!r}")
