"""Analysis workflows on netlist documents: mode tables, port responses,
parameter sweeps and CPW geometry queries.

Every ``cmd_*`` function returns a plain report dictionary; the ``render_*``
helpers turn reports into aligned text, JSON or CSV.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import epr as _epr
from .circuit import Circuit, build_circuit
from .elements import PoleError
from .geometry import CpwCrossSection, coupler_matrices, effective_permittivity, phase_velocity, single_line_z0
from .modes import ModeList, ScanConfig, find_modes
from .netlist import NetlistDocument, SchemaViolation

TWO_PI = 2.0 * math.pi
THREADS_ENV = "HYBRIDQ_THREADS"


class ModeLost(LookupError):
    """The tracked mode could not be identified at a sweep point."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def scan_config(doc: NetlistDocument, **overrides) -> ScanConfig:
    opts = dict(doc.analysis.get("scan", {}))
    opts.update({k: v for k, v in overrides.items() if v is not None})
    return ScanConfig(**opts)


def _fmt_q(q: float):
    return "inf" if math.isinf(q) else q


def solve(circuit: Circuit, cfg: ScanConfig) -> tuple[ModeList, object, object]:
    """Modes plus (EPR table, Hamiltonian parameters); the latter two are
    None for circuits without junctions."""
    modes = find_modes(circuit, cfg)
    good = ModeList([m for m in modes if m.refined], modes.diagnostics)
    for m in modes:
        m.label = "resonator-like" if m.refined else "unrefined"
    if not circuit.junctions or not good:
        return modes, None, None
    table, params = _epr.analyze(circuit, good)
    return modes, table, params


def modes_report(circuit: Circuit, cfg: ScanConfig) -> dict:
    modes, table, params = solve(circuit, cfg)
    rows = []
    for k, m in enumerate(modes):
        rows.append({
            "index": k,
            "label": m.label,
            "frequency_hz": m.frequency,
            "linewidth_hz": m.linewidth,
            "Q": _fmt_q(m.Q),
            "refined": m.refined,
        })
    rep = {"modes": rows, "diagnostics": list(modes.diagnostics), "junctions": [j.name for j in circuit.junctions]}
    if params is not None:
        rep["epr_modes"] = [k for k, m in enumerate(modes) if m.refined]
        rep["participation"] = table.p.tolist()
        rep["alpha_hz"] = params.alpha.tolist()
        rep["lamb_shift_hz"] = params.lamb_shift.tolist()
        rep["dressed_frequency_hz"] = params.dressed_frequencies.tolist()
        rep["chi_hz"] = params.chi.tolist()
    rep["converged"] = all(m.refined for m in modes)
    return rep


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------

def cmd_modes(doc: NetlistDocument, scan: ScanConfig | None = None) -> dict:
    circuit = build_circuit(doc)
    return modes_report(circuit, scan or scan_config(doc))


def render_modes_text(rep: dict) -> str:
    out = io.StringIO()
    out.write(f"{'#':>3}  {'label':<18} {'f [GHz]':>12} {'kappa/2pi [MHz]':>16} {'Q':>12}  {'alpha [MHz]':>12}\n")
    alpha = dict(zip(rep.get("epr_modes", []), rep.get("alpha_hz", [])))
    for r in rep["modes"]:
        q = r["Q"]
        qs = "inf" if q == "inf" else f"{q:.4g}"
        a = f"{alpha[r['index']] / 1e6:12.4f}" if r["index"] in alpha else f"{'-':>12}"
        flag = "" if r["refined"] else "  (unrefined)"
        out.write(f"{r['index']:>3}  {r['label'] or '':<18} {r['frequency_hz'] / 1e9:12.6f} "
                  f"{r['linewidth_hz'] / 1e6:16.6g} {qs:>12}  {a}{flag}\n")
    if rep.get("chi_hz"):
        out.write("\ncross-Kerr chi/2pi [MHz]\n")
        for row in rep["chi_hz"]:
            out.write("  " + " ".join(f"{x / 1e6:12.5g}" for x in row) + "\n")
    if rep["diagnostics"]:
        out.write("\ndiagnostics:\n")
        for d in rep["diagnostics"]:
            out.write(f"  {d}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# response
# ---------------------------------------------------------------------------

def port_matrix(circuit: Circuit, ports) -> np.ndarray:
    """Incidence matrix B (nodes x ports) for (plus, minus) node pairs."""
    B = np.zeros((circuit.size, len(ports)))
    for k, (plus, minus) in enumerate(ports):
        for node, sign in ((plus, 1.0), (minus, -1.0)):
            if node == circuit.ground:
                continue
            if node not in circuit.node_index:
                raise KeyError(f"port node {node!r} is not in the circuit")
            B[circuit.node_index[node], k] = sign
    return B


def impedance_matrix(circuit: Circuit, B: np.ndarray, f: float, rcond: float = 1e-13):
    """Port impedance ``B^T Y^-1 B`` at ``z = j 2 pi f``; None when Y is
    singular (an undamped internal resonance or a line pole)."""
    from .circuit import assemble_admittance

    try:
        Y = assemble_admittance(circuit, 1j * TWO_PI * f)
    except PoleError:
        return None
    D = circuit.row_scale(1j * TWO_PI * f)
    Yn = Y / D[:, None]
    if np.linalg.cond(Yn) > 1.0 / rcond:
        return None
    return B.T @ np.linalg.solve(Yn, B / D[:, None])


def parse_fgrid(spec: str | list) -> np.ndarray:
    if isinstance(spec, str):
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    else:
        a, b, n = float(spec[0]), float(spec[1]), int(spec[2])
    if n < 2 or not b > a:
        raise ValueError("frequency grid must be increasing with at least 2 points")
    return np.linspace(a, b, n)


def _resolve_ports(doc, circuit, names):
    declared = doc.analysis.get("ports", {})
    ports = []
    for name in names:
        if name in declared:
            ports.append(tuple(declared[name]))
        elif name in circuit.node_index:
            ports.append((name, circuit.ground))
        else:
            raise SchemaViolation(f"unknown port {name!r}", ["analysis", "ports"])
    return ports


def cmd_response(doc: NetlistDocument, port_pairs, f_grid) -> dict:
    """Z-parameter table over ``f_grid`` for the requested ports.

    ``port_pairs`` is a list of port names (declared under analysis.ports,
    or plain node names meaning node-to-ground). Every (i, j) entry is
    reported; points where the reduction is singular are flagged.
    """
    circuit = build_circuit(doc)
    names = list(port_pairs)
    ports = _resolve_ports(doc, circuit, names)
    B = port_matrix(circuit, ports)
    f_grid = np.asarray(f_grid, dtype=float)
    if np.any(np.diff(f_grid) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    P = len(ports)
    rows = []
    for f in f_grid:
        Z = impedance_matrix(circuit, B, f)
        row = {"frequency_hz": float(f), "singular": Z is None}
        for i in range(P):
            for j in range(P):
                key = f"Z{i + 1}{j + 1}"
                val = complex("nan") if Z is None else complex(Z[i, j])
                row[f"Re_{key}"] = val.real
                row[f"Im_{key}"] = val.imag
        rows.append(row)
    return {"ports": {f"{k + 1}": list(p) for k, p in enumerate(ports)}, "port_names": names, "rows": rows}


def response_array(rep: dict, entry: str = "Z12") -> tuple[np.ndarray, np.ndarray]:
    f = np.array([r["frequency_hz"] for r in rep["rows"]])
    z = np.array([complex(r[f"Re_{entry}"], r[f"Im_{entry}"]) for r in rep["rows"]])
    return f, z


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepSpec:
    target: dict
    values: np.ndarray
    observable: dict
    relative: bool = False
    name: str = "sweep"

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        vals = d["values"]
        if isinstance(vals, dict):
            vals = np.linspace(vals["start"], vals["stop"], vals["num"])
        return cls(d["target"], np.asarray(vals, dtype=float), d["observable"], bool(d.get("relative", False)),
                   d.get("name", "sweep"))


def _set_param(doc: NetlistDocument, component: str, parameter: str, value: float):
    rec = doc.component(component)
    if parameter not in ("value", "z0", "length"):
        raise SchemaViolation(f"parameter {parameter!r} cannot be swept", ["target", "parameter"])
    if parameter == "z0":
        rec.pop("width", None)
        rec.pop("gap", None)
    elif parameter not in rec:
        raise SchemaViolation(f"{component} has no numeric {parameter!r}", ["target", "parameter"])
    rec[parameter] = float(value)


def apply_sweep_value(doc: NetlistDocument, spec: SweepSpec, x: float) -> NetlistDocument:
    """Copy of ``doc`` with the sweep target (and any co-varied parameters)
    set for sweep value ``x``. Co-varied entries take ``offset + scale * v``
    where ``v`` is the target's new value."""
    out = doc.copy()
    t = spec.target
    nominal = doc.component(t["component"]).get(t["parameter"])
    if spec.relative:
        if nominal is None:
            raise SchemaViolation("relative sweep needs a nominal numeric value", ["target", "parameter"])
        v = nominal * (1.0 + x)
    else:
        v = x
    _set_param(out, t["component"], t["parameter"], v)
    for extra in t.get("also", []):
        _set_param(out, extra["component"], extra["parameter"], extra.get("offset", 0.0) + extra.get("scale", 1.0) * v)
    return out


def _point(args):
    doc, spec, x, cfg = args
    try:
        circuit = build_circuit(apply_sweep_value(doc, spec, x))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            modes, _, params = solve(circuit, cfg)
        obs = spec.observable
        extra = None
        if obs["kind"] == "response_extremum":
            extra = _response_extremum(circuit, doc, obs)
        return {
            "ok": True,
            # unrefined modes carry no Hamiltonian data and are not tracked
            "modes": [(m.frequency, m.linewidth, m.label) for m in modes if m.refined],
            "chi": None if params is None else params.chi.tolist(),
            "alpha": None if params is None else params.alpha.tolist(),
            "diagnostics": list(modes.diagnostics),
            "converged": all(m.refined for m in modes),
            "extremum": extra,
        }
    except Exception as exc:  # a single bad point must not abort the sweep
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}"}


def _response_extremum(circuit, doc, obs):
    ports = _resolve_ports(doc, circuit, obs["port_pair"])
    B = port_matrix(circuit, ports)
    f = parse_fgrid(obs["f_grid"])
    vals = []
    for x in f:
        Z = impedance_matrix(circuit, B, x)
        vals.append(np.nan if Z is None else abs(Z[0, 1] if len(ports) > 1 else Z[0, 0]))
    vals = np.array(vals)
    k = int(np.nanargmin(vals))
    return float(f[k])


def _select(modes, selector, previous, chi=None):
    """Index of the mode matching ``selector``.

    Selectors: ``index:<k>``; ``<label>`` or ``<label>#<n>`` (n-th mode with
    that label); ``<label>@<f>`` (nearest to f [Hz]); ``dispersive:<junction>``
    (the resonator-like mode with the largest cross-Kerr to that junction's
    mode, i.e. its readout mode). After the first sweep point the mode is
    followed by nearest frequency among modes with the same label.
    """
    if selector is None:
        selector = "resonator-like"
    if selector.startswith("index:"):
        k = int(selector.split(":", 1)[1])
        if k >= len(modes):
            raise ModeLost(selector)
        return k
    if selector.startswith("dispersive:"):
        label = "resonator-like"
    else:
        label = selector.partition("@")[0].partition("#")[0]
    cand = [k for k, m in enumerate(modes) if m[2] == label]
    if not cand:
        raise ModeLost(selector)
    if previous is None:
        if selector.startswith("dispersive:"):
            qubit = [k for k, m in enumerate(modes) if m[2] == "junction:" + selector.split(":", 1)[1]]
            if not qubit or chi is None:
                raise ModeLost(selector)
            return max(cand, key=lambda k: chi[qubit[0]][k])
        if "@" in selector:
            target = float(selector.split("@", 1)[1])
            return min(cand, key=lambda k: abs(modes[k][0] - target))
        nth = selector.partition("#")[2]
        n = int(nth) if nth else 0
        if n >= len(cand):
            raise ModeLost(selector)
        return cand[n]
    k = min(cand, key=lambda k: abs(modes[k][0] - previous))
    if abs(modes[k][0] - previous) > 0.1 * previous:
        raise ModeLost(f"{selector}: nearest candidate jumped from {previous:.6g} Hz to {modes[k][0]:.6g} Hz")
    return k


def n_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def cmd_sweep(doc: NetlistDocument, spec: SweepSpec | dict, scan: ScanConfig | None = None) -> dict:
    """One row per sweep value; the observed mode is tracked by label and
    nearest frequency. Rows where tracking fails carry ``status = ModeLost``."""
    if isinstance(spec, dict):
        spec = SweepSpec.from_dict(spec)
    cfg = scan or scan_config(doc)
    doc.component(spec.target["component"])  # fail early on a bad target
    args = [(doc, spec, float(x), cfg) for x in spec.values]
    workers = n_workers()
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            points = list(ex.map(_point, args))
    else:
        points = [_point(a) for a in args]

    obs = spec.observable
    rows, prev, prev2 = [], None, None
    for x, pt in zip(spec.values, points):
        row = {"value": float(x), "status": "ok", "observable": math.nan, "frequency_hz": math.nan, "linewidth_hz": math.nan}
        if not pt["ok"]:
            row["status"] = "error"
            row["error"] = pt["error"]
            rows.append(row)
            continue
        if not pt["converged"]:
            row["status"] = "unrefined"
        if obs["kind"] == "response_extremum":
            row["observable"] = pt["extremum"]
            rows.append(row)
            continue
        try:
            k = _select(pt["modes"], obs.get("mode"), prev, pt["chi"])
            f, lw, _ = pt["modes"][k]
            prev = f
            row["frequency_hz"], row["linewidth_hz"] = f, lw
            if obs["kind"] == "frequency":
                row["observable"] = f
            elif obs["kind"] == "linewidth":
                row["observable"] = lw
            elif obs["kind"] == "purcell_time":
                row["observable"] = math.inf if lw <= 0 else 1.0 / (TWO_PI * lw)
            elif obs["kind"] == "alpha":
                if pt["alpha"] is None:
                    raise ModeLost("no junctions: anharmonicity undefined")
                row["observable"] = pt["alpha"][k]
            elif obs["kind"] == "chi":
                k2 = _select(pt["modes"], obs.get("mode2"), prev2, pt["chi"])
                prev2 = pt["modes"][k2][0]
                if pt["chi"] is None:
                    raise ModeLost("no junctions: cross-Kerr undefined")
                row["observable"] = pt["chi"][k][k2]
        except ModeLost as exc:
            row["status"] = "ModeLost"
            row["error"] = str(exc)
        rows.append(row)
    return {"name": spec.name, "target": spec.target, "observable": obs, "rows": rows,
            "converged": all(r["status"] == "ok" for r in rows)}


def sweep_arrays(rep: dict) -> tuple[np.ndarray, np.ndarray]:
    return (np.array([r["value"] for r in rep["rows"]]),
            np.array([r["observable"] if r["status"] in ("ok", "unrefined") else np.nan for r in rep["rows"]], dtype=float))


# ---------------------------------------------------------------------------
# cpw
# ---------------------------------------------------------------------------

def cmd_cpw(width: float | None = None, gap: float | None = None, geometry: dict | None = None,
            eps_r: float = 11.9) -> dict:
    """Single-line impedance (``width``/``gap``) or coupler matrices (``geometry``)."""
    rep = {"eps_r": eps_r, "eps_eff": effective_permittivity(eps_r), "v_m_per_s": phase_velocity(eps_r)}
    if geometry is not None:
        cs = CpwCrossSection(tuple(geometry["line_widths"]), tuple(geometry["gap_widths"]), eps_r)
        mats = coupler_matrices(cs)
        rep.update({
            "line_widths": list(cs.line_widths),
            "gap_widths": list(cs.gap_widths),
            "C_pul_F_per_m": mats.C_pul.tolist(),
            "L_pul_H_per_m": mats.L_pul.tolist(),
            "Z_char_ohm": mats.Z_char.tolist(),
        })
        return rep
    if width is None or gap is None:
        raise ValueError("need width and gap, or a coupler geometry")
    rep.update({"width_m": width, "gap_m": gap, "z0_ohm": single_line_z0(width, gap, eps_r)})
    return rep


def render_cpw_text(rep: dict) -> str:
    lines = [f"eps_r = {rep['eps_r']:g}   eps_eff = {rep['eps_eff']:.4g}   v = {rep['v_m_per_s']:.6g} m/s"]
    if "z0_ohm" in rep:
        lines.append(f"w = {rep['width_m'] * 1e6:g} um   g = {rep['gap_m'] * 1e6:g} um   Z0 = {rep['z0_ohm']:.4f} Ohm")
    else:
        for key, unit, scale in (("C_pul_F_per_m", "pF/m", 1e12), ("L_pul_H_per_m", "nH/m", 1e9), ("Z_char_ohm", "Ohm", 1.0)):
            lines.append(f"{key.split('_')[0]}_{key.split('_')[1]} [{unit}]")
            for row in rep[key]:
                lines.append("  " + " ".join(f"{x * scale:12.5f}" for x in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def to_json(rep: dict) -> str:
    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return "nan" if math.isnan(o) else ("inf" if o > 0 else "-inf")
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(rep), indent=2) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    keys = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
