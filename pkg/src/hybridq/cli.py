"""Command line entry point: ``analyze modes|response|sweep|cpw``.

Exit codes: 0 success, 1 input error, 2 solver non-convergence (partial
results are still written).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import analysis as an
from .circuit import CircuitError
from .geometry import GeometryError
from .netlist import NetlistError, load_netlist, validate_sweep

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _modes(args) -> int:
    doc = load_netlist(args.netlist)
    cfg = an.scan_config(doc, f_min=args.fmin, f_max=args.fmax, step=args.step)
    rep = an.cmd_modes(doc, cfg)
    _write(an.to_json(rep) if args.json else an.render_modes_text(rep), args.output)
    return EXIT_OK if rep["converged"] else EXIT_SOLVER


def _response(args) -> int:
    doc = load_netlist(args.netlist)
    rep = an.cmd_response(doc, args.ports.split(","), an.parse_fgrid(args.fgrid))
    _write(an.to_json(rep) if args.json else an.rows_to_csv(rep["rows"]), args.output)
    return EXIT_OK


def _sweep(args) -> int:
    doc = load_netlist(args.netlist)
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = json.load(fh)
    else:
        sweeps = doc.analysis.get("sweeps", [])
        if not sweeps:
            raise NetlistError("no --spec given and the netlist declares no sweeps")
        names = [s.get("name") for s in sweeps]
        spec = sweeps[names.index(args.name)] if args.name else sweeps[0]
    validate_sweep(spec)
    cfg = an.scan_config(doc, f_min=args.fmin, f_max=args.fmax, step=args.step)
    rep = an.cmd_sweep(doc, spec, cfg)
    _write(an.to_json(rep) if args.json else an.rows_to_csv(rep["rows"]), args.output)
    return EXIT_OK if rep["converged"] else EXIT_SOLVER


def _cpw(args) -> int:
    geometry = None
    if args.coupler_geometry:
        with open(args.coupler_geometry, encoding="utf-8") as fh:
            geometry = json.load(fh)
    rep = an.cmd_cpw(args.width, args.gap, geometry, args.eps_r)
    _write(an.to_json(rep) if args.json else an.render_cpw_text(rep), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="analyze", description="Eigenmode and dispersive-Hamiltonian analysis of "
                                "circuits mixing lumped elements and CPW lines.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scan=True):
        sp.add_argument("--json", action="store_true", help="machine-readable JSON output")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        if scan:
            sp.add_argument("--fmin", type=float, help="scan start [Hz]")
            sp.add_argument("--fmax", type=float, help="scan stop [Hz]")
            sp.add_argument("--step", type=float, help="scan step [Hz]")

    m = sub.add_parser("modes", help="mode table with linewidths, anharmonicities and cross-Kerr matrix")
    m.add_argument("netlist")
    common(m)
    m.set_defaults(func=_modes)

    r = sub.add_parser("response", help="port impedance matrix over a frequency grid (CSV)")
    r.add_argument("netlist")
    r.add_argument("--ports", required=True, help="comma-separated port names or nodes, e.g. p1,p2")
    r.add_argument("--fgrid", required=True, help="start:stop:num in Hz")
    common(r, scan=False)
    r.set_defaults(func=_response)

    s = sub.add_parser("sweep", help="parameter sweep of a mode observable (CSV)")
    s.add_argument("netlist")
    s.add_argument("--spec", help="JSON sweep specification; default: first sweep in the netlist")
    s.add_argument("--name", help="pick a named sweep declared in the netlist")
    common(s)
    s.set_defaults(func=_sweep)

    c = sub.add_parser("cpw", help="CPW impedance or coupler matrices")
    c.add_argument("--width", type=float, help="centre width [m]")
    c.add_argument("--gap", type=float, help="gap [m]")
    c.add_argument("--coupler-geometry", help="JSON file with line_widths and gap_widths [m]")
    c.add_argument("--eps-r", type=float, default=11.9)
    common(c, scan=False)
    c.set_defaults(func=_cpw)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NetlistError, CircuitError, GeometryError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
