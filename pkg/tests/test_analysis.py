import csv
import io
import json
import math

import numpy as np
import pytest

from hybridq import analysis as an
from hybridq.netlist import load_netlist, parse_netlist


def doc_from(components, nodes=("gnd", "a"), **analysis):
    data = {"schema_version": 1, "constants": {"eps_r": 11.9}, "nodes": list(nodes), "components": components}
    if analysis:
        data["analysis"] = analysis
    return parse_netlist(json.dumps(data))


def comp(name, kind, a, b, value):
    return {"name": name, "kind": kind, "nodes": [a, b], "value": value}


LC = [comp("C", "capacitor", "a", "gnd", 100e-15), comp("L", "inductor", "a", "gnd", 10e-9)]
F_LC = 1 / (2 * math.pi * math.sqrt(100e-15 * 10e-9))


class TestModes:
    def test_lossless_q_is_inf(self, netlist_dir):
        rep = an.cmd_modes(load_netlist(netlist_dir / "lc.json"))
        assert len(rep["modes"]) == 1
        assert rep["modes"][0]["Q"] == "inf"
        assert rep["modes"][0]["frequency_hz"] == pytest.approx(F_LC, abs=1e3)
        assert rep["converged"]
        text = an.render_modes_text(rep)
        assert "inf" in text and "5.032921" in text
        assert json.loads(an.to_json(rep))["modes"][0]["Q"] == "inf"

    def test_scan_overrides(self, netlist_dir):
        doc = load_netlist(netlist_dir / "lc.json")
        cfg = an.scan_config(doc, f_min=6e9, f_max=None)
        assert cfg.f_min == 6e9 and cfg.f_max == 10e9
        assert an.cmd_modes(doc, cfg)["modes"] == []

    def test_purcell_report(self, netlist_dir):
        rep = an.cmd_modes(load_netlist(netlist_dir / "purcell_pole.json"))
        labels = [r["label"] for r in rep["modes"]]
        assert labels.count("junction:J") == 1
        chi = np.array(rep["chi_hz"])
        assert np.allclose(chi, chi.T)
        assert rep["alpha_hz"] == pytest.approx(list(np.diag(chi) / 2))
        assert "cross-Kerr" in an.render_modes_text(rep)


class TestResponse:
    def test_resistor_port(self):
        doc = doc_from([comp("R", "resistor", "a", "gnd", 50.0)])
        rep = an.cmd_response(doc, ["a"], an.parse_fgrid("1e9:10e9:7"))
        f, z = an.response_array(rep, "Z11")
        assert np.allclose(z, 50.0, rtol=1e-12, atol=0)

    def test_series_inductor(self):
        doc = doc_from([comp("R", "resistor", "b", "gnd", 1e-3), comp("L", "inductor", "a", "b", 2e-9)],
                       nodes=("gnd", "a", "b"))
        rep = an.cmd_response(doc, ["a"], an.parse_fgrid([1e9, 9e9, 9]))
        f, z = an.response_array(rep, "Z11")
        assert np.allclose(z.imag, 2 * math.pi * f * 2e-9, rtol=1e-12)
        assert np.allclose(np.diff(z.imag, 2), 0, atol=1e-9 * z.imag.max())

    def test_pole_at_mode(self):
        doc = doc_from(LC)
        f_grid = np.linspace(4e9, 6e9, 401)
        rep = an.cmd_response(doc, ["a"], f_grid)
        f, z = an.response_array(rep, "Z11")
        k = int(np.nanargmax(np.abs(z)))
        assert abs(f[k] - F_LC) <= f_grid[1] - f_grid[0]
        # away from the mode the tank is well conditioned
        assert not rep["rows"][0]["singular"]

    def test_singular_point_is_flagged(self):
        doc = doc_from(LC)
        rep = an.cmd_response(doc, ["a"], [F_LC * (1 - 1e-16), F_LC, 6e9])
        assert rep["rows"][-1]["singular"] is False
        flagged = [r for r in rep["rows"] if r["singular"]]
        assert all(math.isnan(r["Re_Z11"]) for r in flagged)

    def test_two_port_symmetric(self, netlist_dir):
        doc = load_netlist(netlist_dir / "notch_filter.json")
        rep = an.cmd_response(doc, ["p1", "p2"], an.parse_fgrid("6e9:12e9:31"))
        _, z12 = an.response_array(rep, "Z12")
        _, z21 = an.response_array(rep, "Z21")
        ok = np.isfinite(z12)
        assert ok.sum() > 25
        assert np.allclose(z12[ok], z21[ok], rtol=1e-9)
        # a lossless network has purely reactive impedance
        assert np.all(np.abs(z12[ok].real) <= 1e-6 * np.abs(z12[ok]))

    def test_bad_grid_and_port(self):
        with pytest.raises(ValueError):
            an.parse_fgrid("5e9:1e9:10")
        with pytest.raises(ValueError):
            an.cmd_response(doc_from(LC), ["a"], [2e9, 1e9])
        with pytest.raises(ValueError):
            an.cmd_response(doc_from(LC), ["zz"], [1e9, 2e9])


class TestSweep:
    def spec(self, values, mode="resonator-like", kind="frequency", **kw):
        return {"target": {"component": "L", "parameter": "value"}, "values": values,
                "observable": {"kind": kind, "mode": mode}, **kw}

    def test_frequency_sweep(self):
        rep = an.cmd_sweep(doc_from(LC), self.spec({"start": 9e-9, "stop": 11e-9, "num": 5}))
        x, y = an.sweep_arrays(rep)
        assert len(rep["rows"]) == 5
        assert np.allclose(y, 1 / (2 * math.pi * np.sqrt(x * 100e-15)), rtol=1e-9)
        assert rep["converged"]

    def test_relative_and_also(self):
        doc = doc_from(LC + [comp("C2", "capacitor", "a", "gnd", 1e-15)])
        spec = self.spec([0.0, 0.1], relative=True)
        spec["target"]["also"] = [{"component": "C2", "parameter": "value", "offset": 1e-15, "scale": 0.0}]
        out = an.apply_sweep_value(doc, an.SweepSpec.from_dict(spec), 0.1)
        assert out.component("L")["value"] == pytest.approx(11e-9)
        assert doc.component("L")["value"] == 10e-9

    def test_mode_lost_rows(self):
        rep = an.cmd_sweep(doc_from(LC), self.spec([10e-9, 40e-9, 10e-9]))
        assert len(rep["rows"]) == 3
        # a 4x inductance halves the frequency: a jump beyond the tracking window
        assert [r["status"] for r in rep["rows"]] == ["ok", "ModeLost", "ok"]
        assert not rep["converged"]

    def test_selector_never_found(self):
        rep = an.cmd_sweep(doc_from(LC), self.spec([9e-9, 10e-9], mode="index:4"))
        assert [r["status"] for r in rep["rows"]] == ["ModeLost"] * 2
        assert np.all(np.isnan(an.sweep_arrays(rep)[1]))

    def test_bad_point_does_not_abort(self):
        rep = an.cmd_sweep(doc_from(LC), self.spec([10e-9, -1e-9, 10e-9]))
        assert [r["status"] for r in rep["rows"]] == ["ok", "error", "ok"]

    def test_selectors(self):
        modes = [(4e9, 0, "junction:J"), (5e9, 0, "resonator-like"), (7e9, 0, "resonator-like")]
        chi = [[0, 1e6, 3e6], [1e6, 0, 0], [3e6, 0, 0]]
        assert an._select(modes, "index:1", None) == 1
        assert an._select(modes, "resonator-like#1", None) == 2
        assert an._select(modes, "resonator-like@5.2e9", None) == 1
        assert an._select(modes, "dispersive:J", None, chi) == 2
        assert an._select(modes, "junction:J", None) == 0
        assert an._select(modes, "resonator-like", 6.8e9) == 2
        with pytest.raises(an.ModeLost):
            an._select(modes, "junction:X", None)

    def test_threads(self, monkeypatch):
        monkeypatch.setenv(an.THREADS_ENV, "bogus")
        assert an.n_workers() == 1
        monkeypatch.setenv(an.THREADS_ENV, "2")
        assert an.n_workers() == 2
        spec = self.spec([9e-9, 10e-9, 11e-9])
        par = an.cmd_sweep(doc_from(LC), spec)
        monkeypatch.setenv(an.THREADS_ENV, "1")
        ser = an.cmd_sweep(doc_from(LC), spec)
        assert par["rows"] == ser["rows"]


class TestOutput:
    def test_csv(self):
        rows = [{"a": 1.0, "b": "x,y"}, {"a": math.nan, "c": 3}]
        text = an.rows_to_csv(rows)
        assert text.count("\r\n") == 3
        parsed = list(csv.DictReader(io.StringIO(text, newline="")))
        assert parsed[0]["b"] == "x,y" and parsed[1]["c"] == "3"
        assert an.rows_to_csv([]) == ""

    def test_json_non_finite(self):
        out = json.loads(an.to_json({"x": [math.inf, -math.inf, math.nan, 1.5]}))
        assert out["x"] == ["inf", "-inf", "nan", 1.5]


class TestCpw:
    def test_single_line(self):
        rep = an.cmd_cpw(15e-6, 10e-6)
        assert rep["z0_ohm"] == pytest.approx(51.6, abs=0.1)
        assert "Z0 = 51.59" in an.render_cpw_text(rep)

    def test_coupler(self, netlist_dir):
        geometry = json.loads((netlist_dir / "geometries" / "k3.json").read_text())
        rep = an.cmd_cpw(geometry=geometry)
        C, L = np.array(rep["C_pul_F_per_m"]), np.array(rep["L_pul_H_per_m"])
        assert np.allclose(L @ C, np.eye(3) / rep["v_m_per_s"] ** 2, rtol=1e-10, atol=1e-10 / rep["v_m_per_s"] ** 2)
        assert "Z_char [Ohm]" in an.render_cpw_text(rep)

    def test_needs_input(self):
        with pytest.raises(ValueError):
            an.cmd_cpw(15e-6)
