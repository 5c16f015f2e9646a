"""Reproductions outside the acceptance windows.

The Purcell-pole example quotes a 9.8 mm resonator. With v = c / sqrt(6.45)
the pole condition (readout line a half wavelength at the qubit frequency)
holds near 10.8 mm instead, so the optimum is searched over a wider range
here and the quoted figures are checked there. A 10 um grid is used: at the
exact coincidence of qubit and line pole the qubit root falls inside the
pole guard of the scan and is (by design) rejected.
"""
import numpy as np
import pytest

from hybridq.netlist import load_netlist
from test_acceptance import _purcell_point


@pytest.mark.slow
def test_purcell_optimum(netlist_dir):
    doc = load_netlist(netlist_dir / "purcell_pole.json")
    points = [_purcell_point(doc, x) for x in np.arange(10.3e-3, 11.3e-3, 10e-6)]
    p = min(points, key=lambda r: r["kappa_q"])
    assert 10.5e-3 < p["length"] < 11.1e-3
    assert p["f_q"] == pytest.approx(5.46e9, rel=0.02)
    assert p["alpha"] == pytest.approx(163e6, rel=0.05)
    assert p["f_r"] == pytest.approx(8.08e9, rel=0.02)
    assert p["kappa_r"] == pytest.approx(3.14e6, rel=0.10)
    assert p["chi"] == pytest.approx(2.75e6, rel=0.10)
    assert p["kappa_q"] < 1.0
