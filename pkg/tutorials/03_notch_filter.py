# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # A compact notch Purcell filter
#
# A quarter-wave readout resonator and a quarter-wave filter resonator share
# a 335 um, 3-line coupler. Both resonators are 5 um / 7.5 um lines (about
# 66 Ohm); the coupler centre line is 5.5 um wide.
#
# Only the outer gaps of the coupler (7.5 um) follow from the line geometry.
# The two inner gaps are not given, so they are treated as a free parameter
# here and chosen so that the transmission zero sits at the qubit frequency.

# %%
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
from scipy import optimize

from hybridq import analysis
from hybridq.circuit import build_circuit
from hybridq.netlist import load_netlist

NETLISTS = next(p for p in (Path("netlists"), Path("../netlists")) if p.is_dir())
doc = load_netlist(NETLISTS / "notch_filter.json")
doc.data["cpw_geometries"]["zc"]

# %% [markdown]
# ## Two-port response
#
# Z12 between the open ends of the two resonators. Its poles are the
# resonances; a zero of Im Z12 is a frequency that cannot pass from one
# port to the other.

# %%
f = np.linspace(6e9, 12e9, 1201)
rep = analysis.cmd_response(doc, ["p1", "p2"], f)
_, z12 = analysis.response_array(rep, "Z12")
plt.semilogy(f / 1e9, np.abs(z12.imag))
plt.xlabel("f [GHz]")
plt.ylabel("|Im Z12| [Ohm]")
plt.show()


# %%
def notch(d, lo=7e9, hi=9e9):
    c = build_circuit(d)
    B = analysis.port_matrix(c, [("p1", "gnd"), ("p2", "gnd")])
    fn = lambda x: analysis.impedance_matrix(c, B, x)[0, 1].imag
    grid = np.linspace(lo, hi, 401)
    v = np.array([fn(x) for x in grid])
    k = np.where(np.sign(v[:-1]) != np.sign(v[1:]))[0]
    roots = [optimize.brentq(fn, grid[i], grid[i + 1]) for i in k]
    return [r for r in roots if abs(fn(r)) < 1e-3]


notch(doc)

# %% [markdown]
# ## Calibrating the inner gaps
#
# The qubit of the full circuit sits near 8.02 GHz. Scanning the inner gap
# shows how the zero moves; 6.21 um puts it on the qubit.

# %%
for g in (5.8e-6, 6.0e-6, 6.21e-6, 6.4e-6):
    d = doc.copy()
    d.data["cpw_geometries"]["zc"]["gap_widths"][1:3] = [g, g]
    print(f"{g * 1e6:.2f} um: notch at {notch(d)[0] / 1e9:.4f} GHz")

# %% [markdown]
# Within 8 to 12 GHz the zero lies below both resonance peaks rather than
# between them; between the peaks |Im Z12| only dips.

# %% [markdown]
# ## Purcell time against junction inductance
#
# The full circuit adds the qubit on port 1 and a 50 Ohm readout line on
# port 2. Detuning the junction inductance by a percent or two moves the
# qubit off the zero, and the Purcell time collapses.

# %%
qdoc = load_netlist(NETLISTS / "notch_filter_qubit.json")
print(analysis.render_modes_text(analysis.cmd_modes(qdoc)))

# %%
rep = analysis.cmd_sweep(qdoc, qdoc.analysis["sweeps"][0])
x, t = analysis.sweep_arrays(rep)
plt.semilogy(x * 100, t, "o-")
plt.xlabel("junction inductance change [%]")
plt.ylabel("Purcell time [s]")
plt.show()

# %%
t.max(), t[0], t[-1]
