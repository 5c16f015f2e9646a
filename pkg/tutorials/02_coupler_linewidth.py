# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # A quarter-wave resonator tapped by a 3-line coupler
#
# A 3.5 mm, 51.6 Ohm quarter-wave resonator couples inductively to a
# feedline through a section of three parallel CPW lines with a grounded
# centre strip. The resonator line plus the coupler add up to the layout
# length, so lengthening the coupler shortens the plain line.
#
# The coupler is described by its cross-section alone. The per-unit-length
# capacitance matrix comes from a Schwarz-Christoffel map of each line's
# field region; L follows from L C = I / v^2.

# %%
import json
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from hybridq import analysis
from hybridq.geometry import CpwCrossSection, coupler_matrices
from hybridq.netlist import load_netlist

NETLISTS = next(p for p in (Path("netlists"), Path("../netlists")) if p.is_dir())

# %%
geo = json.loads((NETLISTS / "geometries" / "k3.json").read_text())
mats = coupler_matrices(CpwCrossSection(tuple(geo["line_widths"]), tuple(geo["gap_widths"])))
np.set_printoptions(precision=4)
mats.C_pul * 1e12, mats.Z_char  # pF/m and Ohm

# %% [markdown]
# The characteristic impedance matrix shows the three lines are only weakly
# coupled: the grounded centre strip screens the outer two.

# %%
doc = load_netlist(NETLISTS / "coupler_feedline.json")
print(analysis.render_modes_text(analysis.cmd_modes(doc)))

# %% [markdown]
# ## Linewidth against coupler length
#
# The netlist carries the sweep: coupler length from 0.1 to 1 mm with the
# resonator line shortened to keep the total at 3.5 mm.

# %%
rep = analysis.cmd_sweep(doc, doc.analysis["sweeps"][0])
x, kappa = analysis.sweep_arrays(rep)
plt.plot(x * 1e3, kappa / 1e6, "o-")
plt.xlabel("coupler length [mm]")
plt.ylabel("kappa / 2pi [MHz]")
plt.yscale("log")
plt.show()

# %%
bool(np.all(np.diff(kappa) > 0)), kappa[0], kappa[-1]
