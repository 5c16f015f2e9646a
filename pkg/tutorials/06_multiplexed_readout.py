# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Where to attach a readout resonator to a feedline
#
# A feedline with a 42.7 fF input capacitor and 50 Ohm terminations carries
# a standing-wave pattern. A capacitively coupled resonator (QSTR1, about
# 7.5 GHz, with a Purcell filter) couples best at voltage antinodes, half a
# wavelength from the input. An inductively coupled one (QSTR2, about 5 GHz,
# via a 0.7 mm coupler) couples best at current antinodes, a quarter
# wavelength away.
#
# The resonators' impedance is not given; 50 Ohm is used. The feedline is
# 20 mm long in total.

# %%
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from hybridq import analysis
from hybridq.netlist import load_netlist

NETLISTS = next(p for p in (Path("netlists"), Path("../netlists")) if p.is_dir())

# %% [markdown]
# ## Both structures on one feedline

# %%
print(analysis.render_modes_text(analysis.cmd_modes(load_netlist(NETLISTS / "multiplexed.json"))))

# %% [markdown]
# ## Capacitive tap: sweep of d1

# %%
doc1 = load_netlist(NETLISTS / "multiplexed_qstr1.json")
rep1 = analysis.cmd_sweep(doc1, doc1.analysis["sweeps"][0])
x1, k1 = analysis.sweep_arrays(rep1)

# %% [markdown]
# ## Inductive tap: sweep of d2
#
# The swept feedline section ends at the near edge of the coupler; d2 is
# measured to the coupler centre, half a coupler length further.

# %%
doc2 = load_netlist(NETLISTS / "multiplexed_qstr2.json")
rep2 = analysis.cmd_sweep(doc2, doc2.analysis["sweeps"][0])
x2, k2 = analysis.sweep_arrays(rep2)
x2 = x2 + doc2.component("K2")["length"] / 2

# %%
fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
ax[0].plot(x1 * 1e3, k1 / 1e6)
ax[0].set_xlabel("d1 [mm]")
ax[0].set_ylabel("kappa / 2pi [MHz]")
ax[1].plot(x2 * 1e3, k2 / 1e6)
ax[1].set_xlabel("d2 [mm]")
plt.show()

# %%
x1[np.nanargmax(k1)] * 1e3, x2[np.nanargmax(k2)] * 1e3
