# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Lamb shift of an ultra-strongly coupled transmon
#
# A transmon (5.13 fF, 9 nH) couples through 40.3 fF to a quarter-wave
# resonator. The resonator's impedance and length are not part of the
# description. With 50 Ohm, a length of 6.41 mm reproduces the quoted qubit
# frequency (8.02 GHz) and anharmonicity (352 MHz), so that is used here.
#
# Because the line is treated exactly, every resonator mode up to the scan
# limit appears, and the Lamb shift can be followed as modes are added.

# %%
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from hybridq import analysis, ScanConfig
from hybridq.circuit import build_circuit
from hybridq.netlist import load_netlist

NETLISTS = next(p for p in (Path("netlists"), Path("../netlists")) if p.is_dir())
doc = load_netlist(NETLISTS / "usc_multimode.json")
c = build_circuit(doc)

# %% [markdown]
# ## Calibrating the resonator length

# %%
for length in (6.2e-3, 6.41e-3, 6.6e-3):
    d = doc.copy()
    d.component("T")["length"] = length
    modes, _, hp = analysis.solve(build_circuit(d), ScanConfig(1e9, 20e9))
    q = [m.label for m in modes].index("junction:J")
    print(f"{length * 1e3:.2f} mm: qubit {modes[q].frequency / 1e9:.4f} GHz, alpha {hp.alpha[q] / 1e6:.1f} MHz")

# %% [markdown]
# ## Lamb shift against mode cutoff

# %%
modes, table, hp = analysis.solve(c, ScanConfig(1e9, 100e9))
q = [m.label for m in modes].index("junction:J")
order = np.argsort(hp.bare_frequencies)
partial = np.cumsum(0.5 * hp.chi[q, order])
plt.plot(hp.bare_frequencies[order] / 1e9, partial / 1e6, "o-")
plt.xlabel("highest mode included [GHz]")
plt.ylabel("Lamb shift [MHz]")
plt.show()

# %%
np.round(partial / 1e6, 1)
