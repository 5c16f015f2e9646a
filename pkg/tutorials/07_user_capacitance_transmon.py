# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # A transmon from an extracted capacitance matrix
#
# Layout tools export the Maxwell capacitance matrix of a transmon's pads.
# This tutorial turns such a matrix into circuit capacitors and couples the
# qubit (L_j = 12.31 nH) to an open 6 mm, 50 Ohm half-wave resonator.
#
# The matrix below is a placeholder of plausible size. Replace it with the
# values from your own extraction.

# %%
import numpy as np

from hybridq import Circuit, Component, ScanConfig, analysis

# Maxwell matrix [fF]: rows/cols are pad1, pad2, coupler pad (ground implied)
names = ["p1", "p2", "cp"]
C_max = np.array([
    [100.0, -30.0, -5.0],
    [-30.0, 95.0, -25.0],
    [-5.0, -25.0, 60.0],
]) * 1e-15

# %% [markdown]
# Mutual capacitors are the negated off-diagonal entries; each row sum is
# the capacitance to ground.

# %%
parts = []
for i in range(3):
    to_gnd = C_max[i].sum()
    if to_gnd > 0:
        parts.append(Component(f"C{names[i]}", "capacitor", (names[i], "gnd"), value=to_gnd))
    for j in range(i + 1, 3):
        parts.append(Component(f"C{names[i]}{names[j]}", "capacitor", (names[i], names[j]), value=-C_max[i, j]))
parts += [
    Component("J", "junction", ("p1", "p2"), value=12.31e-9),
    Component("T", "tline", ("cp", "end"), z0=50.0, length=6e-3),
    Component("Cend", "capacitor", ("end", "gnd"), value=1e-18),
]
c = Circuit(("gnd", "p1", "p2", "cp", "end"), parts)

# %%
rep = analysis.modes_report(c, ScanConfig(2e9, 12e9))
print(analysis.render_modes_text(rep))
