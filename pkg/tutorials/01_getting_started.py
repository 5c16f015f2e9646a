# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Getting started
#
# A circuit is a list of nodes and components. Lumped elements, junction
# arrays and CPW lines are all stamped into one frequency-dependent nodal
# admittance matrix Y(s); the modes are the zeros of det Y. No LC
# discretization of the lines is needed.

# %%
import math

from pathlib import Path

from hybridq import (Circuit, Component, ScanConfig, analysis, build_circuit, find_modes,
                     load_netlist, single_line_z0)

# %% [markdown]
# ## A parallel LC tank
#
# Values are plain SI numbers: farads, henries, metres, ohms.

# %%
tank = Circuit(("gnd", "a"), [
    Component("C", "capacitor", ("a", "gnd"), value=100e-15),
    Component("L", "inductor", ("a", "gnd"), value=10e-9),
])
modes = find_modes(tank)
modes[0].frequency / 1e9, 1 / (2 * math.pi * math.sqrt(100e-15 * 10e-9)) / 1e9

# %% [markdown]
# ## A half-wave line
#
# An open 6 mm, 50 Ohm line on silicon. The phase velocity follows from
# eps_eff = (eps_r + 1) / 2, so the modes sit at multiples of v / 2l.
# The tiny capacitor only gives the open end a named node.

# %%
line = Circuit(("gnd", "a", "b"), [
    Component("T", "tline", ("a", "b"), z0=50.0, length=6e-3),
    Component("Cp", "capacitor", ("a", "gnd"), value=1e-18),
])
[m.frequency / 1e9 for m in find_modes(line, ScanConfig(1e9, 25e9))], line.wave.v / (2 * 6e-3) / 1e9

# %% [markdown]
# Poles of the line admittance are reported, not mistaken for modes:

# %%
find_modes(line, ScanConfig(1e9, 25e9)).diagnostics

# %% [markdown]
# ## Line impedance from geometry
#
# A 15 um strip with 10 um gaps gives the familiar ~51.6 Ohm. A line can be
# declared by width and gap instead of z0.

# %%
single_line_z0(15e-6, 10e-6), single_line_z0(5e-6, 7.5e-6)

# %% [markdown]
# ## Netlist files and reports
#
# The same circuits can be written as JSON and run through the analysis
# layer, which also produces the command-line reports.

# %%
NETLISTS = next(p for p in (Path("netlists"), Path("../netlists")) if p.is_dir())
doc = load_netlist(NETLISTS / "lc.json")
print(analysis.render_modes_text(analysis.cmd_modes(doc)))

# %%
build_circuit(doc).node_index
