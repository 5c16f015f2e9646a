"""Eigenmodes and dispersive Hamiltonians of superconducting circuits that mix
lumped elements with coplanar-waveguide lines and couplers."""
from .circuit import Circuit, Component, PhysicalConstants, assemble_admittance, build_circuit, reduce_lossless
from .epr import HamiltonianParams, JunctionMeta, analyze, kerr_matrix, oracle_diagonalize, participation, zero_point_flux
from .geometry import CpwCrossSection, capacitance_matrix, coupler_matrices, single_line_z0
from .modes import Mode, ScanConfig, find_modes, find_modes_lossless, refine_modes_lossy
from .netlist import NetlistDocument, load_netlist, parse_netlist

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Component", "PhysicalConstants", "assemble_admittance", "build_circuit", "reduce_lossless",
    "HamiltonianParams", "JunctionMeta", "analyze", "kerr_matrix", "oracle_diagonalize", "participation",
    "zero_point_flux", "CpwCrossSection", "capacitance_matrix", "coupler_matrices", "single_line_z0",
    "Mode", "ScanConfig", "find_modes", "find_modes_lossless", "refine_modes_lossy",
    "NetlistDocument", "load_netlist", "parse_netlist",
]
