"""Energy participation ratios and the dispersive Hamiltonian.

For every mode the inductive energy of each component is evaluated from the
mode's node voltages; the participation of junction array ``i`` in mode ``m``
is the fraction of the mode's inductive energy stored in that array. The
quartic expansion of the junction cosines then gives the cross-Kerr matrix,
the anharmonicities and the Lamb shifts.

:func:`oracle_diagonalize` diagonalises the same quartic Hamiltonian in a
truncated Fock basis and is used to check the perturbative formulas.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .circuit import Circuit
from .modes import Mode

HBAR = constants.hbar
H_PLANCK = constants.h
PHI0_RED = constants.hbar / (2 * constants.e)  # reduced flux quantum [Wb]
TWO_PI = 2.0 * math.pi


class ZeroInductiveEnergy(ArithmeticError):
    """A mode stores (numerically) no inductive energy; usually spurious."""


class CutoffSensitivity(UserWarning):
    """Oracle result moved by more than 0.1% when the Fock cutoff was lowered."""


@dataclass(frozen=True)
class JunctionMeta:
    name: str
    L: float  # total linear inductance [H]
    N: int = 1

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("junction inductance must be positive")

    @property
    def E(self) -> float:
        """(hbar / 2e)^2 / L [J]."""
        return PHI0_RED**2 / self.L

    @classmethod
    def from_component(cls, comp) -> "JunctionMeta":
        return cls(comp.name, comp.value, int(comp.count))


@dataclass
class EprTable:
    p: np.ndarray  # (M, N_JJ)
    inductive_energy_total: np.ndarray  # (M,) [J]
    per_component_energy: list[dict[str, float]]
    junction_names: tuple[str, ...]


@dataclass
class HamiltonianParams:
    chi: np.ndarray  # (M, M) [Hz]
    alpha: np.ndarray  # [Hz]
    lamb_shift: np.ndarray  # [Hz]
    bare_frequencies: np.ndarray  # [Hz]
    dressed_frequencies: np.ndarray  # [Hz]
    phi_zpf: np.ndarray  # (M, N_JJ)


# ---------------------------------------------------------------------------
# participation
# ---------------------------------------------------------------------------

def component_energies(circuit: Circuit, mode: Mode) -> dict[str, float]:
    """Inductive energy [J] of every component for the mode's eigenvector."""
    V = np.asarray(mode.node_voltages)
    return {c.name: circuit.inductive_energy(c, V, mode.s) for c in circuit.components}


def participation(circuit: Circuit, mode: Mode) -> tuple[np.ndarray, float, dict[str, float]]:
    """Participation row of ``mode``: (p over junctions, total energy, per component)."""
    energies = component_energies(circuit, mode)
    total = sum(energies.values())
    scale = float(np.linalg.norm(mode.node_voltages)) ** 2
    if not total > 1e-30 * scale:
        raise ZeroInductiveEnergy(f"mode at {mode.frequency / 1e9:.6f} GHz stores no inductive energy")
    p = np.array([energies[j.name] / total for j in circuit.junctions])
    return p, total, energies


def epr_table(circuit: Circuit, modes) -> EprTable:
    rows, totals, per = [], [], []
    for m in modes:
        p, tot, en = participation(circuit, m)
        rows.append(p)
        totals.append(tot)
        per.append(en)
    nj = len(circuit.junctions)
    P = np.array(rows).reshape(len(rows), nj)
    return EprTable(P, np.array(totals), per, tuple(j.name for j in circuit.junctions))


def zero_point_flux(p_mi: float, omega_m: float, junction: JunctionMeta) -> float:
    """Reduced-flux zero-point amplitude, phi^2 = p hbar omega / (2 E)."""
    if p_mi < 0:
        raise ValueError("participation must be non-negative")
    return math.sqrt(p_mi * HBAR * omega_m / (2.0 * junction.E))


# ---------------------------------------------------------------------------
# dispersive parameters
# ---------------------------------------------------------------------------

def kerr_matrix(modes, epr: EprTable, junctions) -> HamiltonianParams:
    """Cross-Kerr matrix, anharmonicities and Lamb shifts, all in Hz (x/2pi)."""
    omega = np.array([m.omega for m in modes], dtype=float)
    P = np.asarray(epr.p, dtype=float)
    M = len(omega)
    if P.shape != (M, len(junctions)):
        raise ValueError(f"participation matrix has shape {P.shape}, expected {(M, len(junctions))}")
    chi = np.zeros((M, M))
    phi = np.zeros((M, len(junctions)))
    for i, jn in enumerate(junctions):
        w = P[:, i] * omega
        chi += HBAR * np.outer(w, w) / (4.0 * jn.E * jn.N**2)
        for m in range(M):
            phi[m, i] = zero_point_flux(max(P[m, i], 0.0), omega[m], jn)
    chi /= TWO_PI
    chi = 0.5 * (chi + chi.T)
    alpha = 0.5 * np.diag(chi).copy()
    lamb = 0.5 * chi.sum(axis=1)
    bare = omega / TWO_PI
    return HamiltonianParams(chi, alpha, lamb, bare, bare - lamb, phi)


def label_modes(epr: EprTable, modes) -> list[str]:
    """``junction:<name>`` when one junction holds more than half the
    inductive energy of the mode, else ``resonator-like``. Labels are also
    stored on the modes."""
    labels = []
    for m, row in zip(modes, np.atleast_2d(epr.p) if len(modes) else []):
        lab = "resonator-like"
        for name, p in zip(epr.junction_names, row):
            if p > 0.5:
                lab = f"junction:{name}"
        m.label = lab
        labels.append(lab)
    return labels


def analyze(circuit: Circuit, modes) -> tuple[EprTable, HamiltonianParams]:
    """Participation table and Hamiltonian parameters for ``modes``."""
    epr = epr_table(circuit, modes)
    junctions = [JunctionMeta.from_component(c) for c in circuit.junctions]
    params = kerr_matrix(modes, epr, junctions)
    label_modes(epr, modes)
    return epr, params


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

@dataclass
class OracleResult:
    transition: np.ndarray  # dressed 0 -> 1 frequency per mode [Hz]
    alpha: np.ndarray  # -(E2 - 2 E1 + E0)/h per mode [Hz]
    chi: np.ndarray  # -(E11 - E10 - E01 + E00)/h [Hz], diagonal = 2 alpha


def _quartic_spectrum(freqs, phi, junctions, cutoff):
    M = len(freqs)
    a1 = np.diag(np.sqrt(np.arange(1, cutoff)), 1)
    eye = np.eye(cutoff)

    def embed(op, k):
        out = np.array([[1.0]])
        for j in range(M):
            out = np.kron(out, op if j == k else eye)
        return out

    n_ops = [embed(a1.T @ a1, k) for k in range(M)]
    x_ops = [embed(a1 + a1.T, k) for k in range(M)]
    H = sum(H_PLANCK * f * n for f, n in zip(freqs, n_ops))
    for i, jn in enumerate(junctions):
        X = sum(phi[m, i] * x_ops[m] for m in range(M))
        X2 = X @ X
        H = H - jn.E / (24.0 * jn.N**2) * (X2 @ X2)
    evals, evecs = np.linalg.eigh(H)

    def level(occ):
        idx = 0
        for o in occ:
            idx = idx * cutoff + o
        return evals[int(np.argmax(np.abs(evecs[idx, :])))]

    return level


def _oracle_once(freqs, phi, junctions, cutoff):
    M = len(freqs)
    level = _quartic_spectrum(freqs, phi, junctions, cutoff)
    E0 = level((0,) * M)
    trans = np.zeros(M)
    alpha = np.zeros(M)
    chi = np.zeros((M, M))
    unit = np.eye(M, dtype=int)
    E1 = [level(tuple(unit[k])) for k in range(M)]
    for k in range(M):
        trans[k] = (E1[k] - E0) / H_PLANCK
        alpha[k] = -(level(tuple(2 * unit[k])) - 2 * E1[k] + E0) / H_PLANCK
        chi[k, k] = 2 * alpha[k]
    for k, l in itertools.combinations(range(M), 2):
        E11 = level(tuple(unit[k] + unit[l]))
        chi[k, l] = chi[l, k] = -(E11 - E1[k] - E1[l] + E0) / H_PLANCK
    return OracleResult(trans, alpha, chi)


def oracle_diagonalize(bare_frequencies, phi_zpf, junctions, fock_cutoff: int = 8) -> OracleResult:
    """Exact spectrum of the quartic Hamiltonian in a truncated Fock basis.

    ``H = sum_m h f_m n_m - sum_i E_i / (24 N_i^2) (sum_m phi_mi (a_m + a_m^+))^4``.
    Test-scale only: at most three modes and a cutoff of twelve.
    """
    freqs = np.asarray(bare_frequencies, dtype=float)
    phi = np.atleast_2d(np.asarray(phi_zpf, dtype=float))
    M = len(freqs)
    if M > 3 or fock_cutoff > 12:
        raise ValueError("oracle limited to M <= 3 modes and fock_cutoff <= 12")
    if fock_cutoff < 5:
        raise ValueError("fock_cutoff must be at least 5")
    res = _oracle_once(freqs, phi, junctions, fock_cutoff)
    low = _oracle_once(freqs, phi, junctions, fock_cutoff - 2)
    for a, b in ((res.transition, low.transition), (res.alpha, low.alpha)):
        if np.any(np.abs(a - b) > 1e-3 * np.maximum(np.abs(a), 1e-30)):
            warnings.warn("oracle result changes by more than 0.1% with the Fock cutoff", CutoffSensitivity, stacklevel=2)
            break
    return res
