"""Admittance stamps and inductive-energy evaluators for circuit elements.

All stamps follow the standard admittance convention: a positive port current
flows into the element. The argument ``z`` is the Laplace variable
``s = -kappa/2 + 1j*omega``; a lossless mode sits on the imaginary axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_EPS_R, CouplerMatrices, effective_permittivity, phase_velocity

LUMPED_KINDS = ("resistor", "capacitor", "inductor", "junction")


class PoleError(ArithmeticError):
    """A distributed element was evaluated exactly on one of its poles."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


@dataclass(frozen=True)
class WaveParameters:
    eps_r: float = DEFAULT_EPS_R

    @property
    def eps_eff(self) -> float:
        return effective_permittivity(self.eps_r)

    @property
    def v(self) -> float:
        return phase_velocity(self.eps_r)

    def k(self, omega: float) -> float:
        return omega / self.v


@dataclass(frozen=True)
class TravelingWaveState:
    V_plus: np.ndarray
    V_minus: np.ndarray
    I_plus: np.ndarray
    I_minus: np.ndarray
    gamma: complex  # z / v

    def current(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        return self.I_plus * np.exp(-self.gamma * x) + self.I_minus * np.exp(self.gamma * x)

    def voltage(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        return self.V_plus * np.exp(-self.gamma * x) + self.V_minus * np.exp(self.gamma * x)


# ---------------------------------------------------------------------------
# lumped elements
# ---------------------------------------------------------------------------

def equivalent_junction(L_total: float, N: int = 1) -> float:
    """Linear stamp inductance of an array of ``N`` identical junctions.

    The array behaves, to linear order, like one inductor of the total
    inductance; ``N`` only enters the nonlinear coefficients.
    """
    if L_total <= 0 or int(N) != N or N < 1:
        raise ValueError("need L_total > 0 and integer N >= 1")
    return float(L_total)


def lumped_admittance(kind: str, value: float, z: complex) -> complex:
    if value <= 0:
        raise ValueError(f"{kind} value must be positive")
    if kind == "capacitor":
        return z * value
    if kind == "resistor":
        return 1.0 / value + 0j
    if kind in ("inductor", "junction"):
        if z == 0:
            raise ZeroDivisionError("inductor admittance is singular at z = 0")
        return 1.0 / (z * value)
    raise ValueError(f"unknown lumped kind {kind!r}")


def lumped_inductive_energy(kind: str, value: float, V_drop: complex, z: complex) -> float:
    """Energy ``L |I|^2 / 2`` with ``I = Y(z) V_drop``; zero for C and R."""
    if kind not in ("inductor", "junction"):
        return 0.0
    current = lumped_admittance(kind, value, z) * V_drop
    return 0.5 * value * abs(current) ** 2


def two_terminal_stamp(y: complex) -> np.ndarray:
    return np.array([[y, -y], [-y, y]], dtype=complex)


# ---------------------------------------------------------------------------
# transmission lines
# ---------------------------------------------------------------------------

def _check_pole(gl: complex) -> tuple[complex, complex]:
    sh, ch = np.sinh(gl), np.cosh(gl)
    if abs(sh) < 1e-12 * math.cosh(abs(gl.real)):
        raise PoleError(f"sinh(z l / v) vanishes (z l / v = {gl})")
    return sh, ch


def tml_admittance(Z0: float, length: float, wave: WaveParameters, z: complex) -> np.ndarray:
    """2x2 admittance of a lossless line, ports ordered (x = 0, x = length)."""
    sh, ch = _check_pole(z * length / wave.v)
    return np.array([[ch, -1.0], [-1.0, ch]], dtype=complex) / (Z0 * sh)


def traveling_waves(Z_char, v: float, length: float, z: complex, V_start, V_end) -> TravelingWaveState:
    """Wave amplitudes of an n-conductor line with prescribed end voltages.

    Solves ``V(0) = V+ + V-`` and ``V(l) = V+ e^{-gl} + V- e^{gl}`` (the
    2n x 2n boundary system decouples into scalar blocks because every
    conductor shares one propagation velocity), then ``I± = ±Z^{-1} V±``.
    """
    Z_char = np.atleast_2d(np.asarray(Z_char, dtype=float))
    V0 = np.atleast_1d(np.asarray(V_start, dtype=complex))
    Vl = np.atleast_1d(np.asarray(V_end, dtype=complex))
    gamma = z / v
    sh, _ = _check_pole(gamma * length)
    Vm = (Vl - np.exp(-gamma * length) * V0) / (2.0 * sh)
    Vp = V0 - Vm
    Yc = np.linalg.inv(Z_char)
    return TravelingWaveState(Vp, Vm, Yc @ Vp, -(Yc @ Vm), gamma)


def _int_exp(s: complex, length: float) -> complex:
    """∫_0^length exp(s x) dx."""
    u = s * length
    if abs(u) < 1e-8:
        return length * (1.0 + u / 2.0)
    return length * np.expm1(u) / u


def distributed_energy(state: TravelingWaveState, L_pul, length: float) -> float:
    """Closed form of ``1/2 ∫_0^l I(x)^H L I(x) dx``."""
    L_pul = np.atleast_2d(np.asarray(L_pul, dtype=float))
    g = state.gamma
    amps = ((state.I_plus, -g), (state.I_minus, g))
    total = 0j
    for Ia, sa in amps:
        for Ib, sb in amps:
            total += (Ia.conj() @ L_pul @ Ib) * _int_exp(np.conj(sa) + sb, length)
    return 0.5 * float(total.real)


def tml_inductive_energy(Z0: float, length: float, wave: WaveParameters, z_mode: complex, V_end0: complex, V_end1: complex) -> float:
    state = traveling_waves([[Z0]], wave.v, length, z_mode, [V_end0], [V_end1])
    return distributed_energy(state, [[Z0 / wave.v]], length)


# ---------------------------------------------------------------------------
# multi-line couplers
# ---------------------------------------------------------------------------

def coupler_conductors(mats: CouplerMatrices, grounded_center: bool) -> tuple[int, int]:
    """Indices of the two signal conductors inside the coupler matrices."""
    expected = 3 if grounded_center else 2
    if mats.n != expected:
        raise ValueError(f"grounded_center={grounded_center} requires {expected} conductors, got {mats.n}")
    return 0, mats.n - 1


def _coupler_port_voltages(mats, port_voltages, grounded_center):
    """End-voltage vectors (x = 0 and x = l) over all conductors; a grounded
    centre conductor is held at 0 V at both ends."""
    i1, i2 = coupler_conductors(mats, grounded_center)
    p = np.asarray(port_voltages, dtype=complex)
    V0 = np.zeros(mats.n, dtype=complex)
    Vl = np.zeros(mats.n, dtype=complex)
    V0[i1], Vl[i1], V0[i2], Vl[i2] = p[0], p[1], p[2], p[3]
    return V0, Vl


def coupler_admittance(mats: CouplerMatrices, length: float, z: complex, grounded_center: bool) -> np.ndarray:
    """4x4 admittance, ports ordered (line1 x=0, line1 x=l, line2 x=0, line2 x=l).

    Column ``i`` holds the port currents (into the coupler) when port ``i`` is
    at 1 V and every other port, plus a grounded centre conductor, is at 0 V.
    """
    Y = np.empty((4, 4), dtype=complex)
    for i in range(4):
        e = np.zeros(4)
        e[i] = 1.0
        V0, Vl = _coupler_port_voltages(mats, e, grounded_center)
        st = traveling_waves(mats.Z_char, mats.v, length, z, V0, Vl)
        I0 = st.I_plus + st.I_minus
        Il = st.I_plus * np.exp(-st.gamma * length) + st.I_minus * np.exp(st.gamma * length)
        i1, i2 = coupler_conductors(mats, grounded_center)
        Y[:, i] = [I0[i1], -Il[i1], I0[i2], -Il[i2]]
    return Y


def coupler_inductive_energy(mats: CouplerMatrices, length: float, z_mode: complex, port_voltages, grounded_center: bool) -> float:
    V0, Vl = _coupler_port_voltages(mats, port_voltages, grounded_center)
    st = traveling_waves(mats.Z_char, mats.v, length, z_mode, V0, Vl)
    return distributed_energy(st, mats.L_pul, length)
