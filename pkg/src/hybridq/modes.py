"""Eigenmode search on det Y(z) = 0.

Lossless circuits: the frequency axis is sampled on a uniform grid (plus
points hugging every line pole) and every sign change of a real-valued,
row-normalised determinant is polished with Brent's method; sign changes caused by poles are rejected by
the magnitude of the determinant at the candidate root.

Lossy circuits: the lossless circuit obtained by shorting every (grounded)
resistor supplies seeds ``1j*omega`` for a complex Newton iteration on the
full determinant.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .circuit import Circuit, CircuitError, assemble_admittance, reduce_lossless
from .elements import PoleError
from .numerics import Diverged, IllConditionedKernel, bracketed_root, kernel_basis, newton_complex

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass
class Mode:
    """One eigenmode.

    ``s`` is the root of det Y(s) = 0 in the admittance convention
    ``Y_C = s C``; a decaying mode has ``Re s = -kappa/2``. The reported
    complex frequency is ``z = kappa/2 + 1j*omega``.
    """

    s: complex
    node_voltages: np.ndarray
    label: str | None = None
    residual: float = 0.0
    refined: bool = True

    @property
    def z(self) -> complex:
        return complex(-self.s.real, self.s.imag)

    @property
    def omega(self) -> float:
        return self.s.imag

    @property
    def kappa(self) -> float:
        """Energy decay rate [1/s]."""
        return -2.0 * self.s.real + 0.0

    @property
    def frequency(self) -> float:
        return self.s.imag / TWO_PI

    @property
    def linewidth(self) -> float:
        """kappa / 2 pi [Hz]."""
        return self.kappa / TWO_PI

    @property
    def Q(self) -> float:
        return math.inf if self.kappa <= 0 else self.omega / self.kappa

    def __repr__(self):
        lab = f" {self.label}" if self.label else ""
        return f"<Mode{lab} f={self.frequency / 1e9:.6f} GHz kappa/2pi={self.linewidth:.4g} Hz>"


class ModeList(list):
    """List of modes carrying the solver diagnostics."""

    def __init__(self, modes=(), diagnostics=None):
        super().__init__(modes)
        self.diagnostics: list[str] = list(diagnostics or [])


@dataclass(frozen=True)
class ScanConfig:
    f_min: float = 1e9
    f_max: float = 10e9
    step: float = 1e8
    det_zero_threshold: float = 1e-3
    dedup_tol: float | None = None
    xtol: float = 1e-4  # Hz
    kernel_tol: float = 1e-8

    def __post_init__(self):
        if not 0 < self.f_min < self.f_max:
            raise ValueError("need 0 < f_min < f_max")
        if self.step <= 0:
            raise ValueError("step must be positive")

    @property
    def dedup(self) -> float:
        return self.dedup_tol if self.dedup_tol is not None else self.step * 1e-6

    def grid(self) -> np.ndarray:
        k = int(math.ceil((self.f_max - self.f_min) / self.step - 1e-9))
        f = self.f_min + self.step * np.arange(k + 1)
        f[-1] = min(f[-1], self.f_max) if k > 0 else self.f_max
        return f


# ---------------------------------------------------------------------------
# determinant
# ---------------------------------------------------------------------------

def normalized_det_complex(circuit: Circuit, z: complex) -> complex:
    Y = assemble_admittance(circuit, z)
    return complex(np.linalg.det(Y / circuit.row_scale(z)[:, None]))


def normalized_det(circuit: Circuit, z: complex) -> float:
    """Real scan function for purely imaginary ``z``.

    Each row is divided by a positive, cancellation-free scale (sum of the
    element magnitudes feeding the node; characteristic admittance for lines),
    so zeros stay zeros and line poles stay large. For a lossless circuit the
    determinant is ``j^n`` times a real number; the matching part is returned.
    """
    d = normalized_det_complex(circuit, z)
    return d.real if circuit.size % 2 == 0 else d.imag


def _scan_value(circuit: Circuit, f: float) -> float:
    try:
        return normalized_det(circuit, 1j * TWO_PI * f)
    except PoleError:
        # a grid point sitting exactly on a pole: nudge it
        return normalized_det(circuit, 1j * TWO_PI * f * (1 + 1e-9))


# ---------------------------------------------------------------------------
# lossless scan
# ---------------------------------------------------------------------------

def mode_voltages(circuit: Circuit, z: complex, kernel_tol: float = 1e-8) -> list[np.ndarray]:
    """Unit-norm kernel vector(s) of Y(z); two or more for a degenerate root.

    The kernel is taken of the row-scaled matrix, whose entries are of order
    one, so an exact degeneracy is recognised even though every singular
    value of the raw matrix is then small."""
    Y = assemble_admittance(circuit, z) / circuit.row_scale(z)[:, None]
    B = kernel_basis(Y, rel_tol=kernel_tol, scale=1.0)
    return [B[:, k] for k in range(B.shape[1])]


def _residual(circuit: Circuit, z: complex, V: np.ndarray) -> float:
    """``|D^-1 Y V| / |V|`` with D the positive row scale of the scan.

    Relative to the cancellation-free row magnitudes rather than |Y|, which
    itself vanishes at the root of a one-node circuit.
    """
    Y = assemble_admittance(circuit, z) / circuit.row_scale(z)[:, None]
    return float(np.linalg.norm(Y @ V) / np.linalg.norm(V))


# Relative offset of the extra samples around line poles. Closer than this
# the assembled determinant loses the finite part of the line block to
# cancellation, so sign changes within POLE_GUARD of a pole are not trusted.
POLE_OFFSET = 1e-7
POLE_GUARD = 1e-8


def _scan_grid(circuit: Circuit, cfg: ScanConfig) -> np.ndarray:
    """Base grid plus samples just either side of every line pole, so that a
    root sitting next to a pole is not hidden by the pole's own sign flip."""
    f = cfg.grid()
    poles = circuit.pole_frequencies(cfg.f_min, cfg.f_max)
    extra = np.concatenate([poles * (1 - POLE_OFFSET), poles * (1 + POLE_OFFSET)])
    extra = extra[(extra > cfg.f_min) & (extra < cfg.f_max)]
    return np.unique(np.concatenate([f, extra]))


def _roots_in(circuit, f, vals, cfg, diagnostics):
    # Every sign change over a two-step interval [f_k, f_k+2] also shows up
    # on one of its two halves, so the halves are bracketed directly; this
    # finds the same roots and never discards a close pair.
    roots = []
    fn = lambda x: _scan_value(circuit, x)
    poles = circuit.pole_frequencies(cfg.f_min, cfg.f_max)
    for k in range(len(f) - 1):
        if np.sign(vals[k]) == np.sign(vals[k + 1]) and vals[k] != 0:
            continue
        rep = bracketed_root(fn, f[k], f[k + 1], xtol=cfg.xtol)
        if poles.size and np.min(np.abs(poles - rep.root)) < POLE_GUARD * rep.root:
            diagnostics.append(f"rejected sign change at {rep.root / 1e9:.6f} GHz (line pole)")
        elif abs(fn(rep.root)) < cfg.det_zero_threshold:
            roots.append(rep.root)
        else:
            diagnostics.append(f"rejected sign change at {rep.root / 1e9:.6f} GHz (pole)")
    return roots


def _dedup(roots, tol):
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > tol:
            out.append(r)
    return out


def _touch_roots(circuit, f, vals, cfg, known, diagnostics):
    """Roots where the scan function touches zero without a sign change on the
    grid: close pairs and exact degeneracies."""
    found = []
    a = np.abs(vals)
    for k in range(1, len(f) - 1):
        if not (a[k] < a[k - 1] and a[k] < a[k + 1]):
            continue
        if np.sign(vals[k - 1]) != np.sign(vals[k]) or np.sign(vals[k]) != np.sign(vals[k + 1]):
            continue
        if any(f[k - 1] <= r <= f[k + 1] for r in known):
            continue
        fine = np.linspace(f[k - 1], f[k + 1], 33)
        fv = np.array([_scan_value(circuit, x) for x in fine])
        sub = _roots_in(circuit, fine, fv, cfg, diagnostics)
        if sub:
            found.extend(sub)
            diagnostics.append(f"close root pair resolved near {f[k] / 1e9:.4f} GHz")
            continue
        res = optimize.minimize_scalar(
            lambda x: abs(_scan_value(circuit, x)), bounds=(f[k - 1], f[k + 1]),
            method="bounded", options={"xatol": cfg.xtol},
        )
        if res.fun < 1e-9:
            found.append(res.x)
            diagnostics.append(f"degenerate root at {res.x / 1e9:.6f} GHz")
    return found


def find_modes_lossless(circuit: Circuit, cfg: ScanConfig = ScanConfig()) -> ModeList:
    if circuit.resistors:
        raise ValueError("circuit contains resistors; apply reduce_lossless first")
    diagnostics: list[str] = []
    if circuit.size == 0:
        return ModeList([], ["circuit has no non-ground nodes"])
    f = _scan_grid(circuit, cfg)
    vals = np.array([_scan_value(circuit, x) for x in f])
    roots = _roots_in(circuit, f, vals, cfg, diagnostics)
    roots += _touch_roots(circuit, f, vals, cfg, roots, diagnostics)
    roots = _dedup(roots, cfg.dedup)
    modes = []
    for fr in roots:
        z = 1j * TWO_PI * fr
        for V in mode_voltages(circuit, z, cfg.kernel_tol):
            res = _residual(circuit, z, V)
            if res > 1e-6:
                diagnostics.append(f"mode at {fr / 1e9:.6f} GHz has residual {res:.2e}")
            modes.append(Mode(z, V, residual=res))
    for d in diagnostics:
        log.debug(d)
    return ModeList(modes, diagnostics)


# ---------------------------------------------------------------------------
# lossy refinement
# ---------------------------------------------------------------------------

def _scaled_det(circuit: Circuit, seed: complex):
    inv = 1.0 / circuit.row_scale(seed)

    def f(z):
        return complex(np.linalg.det(assemble_admittance(circuit, z) * inv[:, None]))

    return f


def open_resistors(circuit: Circuit) -> Circuit:
    """Lossless limit R -> infinity: every resistor removed, nodes kept."""
    comps = tuple(c for c in circuit.components if c.kind != "resistor")
    return dataclasses.replace(circuit, components=comps)


def _newton(circuit, z0, ztol):
    f = _scaled_det(circuit, z0)
    z = newton_complex(f, z0, ztol=ztol).root
    # one polishing step below the stopping tolerance
    try:
        z = newton_complex(f, z, ztol=ztol * 1e-3, maxiter=3).root
    except Diverged:
        pass
    return z


def refine_modes_lossy(circuit: Circuit, cfg: ScanConfig = ScanConfig(), ztol: float = TWO_PI * 1.0) -> ModeList:
    """Two-stage lossy search.

    Seeds come from the circuit with every resistor shorted (node deleted).
    Resistors that shunt a resonator node would delete the resonator, so the
    roots of the circuit with every resistor opened are used as extra seeds;
    a failing extra seed is only reported in the diagnostics.
    """
    if not circuit.resistors:
        return find_modes_lossless(circuit, cfg)
    primary = find_modes_lossless(reduce_lossless(circuit), cfg)
    diagnostics = list(primary.diagnostics)
    seeds = [(m.s, True) for m in primary]
    try:
        extra = find_modes_lossless(open_resistors(circuit), cfg)
        seeds += [(m.s, False) for m in extra]
        diagnostics += [f"open-resistor seeds: {d}" for d in extra.diagnostics]
    except CircuitError as exc:
        diagnostics.append(f"open-resistor seeds unavailable: {exc}")

    modes: list[Mode] = []
    done: list[complex] = []
    for z0, is_primary in seeds:
        if any(z0 == d for d in done):
            continue  # degenerate seed already handled through its kernel
        done.append(z0)
        where = f"{z0.imag / TWO_PI / 1e9:.6f} GHz"
        try:
            z = _newton(circuit, z0, ztol)
        except (Diverged, PoleError) as exc:
            last = getattr(getattr(exc, "report", None), "root", None)
            if last is not None and -last.real > abs(last.imag):
                # the iterate ran into the overdamped region (Q < 1/2): the
                # lossless mode does not survive the loss as an oscillation
                diagnostics.append(f"seed at {where} leads to an overdamped root; no mode reported")
                continue
            if not is_primary:
                diagnostics.append(f"open-resistor seed at {where} did not converge ({exc})")
                continue
            diagnostics.append(f"Diverged: Newton from {where} failed ({exc}); reported unrefined")
            warnings.warn(f"Newton refinement from {where} diverged; mode reported unrefined", RuntimeWarning, stacklevel=2)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IllConditionedKernel)
                V = mode_voltages(circuit, z0, cfg.kernel_tol)[0]
            modes.append(Mode(z0, V, residual=_residual(circuit, z0, V), refined=False))
            continue
        if z.real > 0:
            if z.real > 1e-9 * abs(z):
                diagnostics.append(f"negative damping {-2 * z.real:.3g} at {z.imag / TWO_PI / 1e9:.6f} GHz")
            z = complex(0.0, z.imag)
        if not cfg.f_min <= z.imag / TWO_PI <= cfg.f_max:
            diagnostics.append(f"seed {where} converged outside the band ({z.imag / TWO_PI / 1e9:.6f} GHz)")
            continue
        if any(abs(z - m.s) <= TWO_PI * max(cfg.dedup, 1e-7 * abs(z) / TWO_PI) for m in modes if m.refined):
            if is_primary:
                diagnostics.append(f"two seeds converged to {z.imag / TWO_PI / 1e9:.6f} GHz; duplicate dropped")
            continue
        for V in mode_voltages(circuit, z, cfg.kernel_tol):
            modes.append(Mode(z, V, residual=_residual(circuit, z, V)))
    modes.sort(key=lambda m: m.omega)
    return ModeList(modes, diagnostics)


def find_modes(circuit: Circuit, cfg: ScanConfig = ScanConfig()) -> ModeList:
    """Lossless scan or two-stage lossy search, whichever applies."""
    return refine_modes_lossy(circuit, cfg) if circuit.resistors else find_modes_lossless(circuit, cfg)


def step_convergence(circuit: Circuit, cfg: ScanConfig) -> list[str]:
    """Compare mode counts at ``step`` and ``step / 2``."""
    a = find_modes(circuit, cfg)
    b = find_modes(circuit, dataclasses.replace(cfg, step=cfg.step / 2))
    if len(a) != len(b):
        return [f"mode count changes from {len(a)} to {len(b)} when the step is halved"]
    return []
