"""Per-unit-length capacitance of coplanar multi-line structures.

Conductors have zero thickness and sit on the interface between vacuum and a
dielectric half-space. Each column of the capacitance matrix is obtained from
a Schwarz-Christoffel map that sends the upper half plane onto a rectangle
whose top side is the driven line and whose bottom side collects every
grounded conductor; the column entries then follow from the parallel-plate
formula.

Coordinate convention (all on the real axis, centred on 0)::

    ground | gap 0 | line 0 | gap 1 | line 1 | ... | line n-1 | gap n | ground
          a[0]    b[0]    a[1]    b[1]                      a[n]    b[n]

Line ``i`` spans ``[b[i], a[i+1]]`` and gap ``i`` is ``(a[i], b[i])``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.constants import c as SPEED_OF_LIGHT, epsilon_0

from .numerics import NumericsError, bracketed_root, elliptic_k, singular_quadrature

DEFAULT_EPS_R = 11.9


class GeometryError(ValueError):
    pass


class NoSignChange(NumericsError):
    pass


class MaxIterations(NumericsError):
    pass


class AsymmetryTooLarge(NumericsError):
    pass


def effective_permittivity(eps_r: float) -> float:
    return 0.5 * (eps_r + 1.0)


def phase_velocity(eps_r: float) -> float:
    return SPEED_OF_LIGHT / math.sqrt(effective_permittivity(eps_r))


@dataclass(frozen=True)
class CpwCrossSection:
    """Widths of ``n`` signal lines and the ``n + 1`` gaps around them [m]."""

    line_widths: tuple[float, ...]
    gap_widths: tuple[float, ...]
    eps_r: float = DEFAULT_EPS_R

    def __post_init__(self):
        object.__setattr__(self, "line_widths", tuple(float(w) for w in self.line_widths))
        object.__setattr__(self, "gap_widths", tuple(float(g) for g in self.gap_widths))
        n = len(self.line_widths)
        if n < 1:
            raise GeometryError("at least one line is required")
        if len(self.gap_widths) != n + 1:
            raise GeometryError(f"{n} lines need {n + 1} gaps, got {len(self.gap_widths)}")
        if min(self.line_widths + self.gap_widths) <= 0:
            raise GeometryError("line and gap widths must be positive")
        if self.eps_r < 1:
            raise GeometryError("eps_r must be >= 1")

    @property
    def n(self) -> int:
        return len(self.line_widths)

    def mirrored(self) -> "CpwCrossSection":
        return CpwCrossSection(self.line_widths[::-1], self.gap_widths[::-1], self.eps_r)

    def scaled(self, factor: float) -> "CpwCrossSection":
        return CpwCrossSection(
            tuple(factor * w for w in self.line_widths),
            tuple(factor * g for g in self.gap_widths),
            self.eps_r,
        )


@dataclass(frozen=True)
class EdgeCoordinates:
    a: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def points(self) -> np.ndarray:
        """All edge abscissas in increasing order: a0, b0, a1, b1, ..."""
        return np.column_stack([self.a, self.b]).ravel()

    @property
    def span(self) -> float:
        return float(self.b[-1] - self.a[0])


def edges_from_geometry(cs: CpwCrossSection) -> EdgeCoordinates:
    n = cs.n
    a = np.empty(n + 1)
    b = np.empty(n + 1)
    x = 0.0
    for i in range(n + 1):
        a[i] = x
        x += cs.gap_widths[i]
        b[i] = x
        if i < n:
            x += cs.line_widths[i]
    centre = 0.5 * (a[0] + b[-1])
    return EdgeCoordinates(a - centre, b - centre)


# ---------------------------------------------------------------------------
# Schwarz-Christoffel integrals
# ---------------------------------------------------------------------------

class _MapIntegrand:
    """Real magnitude of the map derivative, ``prod(x - c) / sqrt(prod |x - p|)``.

    On the real axis the phase of the derivative is constant between
    consecutive edge points: with the square-root branch of the upper half
    plane it equals ``(-1j) ** k`` where ``k`` is the number of edge points to
    the right of ``x``.
    """

    def __init__(self, edges: EdgeCoordinates, c_points, rtol: float = 1e-12):
        self.p = edges.points
        self.c = np.asarray(c_points, dtype=float)
        self.scale = edges.span
        self.rtol = rtol

    def _num(self, x):
        out = np.ones_like(x)
        for cj in self.c:
            out = out * (x - cj)
        return out

    def _den(self, x, skip):
        out = np.ones_like(x)
        for k, pk in enumerate(self.p):
            if k not in skip:
                out = out * np.abs(x - pk)
        return np.sqrt(out)

    def phase(self, k_left: int) -> complex:
        """Phase on the open interval just right of edge point ``k_left``."""
        return (-1j) ** (len(self.p) - 1 - k_left)

    def segment(self, k: int) -> float:
        """∫ between edge points k and k+1 of the real magnitude."""
        lo, hi = self.p[k], self.p[k + 1]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        skip = (k, k + 1)

        # x = mid + half sin(t) cancels both inverse square roots exactly
        def h(t):
            x = mid + half * np.sin(t)
            return self._num(x) / self._den(x, skip)

        val, _ = singular_quadrature(h, -0.5 * math.pi, 0.5 * math.pi, (False, False), rtol=self.rtol)
        return val

    def tail(self, side: str) -> float:
        """Magnitude integral over a semi-infinite ground plane."""
        L = self.scale
        if side == "right":
            k, sgn = len(self.p) - 1, 1.0
        else:
            k, sgn = 0, -1.0
        x0 = self.p[k]

        # x = x0 ± L tan(t)^2
        def h(t):
            tt = np.tan(t)
            x = x0 + sgn * L * tt * tt
            return self._num(x) / self._den(x, (k,)) * 2.0 * math.sqrt(L) / np.cos(t) ** 2

        val, _ = singular_quadrature(h, 0.0, 0.5 * math.pi, (False, False), rtol=self.rtol)
        return val


def sc_map(edges: EdgeCoordinates, c_points, x_from: float, x_to: float, rtol: float = 1e-12) -> complex:
    """Integral of the map derivative along the real axis from ``x_from`` to
    ``x_to``. Both abscissas must be edge points."""
    f = _MapIntegrand(edges, c_points, rtol)
    pts = list(f.p)
    try:
        i, j = pts.index(x_from), pts.index(x_to)
    except ValueError as exc:
        raise GeometryError("sc_map endpoints must be edge points") from exc
    sgn = 1.0
    if j < i:
        i, j, sgn = j, i, -1.0
    return sgn * sum(f.phase(k) * f.segment(k) for k in range(i, j))


def _driven_gaps(n: int, m: int) -> list[int]:
    return [j for j in range(n + 1) if j not in (m, m + 1)]


def solve_gap_points(
    edges: EdgeCoordinates,
    m: int,
    tol: float = 1e-12,
    max_cycles: int = 200,
) -> np.ndarray:
    """Place one zero of the map derivative inside every gap that separates
    two grounded conductors so that the image of that gap closes on itself.

    Cyclic coordinate-wise bracketed solves; each ``c_j`` is confined to its
    own gap. Returns ``c`` ordered by gap index (length ``n - 1``).
    """
    n = edges.n
    if not 0 <= m <= n - 1:
        raise GeometryError(f"driven line index {m} outside 0..{n - 1}")
    gaps = _driven_gaps(n, m)
    if not gaps:
        return np.empty(0)
    c = np.array([0.5 * (edges.a[j] + edges.b[j]) for j in gaps])
    height = abs(_MapIntegrand(edges, c).segment(2 * m))

    def gap_integral(cvec, j):
        return _MapIntegrand(edges, cvec).segment(2 * j)

    for _ in range(max_cycles):
        for q, j in enumerate(gaps):
            def F(x, q=q, j=j):
                trial = c.copy()
                trial[q] = x
                return gap_integral(trial, j)

            lo, hi = edges.a[j], edges.b[j]
            flo, fhi = F(lo), F(hi)
            if np.sign(flo) == np.sign(fhi):
                raise NoSignChange(f"gap {j} integral does not change sign across the gap")
            c[q] = bracketed_root(F, lo, hi, xtol=1e-15 * edges.span).root
        height = abs(_MapIntegrand(edges, c).segment(2 * m))
        resid = max(abs(gap_integral(c, j)) for j in gaps)
        if resid < tol * height:
            return c
    raise MaxIterations(f"gap points not converged after {max_cycles} cycles (residual {resid:.3g})")


@dataclass(frozen=True)
class MapImage:
    """Widths and height of the rectangle obtained when line ``m`` is driven."""

    m: int
    c_points: np.ndarray
    height: float
    top: float
    line_widths: np.ndarray  # image width of every line (entry m is the top)
    ground_widths: tuple[float, float]  # left, right ground planes
    closure: float  # largest residual gap integral / height


def map_column(edges: EdgeCoordinates, m: int, rtol: float = 1e-12) -> MapImage:
    n = edges.n
    c = solve_gap_points(edges, m)
    f = _MapIntegrand(edges, c, rtol)
    height = abs(f.segment(2 * m))
    widths = np.array([abs(f.segment(2 * i + 1)) for i in range(n)])
    grounds = (abs(f.tail("left")), abs(f.tail("right")))
    closure = max([abs(f.segment(2 * j)) for j in _driven_gaps(n, m)], default=0.0) / height
    return MapImage(m, c, height, widths[m], widths, grounds, closure)


def capacitance_matrix(cs: CpwCrossSection, return_asymmetry: bool = False, asym_tol: float = 1e-6):
    """Maxwell capacitance matrix per unit length [F/m].

    Off-diagonal entries are negative. A diagonal entry is the total
    capacitance of its line, i.e. the sum of the magnitudes of the
    capacitances to every other conductor including the two ground planes.
    """
    edges = edges_from_geometry(cs)
    n = cs.n
    k = (cs.eps_r + 1.0) * epsilon_0
    C = np.zeros((n, n))
    for m in range(n):
        img = map_column(edges, m)
        for i in range(n):
            C[i, m] = k * img.top / img.height if i == m else -k * img.line_widths[i] / img.height
    asym = np.max(np.abs(C - C.T)) / np.max(np.abs(np.diag(C)))
    if asym > asym_tol:
        raise AsymmetryTooLarge(f"relative asymmetry {asym:.3g} exceeds {asym_tol}")
    C = 0.5 * (C + C.T)
    return (C, asym) if return_asymmetry else C


@dataclass(frozen=True)
class CouplerMatrices:
    C_pul: np.ndarray
    L_pul: np.ndarray
    Z_char: np.ndarray
    v: float
    eps_eff: float
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.C_pul.shape[0])

    @property
    def Y_char(self) -> np.ndarray:
        return self.v * self.C_pul


def coupler_matrices(cs: CpwCrossSection, C_pul: np.ndarray | None = None, check_rtol: float = 1e-10) -> CouplerMatrices:
    if C_pul is None:
        C_pul = capacitance_matrix(cs)
    C_pul = np.asarray(C_pul, dtype=float)
    if np.any(np.linalg.eigvalsh(C_pul) <= 0):
        raise GeometryError("capacitance matrix is not positive definite")
    v = phase_velocity(cs.eps_r)
    Cinv = np.linalg.inv(C_pul)
    Cinv = 0.5 * (Cinv + Cinv.T)
    L = Cinv / v**2
    Z = Cinv / v
    Z_root = np.real(scipy.linalg.sqrtm(L @ Cinv))
    if np.max(np.abs(Z_root - Z)) > check_rtol * np.max(np.abs(Z)):
        raise ArithmeticError("characteristic impedance paths disagree")
    return CouplerMatrices(C_pul, L, Z, v, effective_permittivity(cs.eps_r))


def single_line_z0(width: float, gap: float, eps_r: float = DEFAULT_EPS_R) -> float:
    """Characteristic impedance of a zero-thickness CPW line [Ohm]."""
    if width <= 0 or gap <= 0:
        raise GeometryError("width and gap must be positive")
    k = width / (width + 2.0 * gap)
    kp = math.sqrt(1.0 - k * k)
    return 30.0 * math.pi / math.sqrt(effective_permittivity(eps_r)) * elliptic_k(kp) / elliptic_k(k)
