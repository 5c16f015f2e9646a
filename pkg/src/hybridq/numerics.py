"""Numerical kernels shared by the geometry, element and mode-solver layers.

Everything here is pure and reentrant. Root finders always return a
:class:`RootReport` carrying the residual so callers can decide whether to
accept a root.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize


class NumericsError(ArithmeticError):
    pass


class NoBracket(NumericsError):
    pass


class Diverged(NumericsError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotConverged(NumericsError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class IllConditionedKernel(UserWarning):
    """Smallest singular value is not small compared with the largest."""


@dataclass(frozen=True)
class RootReport:
    root: complex | float
    residual: float
    iterations: int
    start: tuple  # bracket (a, b) or (seed,)
    converged: bool = True


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def det_complex(M) -> complex:
    """Determinant by partial-pivoted LU factorisation."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"square matrix required, got shape {M.shape}")
    if M.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(M))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def null_vector(M, *, rcond_warn: float = 1e-6, return_ratio: bool = False):
    """Unit-norm approximate kernel vector of ``M``.

    The right singular vector of the smallest singular value is returned with
    its largest-magnitude entry rotated onto the positive real axis, so the
    result is independent of any overall complex factor applied to ``M``.
    A :class:`IllConditionedKernel` warning is issued when
    ``sigma_min / sigma_max`` exceeds ``rcond_warn``.
    """
    M = np.asarray(M, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    v = vh[-1].conj()
    v = _fix_phase(v / np.linalg.norm(v))
    ratio = s[-1] / s[0] if s[0] > 0 else 0.0
    if ratio > rcond_warn:
        warnings.warn(
            f"matrix is not numerically singular (sigma_min/sigma_max = {ratio:.3g})",
            IllConditionedKernel,
            stacklevel=2,
        )
    if return_ratio:
        return v, ratio
    return v


def kernel_basis(M, *, rel_tol: float = 1e-6, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``M``.

    At least one vector is always returned. Further singular vectors are
    included while ``sigma / ref < rel_tol`` where ``ref`` is ``scale`` or,
    by default, ``sigma_max``. Pass ``scale`` for a normalised matrix whose
    singular values may all vanish (an exactly degenerate root). For a multi-dimensional
    kernel the basis is rotated so that each vector is pinned to a distinct
    dominant node (column-pivoted QR), which localises degenerate modes of
    decoupled sub-circuits.
    """
    M = np.asarray(M, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    smax = scale if scale is not None else (s[0] if s[0] > 0 else 1.0)
    dim = 1 + int(np.sum(s[:-1] / smax < rel_tol))
    B = vh[-dim:].conj().T
    if dim > 1:
        from scipy.linalg import qr

        _, _, piv = qr(B.conj().T, pivoting=True, mode="economic")
        rows = piv[:dim]
        B = B @ np.linalg.inv(B[rows, :])
        B = B / np.linalg.norm(B, axis=0)
    return np.column_stack([_fix_phase(B[:, k]) for k in range(dim)])


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def bracketed_root(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-12) -> RootReport:
    """Brent's method on a sign-changing bracket."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return RootReport(a, 0.0, 0, (a, b))
    if fb == 0:
        return RootReport(b, 0.0, 0, (a, b))
    if np.sign(fa) == np.sign(fb):
        raise NoBracket(f"f({a!r}) and f({b!r}) have the same sign")
    root, info = optimize.brentq(f, a, b, xtol=xtol, full_output=True)
    return RootReport(root, abs(f(root)), info.iterations, (a, b), info.converged)


def newton_complex(
    f: Callable[[complex], complex],
    seed: complex,
    ztol: float = 2 * math.pi,
    maxiter: int = 50,
    h: float | None = None,
) -> RootReport:
    """Newton-Raphson for an analytic complex function.

    The derivative is a central difference with step
    ``max(1e-7 |z|, 2 pi 1e3)`` unless ``h`` is given. Defaults are tuned for
    angular frequencies of order 1e10 rad/s.
    """
    z = complex(seed)
    scale = max(abs(z), 1e-300)
    fz = f(z)
    for it in range(1, maxiter + 1):
        step = h if h is not None else max(1e-7 * abs(z), 2 * math.pi * 1e3)
        df = (f(z + step) - f(z - step)) / (2 * step)
        if df == 0 or not np.isfinite(df):
            raise Diverged(f"zero or non-finite derivative at z={z}", RootReport(z, abs(fz), it, (seed,), False))
        dz = fz / df
        z = z - dz
        fz = f(z)
        if not np.isfinite(z) or abs(z) > 10 * scale:
            raise Diverged(f"Newton iterate left the search region (z={z})", RootReport(z, abs(fz), it, (seed,), False))
        if abs(dz) < ztol:
            return RootReport(z, abs(fz), it, (seed,))
    raise Diverged(f"no convergence in {maxiter} iterations", RootReport(z, abs(fz), maxiter, (seed,), False))


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _substituted(f, a, b, sing_a, sing_b):
    """Return (g, lo, hi) with ∫_a^b f dx = ∫_lo^hi g dθ and g bounded."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    if sing_a and sing_b:
        return (lambda t: f(mid + half * np.sin(t)) * half * np.cos(t)), -0.5 * math.pi, 0.5 * math.pi
    if sing_a:
        L = b - a
        return (lambda t: f(a + L * (1.0 - np.cos(t))) * L * np.sin(t)), 0.0, 0.5 * math.pi
    if sing_b:
        L = b - a
        return (lambda t: f(b - L * (1.0 - np.cos(t))) * L * np.sin(t)), 0.0, 0.5 * math.pi
    return f, a, b


def singular_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    endpoints_singular: tuple[bool, bool] = (True, True),
    rtol: float = 1e-10,
    n0: int = 16,
    nmax: int = 4096,
    atol: float = 0.0,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` allowing inverse-square-root endpoint
    singularities.

    ``f`` must accept numpy arrays. Flagged endpoints are removed by a sine
    (or one-sided cosine) substitution; the smooth result is integrated with
    Gauss-Legendre rules of doubling order until two successive estimates
    agree to ``rtol``. Returns ``(value, error_estimate)``.
    """
    g, lo, hi = _substituted(f, a, b, *endpoints_singular)
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def rule(n):
        x, w = gauss_legendre(n)
        gx = g(c + r * x)
        return r * np.dot(w, gx), r * np.dot(w, np.abs(gx))

    # the change is measured against the integral of |f| so that integrals
    # that cancel to ~0 still terminate
    n = n0
    prev, _ = rule(n)
    while n < nmax:
        n *= 2
        cur, mag = rule(n)
        err = abs(cur - prev)
        if err <= max(rtol * mag, atol):
            return cur, err
        prev = cur
    raise NotConverged(f"quadrature did not reach rtol={rtol} with {nmax} nodes", cur, err)


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention."""
    if not 0 <= k < 1:
        raise ValueError(f"elliptic_k needs 0 <= k < 1, got {k}")
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)
