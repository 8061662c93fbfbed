"""Smooth compactly supported windows built from a normalized bump primitive.

The construction is ``b_j(u) = sqrt(a_{j+1}(u) - a_j(u))`` where ``a_j`` is a
smooth step from 1 (for ``u <= S_{j-1}``) down to 0 (for ``u >= S_j``), the ramp
being the normalized primitive of ``exp(-1/(1 - t^2))``.
"""

from __future__ import annotations

import functools
from math import comb

import numpy as np
from scipy import integrate

from .scale import ScaleSequence, integer_multipoles

__all__ = [
    "bump_phi",
    "bump_integral",
    "primitive_Phi",
    "WindowFamily",
    "step_aj",
    "window_bj",
    "check_partition_of_unity",
    "estimate_derivative_bound",
    "MonotonicityError",
]

_QUAD_TOL = 1e-13
# a_{j+1} - a_j in [-_MONO_TOL, 0) is round-off near support endpoints
_MONO_TOL = 1e-12
_MAX_FD_ORDER = 4
_FD_STEP = 1e-3


class MonotonicityError(ArithmeticError):
    """a_{j+1}(u) < a_j(u) beyond round-off: the window would be imaginary."""


def bump_phi(t):
    """``exp(-1/(1 - t^2))`` on ``|t| < 1`` and 0 elsewhere (vectorized)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out[()] if out.ndim == 0 else out


def _phi_scalar(t: float) -> float:
    if abs(t) >= 1:
        return 0.0
    return float(np.exp(-1.0 / (1.0 - t * t)))


def _quad(lo: float, hi: float) -> float:
    val, _ = integrate.quad(_phi_scalar, lo, hi, epsabs=0.0, epsrel=_QUAD_TOL, limit=200)
    return val


@functools.cache
def bump_integral() -> float:
    """Normalization constant ``C_Phi``: the integral of the bump over [-1, 1]."""
    return 2.0 * _quad(0.0, 1.0)


@functools.lru_cache(maxsize=1 << 16)
def _Phi_scalar(u: float) -> float:
    if u <= -1.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    c = bump_integral()
    # integrate over the shorter tail so that Phi(-u) = 1 - Phi(u) holds to quadrature accuracy
    if u <= 0.0:
        return _quad(-1.0, u) / c
    return 1.0 - _quad(u, 1.0) / c


def primitive_Phi(u):
    """Normalized primitive of the bump: 0 below -1, 1 above 1, smooth and monotone between."""
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 0:
        return _Phi_scalar(float(arr))
    return np.fromiter((_Phi_scalar(float(x)) for x in arr.ravel()), float, arr.size).reshape(arr.shape)


def _step(s: ScaleSequence, j: int, u: float) -> float:
    lo, hi = s.scale(j - 1), s.scale(j)
    if u <= lo:
        return 1.0
    if u >= hi:
        return 0.0
    return _Phi_scalar((hi + lo - 2.0 * u) / (hi - lo))


def _window(s: ScaleSequence, j: int, u: float) -> float:
    # outside the open support both branches vanish identically
    lo, mid, hi = s.scale(j - 1), s.scale(j), s.scale(j + 1)
    if u <= lo or u >= hi:
        return 0.0
    diff = _step(s, j + 1, u) - _step(s, j, u)
    if diff < -_MONO_TOL:
        raise MonotonicityError(f"a_{j + 1}({u}) - a_{j}({u}) = {diff:.3e} < 0")
    # same quantity, evaluated as a Phi tail so it keeps relative accuracy near the edges
    if u <= mid:
        sq = _Phi_scalar(-(mid + lo - 2.0 * u) / (mid - lo))
    else:
        sq = _Phi_scalar((hi + mid - 2.0 * u) / (hi - mid))
    return float(np.sqrt(max(sq, 0.0)))


class WindowFamily:
    """Windows ``b_0 .. b_{jmax-1}`` for a scale sequence.

    Values at the integer multipoles of each band are tabulated eagerly, so
    the transforms never touch the quadrature once the family exists.
    Instances are immutable.
    """

    def __init__(self, scales: ScaleSequence):
        self._scales = scales
        self._c_phi = bump_integral()
        table = {}
        for j in range(scales.j_max):
            ells = integer_multipoles(scales, j)
            vals = np.array([_window(scales, j, float(ell)) for ell in ells], dtype=float)
            ells.setflags(write=False)
            vals.setflags(write=False)
            table[j] = (ells, vals)
        self._table = table

    @property
    def scales(self) -> ScaleSequence:
        return self._scales

    @property
    def c_phi(self) -> float:
        return self._c_phi

    @property
    def n_bands(self) -> int:
        """Number of windows, ``j_max``; bands are indexed ``0 .. j_max - 1``."""
        return self._scales.j_max

    @property
    def l_cover(self) -> float:
        """Largest ``u`` at which the finite family still sums to one: ``S_{jmax-1}``."""
        return self._scales.scale(self._scales.j_max - 1)

    def _check_band(self, j: int) -> None:
        if not 0 <= j <= self.n_bands - 1:
            raise IndexError(f"window index {j} outside [0, {self.n_bands - 1}]")

    def step(self, j: int, u):
        if not 0 <= j <= self._scales.j_max:
            raise IndexError(f"step index {j} outside [0, {self._scales.j_max}]")
        return _vector(lambda x: _step(self._scales, j, x), u)

    def __call__(self, j: int, u):
        self._check_band(j)
        return _vector(lambda x: _window(self._scales, j, x), u)

    def multipoles(self, j: int) -> np.ndarray:
        """Integer multipoles in the open support of band ``j``."""
        self._check_band(j)
        return self._table[j][0]

    def tabulated(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """``(ells, b_j(ells))`` over the open support of band ``j``."""
        self._check_band(j)
        return self._table[j]

    def at_multipoles(self, j: int, l_max: int) -> np.ndarray:
        """Dense array ``out[l] = b_j(l)`` for ``l = 0..l_max``."""
        ells, vals = self.tabulated(j)
        out = np.zeros(l_max + 1)
        keep = ells <= l_max
        out[ells[keep]] = vals[keep]
        return out

    def __repr__(self) -> str:
        return f"WindowFamily(scales={list(self._scales.values)!r})"


def _vector(fn, u):
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 0:
        return fn(float(arr))
    return np.fromiter((fn(float(x)) for x in arr.ravel()), float, arr.size).reshape(arr.shape)


def step_aj(w: WindowFamily, j: int, u):
    """Smooth step ``a_j``: 1 on ``[0, S_{j-1}]``, 0 on ``[S_j, inf)``."""
    return w.step(j, u)


def window_bj(w: WindowFamily, j: int, u):
    """Window ``b_j(u) = sqrt(a_{j+1}(u) - a_j(u))``."""
    return w(j, u)


def check_partition_of_unity(w: WindowFamily, u_grid) -> float:
    """Max over the grid of ``|sum_j b_j(u)^2 - 1|``.

    Grid values must lie in ``[1, S_{jmax-1}]`` where the finite family is complete.
    """
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if u.size == 0:
        return 0.0
    hi = w.l_cover
    bad = (u < 1.0) | (u > hi)
    if np.any(bad):
        raise ValueError(f"grid value {u[bad][0]!r} outside coverage range [1, {hi}]")
    total = np.zeros_like(u)
    for j in range(w.n_bands):
        total += w(j, u) ** 2
    return float(np.max(np.abs(total - 1.0)))


def _central_difference(f, u: float, n: int, h: float) -> float:
    acc = 0.0
    for k in range(n + 1):
        acc += (-1) ** k * comb(n, k) * f(u + (n / 2 - k) * h)
    return acc / h**n


def estimate_derivative_bound(w: WindowFamily, j: int, n: int, probe_count: int = 64) -> float:
    """Finite-difference estimate of ``max_u |D^n b_j(u)| (S_j - S_{j-1})^n``.

    Probes are spread uniformly over the support of band ``j`` with the peak
    ``S_j`` always included. The result should not depend on ``j``.
    """
    if n < 1:
        raise ValueError("derivative order n must be >= 1")
    if n > _MAX_FD_ORDER:
        raise ValueError(f"derivative order {n} too large for stable finite differences (max {_MAX_FD_ORDER})")
    if probe_count < 8:
        raise ValueError("probe_count must be >= 8")
    w._check_band(j)
    s = w.scales
    width = s.gap(j)
    h = width * _FD_STEP
    lo, hi = s.scale(j - 1), s.scale(j + 1)
    probes = np.union1d(np.linspace(lo, hi, probe_count), [s.scale(j)])
    f = lambda x: _window(s, j, x)  # noqa: E731
    k_hat = max(abs(_central_difference(f, float(u), n, h)) for u in probes)
    return k_hat * width**n
