"""Exact cubature on S^2 and the needlet analysis / synthesis pair.

Each band ``j`` gets its own Gauss-Legendre x equiangular product grid, exact
for products of harmonics up to degree ``ceil(S_{j+1})``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .harmonics import degree_of_index, n_coeffs, real_harmonics, to_angles, unit_vectors
from .window import WindowFamily

__all__ = [
    "CubatureGrid",
    "NeedletCoefficients",
    "build_cubature",
    "scale_grid",
    "geodesic_distance",
    "min_separation",
    "band_limit",
    "analyze",
    "analyze_all",
    "synthesize",
    "parseval_ratio",
    "beta_field",
]

# rows of the harmonic matrix evaluated per block
_POINT_BLOCK = 2048


@dataclass(frozen=True, eq=False)
class CubatureGrid:
    """Points ``xi_k`` and weights ``lambda_k`` integrating ``Y_lm Y_l'm'`` exactly for ``l, l' <= l_exact``."""

    l_exact: int
    points: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    n_rings: int

    @property
    def size(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.size


@functools.lru_cache(maxsize=64)
def build_cubature(l_exact: int) -> CubatureGrid:
    """Gauss-Legendre rings in ``cos theta`` times ``2 l_exact + 1`` equispaced longitudes."""
    if int(l_exact) != l_exact or l_exact < 0:
        raise ValueError("l_exact must be a non-negative integer")
    l_exact = int(l_exact)
    n_rings = math.ceil((2 * l_exact + 2) / 2)
    n_lon = 2 * l_exact + 1
    x, wx = np.polynomial.legendre.leggauss(n_rings)
    theta_r = np.arccos(x)
    phi_s = 2 * np.pi * np.arange(n_lon) / n_lon
    theta, phi = np.meshgrid(theta_r, phi_s, indexing="ij")
    theta, phi = theta.ravel(), phi.ravel()
    weights = np.repeat(wx * (2 * np.pi / n_lon), n_lon)
    points = unit_vectors(theta, phi)
    for arr in (points, weights, theta, phi):
        arr.setflags(write=False)
    return CubatureGrid(l_exact, points, weights, theta, phi, n_rings)


def scale_grid(w: WindowFamily, j: int) -> CubatureGrid:
    """Grid exact up to ``ceil(S_{j+1})`` for band ``j``."""
    return build_cubature(int(math.ceil(w.scales.scale(j + 1))))


def geodesic_distance(x, y):
    """Great-circle distance; the atan2 form is accurate near 0 and pi."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cross = np.linalg.norm(np.cross(x, y), axis=-1)
    dot = np.sum(x * y, axis=-1)
    return np.arctan2(cross, dot)


def min_separation(grid: CubatureGrid) -> float:
    """Minimum pairwise geodesic distance between distinct grid points."""
    p = grid.points
    best = np.pi
    for start in range(0, p.shape[0], _POINT_BLOCK):
        blk = p[start : start + _POINT_BLOCK]
        dots = np.clip(blk @ p.T, -1.0, 1.0)
        rows = np.arange(blk.shape[0])
        dots[rows, start + rows] = -np.inf
        best = min(best, float(np.arccos(dots.max())))
    return best


def band_limit(alm) -> int:
    """Band limit ``L`` of a flat coefficient array with ``(L + 1)^2`` slots."""
    n = np.shape(alm)[-1]
    L = math.isqrt(n) - 1
    if (L + 1) ** 2 != n:
        raise ValueError(f"coefficient length {n} is not a perfect square")
    return L


def _band_weights(w: WindowFamily, j: int, L: int):
    """Flat slice ``[lo^2, (hi+1)^2)`` of band j restricted to ``1 <= l <= L`` and the per-slot window."""
    ells, b = w.tabulated(j)
    keep = (ells >= 1) & (ells <= L)
    ells, b = ells[keep], b[keep]
    if ells.size == 0:
        return None
    lo, hi = int(ells[0]), int(ells[-1])
    dense = np.zeros(hi + 1)
    dense[ells] = b
    deg = degree_of_index(n_coeffs(hi))[lo * lo :]
    return lo, hi, dense[deg]


def _harmonic_rows(grid: CubatureGrid, lo: int, hi: int, idx: np.ndarray):
    for start in range(0, idx.size, _POINT_BLOCK):
        sel = idx[start : start + _POINT_BLOCK]
        yield sel, start, real_harmonics(hi, grid.theta[sel], grid.phi[sel], l_min=lo)


def analyze(alm, w: WindowFamily, j: int, grid: CubatureGrid | None = None, indices=None) -> np.ndarray:
    """Needlet coefficients ``beta_{j,k} = sqrt(lambda_k) sum_l b_j(l) sum_m a_lm Y_lm(xi_k)``.

    ``alm`` may carry leading batch dimensions. ``indices`` restricts the
    evaluation to a subset of grid points (in the given order). The monopole
    never contributes.
    """
    alm = np.asarray(alm, dtype=float)
    L = band_limit(alm)
    w._check_band(j)
    grid = scale_grid(w, j) if grid is None else grid
    idx = np.arange(grid.size) if indices is None else np.asarray(indices, dtype=int)
    out = np.zeros(alm.shape[:-1] + (idx.size,))
    band = _band_weights(w, j, L)
    if band is None:
        return out
    lo, hi, wts = band
    if hi > grid.l_exact:
        raise ValueError(f"band limit {hi} exceeds grid exactness {grid.l_exact}")
    filtered = alm[..., lo * lo : (hi + 1) ** 2] * wts
    for sel, start, Y in _harmonic_rows(grid, lo, hi, idx):
        out[..., start : start + sel.size] = (filtered @ Y.T) * np.sqrt(grid.weights[sel])
    return out


def beta_field(alm, w: WindowFamily, j: int, points) -> np.ndarray:
    """Continuous needlet field ``beta_j(x) = sum_l b_j(l) sum_m a_lm Y_lm(x)`` by direct summation."""
    alm = np.asarray(alm, dtype=float)
    L = band_limit(alm)
    theta, phi = to_angles(np.atleast_2d(points))
    band = _band_weights(w, j, L)
    if band is None:
        return np.zeros(alm.shape[:-1] + (theta.size,))
    lo, hi, wts = band
    Y = real_harmonics(hi, theta, phi, l_min=lo)
    return (alm[..., lo * lo : (hi + 1) ** 2] * wts) @ Y.T


@dataclass(frozen=True)
class NeedletCoefficients:
    """Per-band coefficient arrays aligned with their cubature grids."""

    beta: dict
    grids: dict

    def __post_init__(self):
        if set(self.beta) != set(self.grids):
            raise ValueError("coefficient and grid bands differ")
        for j, arr in self.beta.items():
            if np.shape(arr)[-1] != self.grids[j].size:
                raise ValueError(f"band {j}: {np.shape(arr)[-1]} coefficients for {self.grids[j].size} grid points")

    @property
    def bands(self) -> list[int]:
        return sorted(self.beta)

    def energy(self) -> np.ndarray:
        return sum(np.sum(np.asarray(self.beta[j]) ** 2, axis=-1) for j in self.bands)


def analyze_all(alm, w: WindowFamily, bands=None) -> NeedletCoefficients:
    bands = range(w.n_bands) if bands is None else bands
    beta, grids = {}, {}
    for j in bands:
        grids[j] = scale_grid(w, j)
        beta[j] = analyze(alm, w, j, grids[j])
    return NeedletCoefficients(beta, grids)


def synthesize(coeffs: NeedletCoefficients, w: WindowFamily, l_max: int | None = None) -> np.ndarray:
    """Reconstruct ``a_lm = sum_j b_j(l) sum_k sqrt(lambda_k) beta_jk Y_lm(xi_k)``."""
    if l_max is None:
        tops = [int(w.multipoles(j)[-1]) for j in coeffs.bands if w.multipoles(j).size]
        l_max = max(tops, default=0)
    bands = coeffs.bands
    batch = np.shape(coeffs.beta[bands[0]])[:-1] if bands else ()
    out = np.zeros(batch + (n_coeffs(l_max),))
    for j in bands:
        grid = coeffs.grids[j]
        beta = np.asarray(coeffs.beta[j], dtype=float)
        if beta.shape[-1] != grid.size:
            raise ValueError(f"band {j}: coefficient shape does not match its grid")
        band = _band_weights(w, j, l_max)
        if band is None:
            continue
        lo, hi, wts = band
        scaled = beta * np.sqrt(grid.weights)
        acc = np.zeros(beta.shape[:-1] + (wts.size,))
        for sel, start, Y in _harmonic_rows(grid, lo, hi, np.arange(grid.size)):
            acc += scaled[..., start : start + sel.size] @ Y
        out[..., lo * lo : (hi + 1) ** 2] += acc * wts
    return out


def parseval_ratio(alm, w: WindowFamily) -> float:
    """``sum_{j,k} beta_jk^2 / sum_{l>=1,m} a_lm^2``; equals 1 for a tight frame."""
    alm = np.asarray(alm, dtype=float)
    L = band_limit(alm)
    if L > w.l_cover:
        raise ValueError(f"band limit {L} exceeds window coverage {w.l_cover}")
    norm = np.sum(alm[..., 1:] ** 2, axis=-1)
    if np.any(norm == 0):
        raise ZeroDivisionError("zero-norm input")
    return analyze_all(alm, w).energy() / norm
