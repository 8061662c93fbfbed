"""Goodness-of-fit testing of a hypothesized spectrum with subsampled needlet coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import sample_harmonics_batch
from .grid import CubatureGrid, NeedletCoefficients, analyze, scale_grid
from .harmonics import S2, SphereDim
from .kernel import covariance_kernel
from .scale import ScaleSequence
from .stats import central_moments, jackknife_se, loo_moments
from .window import WindowFamily

__all__ = [
    "SphericalCap",
    "SubsampleSpec",
    "GofResult",
    "MomentDiagnostics",
    "GofRun",
    "distance_threshold",
    "select_subsample",
    "expected_coeff_variance",
    "expected_variances",
    "gof_statistic",
    "gof_statistics",
    "moment_diagnostics",
    "offdiagonal_correlation_mass",
    "gap_condition",
    "simulate_gof",
]

MIN_REPLICATIONS = 200
_ROW_BLOCK = 64


@dataclass(frozen=True)
class SphericalCap:
    """Observed region ``{x : d(x, center) <= radius}``."""

    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        nrm = np.linalg.norm(c)
        if c.shape != (3,) or nrm == 0:
            raise ValueError("cap center must be a non-zero 3-vector")
        object.__setattr__(self, "center", tuple(c / nrm))
        if not 0 < self.radius <= math.pi:
            raise ValueError("cap radius must lie in (0, pi]")

    def contains(self, points) -> np.ndarray:
        dots = np.asarray(points) @ np.asarray(self.center)
        return dots >= math.cos(self.radius) - 1e-15


@dataclass(frozen=True)
class SubsampleSpec:
    delta: float
    epsilon: float
    beta: float = 0.0
    region: SphericalCap | None = None

    def __post_init__(self):
        if not self.delta > 0 or not self.epsilon > 0:
            raise ValueError("delta and epsilon must be positive")
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0, 1)")
        if not self.beta + self.epsilon < 1:
            raise ValueError("beta + epsilon must be < 1")


def distance_threshold(s: ScaleSequence, j: int, spec: SubsampleSpec) -> float:
    """Minimum separation ``delta / S_{j-1}^{1 - beta - epsilon}`` for band ``j >= 1``."""
    if j < 1:
        raise IndexError("subsampling needs j >= 1")
    return spec.delta / s.scale(j - 1) ** (1 - spec.beta - spec.epsilon)


def select_subsample(grid: CubatureGrid, s: ScaleSequence, j: int, spec: SubsampleSpec, min_size: int = 1) -> np.ndarray:
    """Greedy index-order subset of grid points pairwise farther apart than the threshold.

    A point is accepted when its distance to every previously accepted point
    exceeds the threshold; points outside the region are skipped.
    """
    thr = distance_threshold(s, j, spec)
    pts = grid.points
    candidates = np.arange(grid.size)
    if spec.region is not None:
        candidates = candidates[spec.region.contains(pts)]
    if candidates.size == 0:
        return candidates
    if thr >= math.pi:
        if min_size > 1:
            raise ValueError(f"threshold {thr:.3g} >= pi admits a single point, {min_size} demanded")
        return candidates[:1]
    cos_thr = math.cos(thr)
    accepted = np.empty((candidates.size, 3))
    chosen = []
    for k in candidates:
        p = pts[k]
        n = len(chosen)
        # distance > thr  <=>  dot < cos(thr)
        if n == 0 or np.max(accepted[:n] @ p) < cos_thr:
            accepted[n] = p
            chosen.append(int(k))
    out = np.asarray(chosen, dtype=int)
    if out.size < min_size:
        raise ValueError(f"subsample has {out.size} points, {min_size} demanded")
    return out


def _band_variance(w: WindowFamily, j: int, spec) -> float:
    ells, b = w.tabulated(j)
    if ells.size == 0:
        return 0.0
    cl = np.asarray(spec(ells), dtype=float)
    return float(np.sum(b * b * (2 * ells + 1) / (4 * np.pi) * cl))


def expected_coeff_variance(w: WindowFamily, s: ScaleSequence, j: int, k: int, grid: CubatureGrid, spec) -> float:
    """``E beta_{j,k}^2 = lambda_k sum_l b_j(l)^2 (2l+1)/(4 pi) C_l``."""
    if s != w.scales:
        raise ValueError("scale sequence does not match the window family")
    return float(grid.weights[k]) * _band_variance(w, j, spec)


def expected_variances(w: WindowFamily, j: int, grid: CubatureGrid, spec, indices=None) -> np.ndarray:
    idx = np.arange(grid.size) if indices is None else np.asarray(indices, dtype=int)
    return grid.weights[idx] * _band_variance(w, j, spec)


@dataclass(frozen=True)
class GofResult:
    j: int | None
    statistic: float
    card_Dj: int
    expected_variances: np.ndarray


def gof_statistics(beta_sub, expected_sub) -> np.ndarray:
    """``I_j`` for coefficients already restricted to the subsample (last axis)."""
    beta_sub = np.asarray(beta_sub, dtype=float)
    ev = np.asarray(expected_sub, dtype=float)
    n = ev.size
    if n < 2:
        raise ValueError("the subsample needs at least two points")
    if np.any(ev <= 0):
        raise ZeroDivisionError("expected variances must be strictly positive")
    return np.sum(beta_sub**2 / ev - 1.0, axis=-1) / math.sqrt(2 * n)


def gof_statistic(coeffs, D_j, expected_variances, j: int | None = None) -> GofResult:
    """Standardized sum ``(2 card)^{-1/2} sum_{k in D_j} (beta_k^2 / E beta_k^2 - 1)``.

    ``coeffs`` is either a per-grid-point array or :class:`NeedletCoefficients`
    (then ``j`` selects the band); ``expected_variances`` is indexed by grid point.
    """
    idx = np.asarray(D_j, dtype=int)
    if isinstance(coeffs, NeedletCoefficients):
        if j is None:
            raise ValueError("band j is required with NeedletCoefficients")
        coeffs = coeffs.beta[j]
    beta = np.asarray(coeffs, dtype=float)
    ev = np.asarray(expected_variances, dtype=float)[idx]
    stat = float(gof_statistics(beta[idx], ev))
    return GofResult(j, stat, int(idx.size), ev)


@dataclass(frozen=True)
class MomentDiagnostics:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    n: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def moment_diagnostics(samples) -> MomentDiagnostics:
    """Sample moments of ``I_j`` replications with jackknife standard errors."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_REPLICATIONS:
        raise ValueError(f"need at least {MIN_REPLICATIONS} replications, got {x.size}")
    if np.ptp(x) == 0:
        raise ZeroDivisionError("constant samples: variance is zero and kurtosis undefined")
    mean, var, skew, kurt = central_moments(x)
    se = jackknife_se(loo_moments(x))
    return MomentDiagnostics(mean, var, skew, kurt, float(se[0]), float(se[1]), float(se[2]), float(se[3]), int(x.size))


def offdiagonal_correlation_mass(w: WindowFamily, spec, grid: CubatureGrid, D_j, j: int, dim: SphereDim = S2) -> float:
    """``(1/card) sum_{k != k'} Corr(beta_k, beta_k')^2`` from the analytic kernel.

    This is the excess of ``Var(I_j)`` over 1 for Gaussian fields.
    """
    idx = np.asarray(D_j, dtype=int)
    pts = grid.points[idx]
    var = covariance_kernel(w, dim, spec, j, 1.0)
    total = 0.0
    for start in range(0, idx.size, _ROW_BLOCK):
        dots = np.clip(pts[start : start + _ROW_BLOCK] @ pts.T, -1.0, 1.0)
        rho = covariance_kernel(w, dim, spec, j, dots) / var
        total += float(np.sum(rho**2))
    return (total - idx.size) / idx.size


def gap_condition(s: ScaleSequence, j: int, beta: float) -> bool:
    """``S_{j-1}^{1-beta} < S_j - S_{j-1}``: the band is wide enough for the regularity."""
    return s.scale(j - 1) ** (1 - beta) < s.gap(j)


@dataclass(frozen=True, eq=False)
class GofRun:
    j: int
    statistics: np.ndarray
    subsample: np.ndarray
    expected_variances: np.ndarray
    moments: MomentDiagnostics


def simulate_gof(true_spec, hyp_spec, w: WindowFamily, j: int, sub: SubsampleSpec, n_reps: int, seed: int, threads: int = 1) -> GofRun:
    """Simulate fields from ``true_spec`` and compute ``I_j`` under ``hyp_spec`` for each replication."""
    grid = scale_grid(w, j)
    D = select_subsample(grid, w.scales, j, sub, min_size=2)
    top = int(w.multipoles(j)[-1])
    alm = sample_harmonics_batch(true_spec, top, seed, n_reps, threads=threads)
    beta = analyze(alm, w, j, grid, indices=D)
    ev = expected_variances(w, j, grid, hyp_spec, D)
    stats = gof_statistics(beta, ev)
    return GofRun(j, stats, D, ev, moment_diagnostics(stats))
