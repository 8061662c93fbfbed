"""Needlet and covariance kernels, discrete difference operators, localization checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonics import SphereDim, gegenbauer_table
from .window import WindowFamily

__all__ = [
    "default_theta_grid",
    "needlet_kernel",
    "covariance_kernel",
    "needlet_correlation",
    "FiniteSequence",
    "DifferenceOperator",
    "apply_upsilon",
    "verify_gegenbauer_identity",
    "localization_envelope",
    "standard_localization_envelope",
    "uncorrelation_envelope",
    "LocalizationReport",
    "localization_report",
    "upsilon_window_bound",
]


def default_theta_grid(n: int = 64) -> np.ndarray:
    """Log-spaced angles on ``[1e-3, pi]``; resolves the near-diagonal regime."""
    return np.geomspace(1e-3, np.pi, n)


def _check_kernel_band(w: WindowFamily, j: int) -> None:
    if not 1 <= j <= w.n_bands - 1:
        raise IndexError(f"kernel band {j} outside [1, {w.n_bands - 1}]")


def _spectrum_at(spec, ells: np.ndarray) -> np.ndarray:
    vals = np.asarray(spec(ells), dtype=float)
    if vals.shape != ells.shape or not np.all(np.isfinite(vals)):
        raise ValueError("spectrum undefined at required multipoles")
    return vals


def _zonal_sum(coef: np.ndarray, ells: np.ndarray, dim: SphereDim, t) -> np.ndarray:
    """``sum_i coef[i] Z_{ells[i]}(t)`` for any shape of ``t``."""
    t = np.asarray(t, dtype=float)
    if ells.size == 0:
        return np.zeros(t.shape)
    g = gegenbauer_table(int(ells.max()), dim.eta, t)[ells]
    scale = (ells + dim.eta) / (dim.eta * dim.omega)
    return np.tensordot(coef * scale, g, axes=(0, 0))


def needlet_kernel(w: WindowFamily, dim: SphereDim, j: int, t):
    """``Psi_j(t) = sum_l b_j(l) Z_{l;d}(t)`` over the open support of band j."""
    _check_kernel_band(w, j)
    ells, b = w.tabulated(j)
    out = _zonal_sum(b, ells, dim, t)
    return out[()] if out.ndim == 0 else out


def covariance_kernel(w: WindowFamily, dim: SphereDim, spec, j: int, t):
    """``Phi_j(t) = sum_l b_j(l)^2 C_l Z_{l;d}(t)``: covariance of ``beta_j`` at angle ``arccos t``.

    ``spec`` is any callable mapping an integer array of multipoles to ``C_l``.
    """
    _check_kernel_band(w, j)
    ells, b = w.tabulated(j)
    cl = _spectrum_at(spec, ells)
    out = _zonal_sum(b * b * cl, ells, dim, t)
    return out[()] if out.ndim == 0 else out


def needlet_correlation(w: WindowFamily, dim: SphereDim, spec, j: int, theta):
    """``Corr(beta_j(x), beta_j(y)) = Phi_j(cos theta) / Phi_j(1)``."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi):
        raise ValueError("theta must lie in [0, pi]")
    var = covariance_kernel(w, dim, spec, j, 1.0)
    if not var > 0:
        raise ZeroDivisionError(f"band {j} has zero variance (empty window support)")
    corr = covariance_kernel(w, dim, spec, j, np.cos(theta)) / var
    corr = np.where(theta == 0, 1.0, np.clip(corr, -1.0, 1.0))
    return corr[()] if corr.ndim == 0 else corr


# ------------------------------------------------------------ difference operators


@dataclass(frozen=True)
class FiniteSequence:
    """Sequence ``r_l`` that is zero outside ``offset .. offset + len(values) - 1``."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("sequences are indexed by l >= 0")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @classmethod
    def from_dense(cls, values) -> "FiniteSequence":
        return cls(0, np.asarray(values, dtype=float))

    @property
    def ells(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.values.size)

    def dense(self, l_max: int | None = None) -> np.ndarray:
        top = self.offset + self.values.size - 1
        l_max = top if l_max is None else l_max
        out = np.zeros(max(l_max, top) + 1)
        out[self.offset : top + 1] = self.values
        return out[: l_max + 1]


@dataclass(frozen=True)
class DifferenceOperator:
    """``Upsilon_d(l) = u1(l) D- D+ + u0(l) D+`` acting on sequences over ``l >= 0``."""

    dim: SphereDim

    def upsilon1(self, ell):
        ell = np.asarray(ell, dtype=float)
        return ell / (2 * (ell + self.dim.eta))

    def upsilon0(self, ell):
        ell = np.asarray(ell, dtype=float)
        return 2 * self.dim.eta / (2 * (ell + self.dim.eta))

    def apply(self, r: FiniteSequence) -> FiniteSequence:
        n = r.values.size
        if n == 0:
            return r
        lo = max(0, r.offset - 1)
        hi = r.offset + n  # support grows by one on the right
        ells = np.arange(lo, hi + 1)
        # padded copy covering lo-1 .. hi+1; r_{-1} = 0
        ext = np.zeros(ells.size + 2)
        start = r.offset - lo + 1
        ext[start : start + n] = r.values
        prev, cur, nxt = ext[:-2], ext[1:-1], ext[2:]
        out = self.upsilon1(ells) * (nxt - 2 * cur + prev) + self.upsilon0(ells) * (nxt - cur)
        return FiniteSequence(lo, out)


def apply_upsilon(op: DifferenceOperator, r: FiniteSequence, N: int) -> FiniteSequence:
    """N-fold application of ``Upsilon_d``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    for _ in range(N):
        r = op.apply(r)
    return r


def _series(r: FiniteSequence, dim: SphereDim, t) -> np.ndarray:
    return _zonal_sum(r.values, r.ells, dim, t)


def verify_gegenbauer_identity(op: DifferenceOperator, r: FiniteSequence, N: int, theta_grid) -> float:
    """Max error of ``(cos t - 1)^N sum r_l Z_l = sum (Upsilon^N r)_l Z_l`` on the grid."""
    theta = np.asarray(theta_grid, dtype=float)
    x = np.cos(theta)
    lhs = (x - 1.0) ** N * _series(r, op.dim, x)
    rhs = _series(apply_upsilon(op, r, N), op.dim, x)
    return float(np.max(np.abs(lhs - rhs))) if theta.size else 0.0


def upsilon_window_bound(w: WindowFamily, dim: SphereDim, j: int, N: int) -> float:
    """``max_l |Upsilon^N b_j(l)| * min(S_{j-1}, S_j - S_{j-1})^{2N}``.

    Stays bounded in ``j`` when the window derivatives scale as assumed.
    """
    _check_kernel_band(w, j)
    ells, b = w.tabulated(j)
    r = FiniteSequence(int(ells[0]), b) if ells.size else FiniteSequence(0, np.zeros(0))
    out = apply_upsilon(DifferenceOperator(dim), r, N)
    s = w.scales
    scale = min(s.scale(j - 1), s.gap(j)) ** (2 * N)
    return float(np.max(np.abs(out.values), initial=0.0) * scale)


# ------------------------------------------------------------------- envelopes


def localization_envelope(s, j: int, d: int, M: int, theta):
    """``(S_{j+1}^d - S_{j-1}^d) max(S_{j-1}^{-2M}, (S_j - S_{j-1})^{-2M}) theta^{-2M}``."""
    theta = np.asarray(theta, dtype=float)
    lo, mid, hi = s.scale(j - 1), s.scale(j), s.scale(j + 1)
    amp = (hi**d - lo**d) * max(lo ** (-2 * M), (mid - lo) ** (-2 * M))
    return amp * theta ** (-2 * M)


def standard_localization_envelope(B: float, j: int, d: int, M: int, theta):
    """Geometric-scale form ``C' B^{jd} / (B^j theta)^{2M}`` with its explicit constant."""
    theta = np.asarray(theta, dtype=float)
    const = (B**d - B ** (-d)) * max(B ** (2 * M), (B / (B - 1)) ** (2 * M))
    return const * B ** (j * d) / (B**j * theta) ** (2 * M)


def uncorrelation_envelope(s, j: int, beta: float, N: int, theta):
    """``max((S_{j-1}^{1-beta} theta)^{-2N}, ((S_j - S_{j-1}) theta)^{-2N})``."""
    theta = np.asarray(theta, dtype=float)
    lo, gap = s.scale(j - 1), s.gap(j)
    with np.errstate(divide="ignore"):
        a = (lo ** (1 - beta) * theta) ** (-2.0 * N)
        b = (gap * theta) ** (-2.0 * N)
    return np.maximum(a, b)


@dataclass(frozen=True)
class LocalizationReport:
    j: int
    d: int
    M: int
    theta: np.ndarray
    value: np.ndarray
    envelope: np.ndarray
    ratio: np.ndarray

    def rows(self):
        for t, v, e, r in zip(self.theta, self.value, self.envelope, self.ratio):
            yield {"d": self.d, "j": self.j, "theta": t, "value": v, "envelope": e, "ratio": r}


def localization_report(w: WindowFamily, dim: SphereDim, j: int, M: int, theta_grid=None) -> LocalizationReport:
    """Tabulate ``|Psi_j(cos theta)|`` against the localization envelope.

    The ratio column is an empirical lower estimate of the constant ``C_M``.
    """
    if int(M) != M or M <= dim.d:
        raise ValueError(f"M must exceed d (got M={M}, d={dim.d})")
    theta = default_theta_grid() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    if np.any(theta <= 0) or np.any(theta > np.pi):
        raise ValueError("theta grid must lie in (0, pi]")
    value = np.abs(needlet_kernel(w, dim, j, np.cos(theta)))
    env = localization_envelope(w.scales, j, dim.d, int(M), theta)
    return LocalizationReport(j, dim.d, int(M), theta, value, env, value / env)
