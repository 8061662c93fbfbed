"""Gegenbauer polynomials, zonal kernels and real spherical harmonics.

Harmonic coefficient arrays for ``S^2`` use a flat real-basis layout: the
coefficient of ``Y_{l,m}`` (``m = 1..2l+1``) sits at index ``l*l + m - 1``, so a
band limit ``L`` needs ``(L + 1)**2`` slots. Within a degree, ``m`` maps to the
signed order ``mu = m - l - 1``; ``mu > 0`` are cosine and ``mu < 0`` sine modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gamma, pi, sqrt

import numpy as np
from scipy import special

__all__ = [
    "SphereDim",
    "ZonalTable",
    "gegenbauer",
    "gegenbauer_table",
    "zonal",
    "zonal_table",
    "dimension",
    "spherical_harmonic",
    "real_harmonics",
    "lm_index",
    "n_coeffs",
    "degree_of_index",
    "unit_vectors",
    "to_angles",
]

_T_SLACK = 1e-12


@dataclass(frozen=True)
class SphereDim:
    """Sphere ``S^d`` embedded in ``R^{d+1}``."""

    d: int
    eta: float = field(init=False)
    omega: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"sphere dimension d must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "eta", (self.d - 1) / 2)
        object.__setattr__(self, "omega", 2 * pi ** ((self.d + 1) / 2) / gamma((self.d + 1) / 2))


S2 = SphereDim(2)


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _T_SLACK) or np.any(~np.isfinite(t)):
        raise ValueError("argument t must lie in [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def gegenbauer_table(l_max: int, eta: float, t) -> np.ndarray:
    """``G_l^{(eta)}(t)`` for ``l = 0..l_max``; shape ``(l_max + 1, *t.shape)``."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    t = _check_t(t)
    out = np.empty((l_max + 1,) + t.shape)
    out[0] = 1.0
    if l_max >= 1:
        out[1] = 2 * eta * t
    for ell in range(2, l_max + 1):
        out[ell] = (2 * t * (ell + eta - 1) * out[ell - 1] - (ell + 2 * eta - 2) * out[ell - 2]) / ell
    return out


def gegenbauer(ell: int, eta: float, t):
    """Gegenbauer polynomial via the three-term recurrence."""
    if ell < 0:
        raise ValueError("degree must be non-negative")
    val = gegenbauer_table(ell, eta, t)[ell]
    return val[()] if np.ndim(val) == 0 else val


def _zonal_scale(ells, dim: SphereDim):
    return (np.asarray(ells, dtype=float) + dim.eta) / (dim.eta * dim.omega)


def zonal(ell: int, dim: SphereDim, t):
    """Zonal kernel ``Z_{l;d}(t) = (l + eta)/(eta omega) G_l^{(eta)}(t)``."""
    return _zonal_scale(ell, dim) * gegenbauer(ell, dim.eta, t)


@dataclass(frozen=True)
class ZonalTable:
    dim: SphereDim
    l_max: int
    t: np.ndarray
    values: np.ndarray  # (l_max + 1, len(t))


def zonal_table(l_max: int, dim: SphereDim, t) -> ZonalTable:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = gegenbauer_table(l_max, dim.eta, t)
    vals = _zonal_scale(np.arange(l_max + 1), dim)[:, None] * g
    vals.setflags(write=False)
    return ZonalTable(dim, l_max, t, vals)


def dimension(ell: int, dim: SphereDim) -> int:
    """Exact dimension ``N_{l;d}`` of the degree-``l`` harmonic space."""
    if ell < 0:
        raise ValueError("degree must be non-negative")
    d = dim.d
    # N = (2l + d - 1)/(d - 1) * C(l + d - 2, l); the division is exact
    return (2 * ell + d - 1) * comb(ell + d - 2, ell) // (d - 1)


def gegenbauer_at_one(ell: int, eta: float) -> float:
    """Closed form ``G_l^{(eta)}(1) = C(l + 2 eta - 1, l)``."""
    return float(special.binom(ell + 2 * eta - 1, ell))


# ---------------------------------------------------------------- S^2 harmonics


def n_coeffs(l_max: int) -> int:
    return (l_max + 1) ** 2


def lm_index(ell: int, m: int) -> int:
    if not 1 <= m <= 2 * ell + 1:
        raise IndexError(f"real-basis index m={m} outside [1, {2 * ell + 1}] for l={ell}")
    return ell * ell + m - 1


def degree_of_index(n: int) -> np.ndarray:
    """Degree ``l`` of every flat slot ``0..n-1``."""
    idx = np.arange(n)
    return np.floor(np.sqrt(idx)).astype(int)


def unit_vectors(theta, phi) -> np.ndarray:
    """Unit vectors for colatitude ``theta`` and longitude ``phi``; shape ``(..., 3)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def to_angles(points) -> tuple[np.ndarray, np.ndarray]:
    """Colatitude and longitude (in ``[0, 2 pi)``) of unit vectors."""
    p = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(p[..., 1], p[..., 0]), 2 * pi)
    return theta, phi


def _normalized_legendre(l_max: int, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre functions, ``out[l, m]`` for ``m <= l``.

    ``out[l, m] = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x)`` without the
    Condon-Shortley phase. Normalization is carried in the recurrence so no
    factorials are formed.
    """
    out = np.zeros((l_max + 1, l_max + 1) + x.shape)
    pmm = np.full(x.shape, sqrt(1 / (4 * pi)))
    for m in range(l_max + 1):
        if m > 0:
            pmm = pmm * sqrt((2 * m + 1) / (2 * m)) * s
        out[m, m] = pmm
        if m + 1 <= l_max:
            out[m + 1, m] = sqrt(2 * m + 3) * x * pmm
        for ell in range(m + 2, l_max + 1):
            a = sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            b = sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
            out[ell, m] = a * (x * out[ell - 1, m] - b * out[ell - 2, m])
    return out


def real_harmonics(l_max: int, theta, phi, l_min: int = 0) -> np.ndarray:
    """Real orthonormal harmonics at points, shape ``(npts, (l_max+1)^2 - l_min^2)``.

    Column ``c`` corresponds to flat index ``l_min**2 + c``.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if l_max < l_min:
        return np.zeros((theta.size, 0))
    x, s = np.cos(theta), np.sin(theta)
    plm = _normalized_legendre(l_max, x, s)
    mus = np.arange(1, l_max + 1)
    cos_m = np.cos(np.outer(mus, phi))
    sin_m = np.sin(np.outer(mus, phi))
    out = np.empty((theta.size, n_coeffs(l_max) - l_min * l_min))
    col = 0
    root2 = sqrt(2.0)
    for ell in range(l_min, l_max + 1):
        for mu in range(-ell, ell + 1):
            if mu == 0:
                out[:, col] = plm[ell, 0]
            elif mu > 0:
                out[:, col] = root2 * plm[ell, mu] * cos_m[mu - 1]
            else:
                out[:, col] = root2 * plm[ell, -mu] * sin_m[-mu - 1]
            col += 1
    return out


def spherical_harmonic(ell: int, m: int, theta: float, phi: float) -> float:
    """Real orthonormal ``Y_{l,m}`` at colatitude ``theta``, longitude ``phi``."""
    if ell < 0:
        raise IndexError("degree must be non-negative")
    lm_index(ell, m)
    if not 0 <= theta <= pi:
        raise ValueError("colatitude must lie in [0, pi]")
    return float(real_harmonics(ell, theta, phi, l_min=ell)[0, m - 1])
