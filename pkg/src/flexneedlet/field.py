"""Angular power spectra and isotropic Gaussian random fields on S^2.

Random draws come from counter-based Philox streams: one key per
``(seed, replication)`` and one disjoint counter block per multipole, so any
coefficient ``a_lm`` is reproducible independently of ``l_max``, of the number
of replications and of how the work is split across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import beta_field
from .harmonics import n_coeffs, real_harmonics, to_angles
from .stats import correlation_with_se
from .window import WindowFamily

__all__ = [
    "OscillatoryTerm",
    "PowerSpectrum",
    "spectrum_eval",
    "SeedRecord",
    "HarmonicSample",
    "harmonic_stream",
    "sample_harmonics",
    "sample_harmonics_batch",
    "synthesize_field",
    "empirical_needlet_correlation",
    "empirical_needlet_correlations",
]


@dataclass(frozen=True)
class OscillatoryTerm:
    """One summand ``c (d + sin(u^beta / M))`` of the modulation ``g``."""

    c: float
    d: float
    M: float
    beta: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("oscillatory term needs c > 0")
        if not self.d > 1:
            raise ValueError("oscillatory term needs d > 1 (keeps g bounded away from 0)")
        if not self.M > 0:
            raise ValueError("oscillatory term needs M > 0")
        if not 0 < self.beta < 1:
            raise ValueError("oscillatory term needs 0 < beta < 1")


@dataclass(frozen=True)
class PowerSpectrum:
    """``C_l = l^{-alpha} g(l)`` with ``g`` constant or a sum of oscillatory terms."""

    alpha: float
    model: str = "power_law"
    g0: float = 1.0
    terms: tuple[OscillatoryTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValueError(f"alpha must exceed 2, got {self.alpha!r}")
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.model == "power_law":
            if not self.g0 > 0:
                raise ValueError("power_law model needs g0 > 0")
            if self.terms:
                raise ValueError("power_law model takes no oscillatory terms")
        elif self.model == "oscillatory":
            if not self.terms:
                raise ValueError("oscillatory model needs at least one term")
        else:
            raise ValueError(f"unknown spectrum model {self.model!r}")

    @classmethod
    def power_law(cls, alpha: float, g0: float = 1.0) -> "PowerSpectrum":
        return cls(alpha, "power_law", g0)

    @classmethod
    def oscillatory(cls, alpha: float, terms) -> "PowerSpectrum":
        return cls(alpha, "oscillatory", 1.0, tuple(terms))

    @property
    def beta_effective(self) -> float:
        """Regularity exponent: 0 for the power law, the largest term exponent otherwise."""
        return max((t.beta for t in self.terms), default=0.0)

    @property
    def g_bounds(self) -> tuple[float, float]:
        if self.model == "power_law":
            return self.g0, self.g0
        return sum(t.c * (t.d - 1) for t in self.terms), sum(t.c * (t.d + 1) for t in self.terms)

    def modulation(self, u):
        u = np.asarray(u, dtype=float)
        if self.model == "power_law":
            return np.full(u.shape, self.g0)[()]
        return sum(t.c * (t.d + np.sin(u**t.beta / t.M)) for t in self.terms)

    def __call__(self, ell):
        return spectrum_eval(self, ell)


def spectrum_eval(spec: PowerSpectrum, ell):
    """Spectrum value(s) at multipole(s) ``ell >= 1``."""
    ell = np.asarray(ell)
    if np.any(ell < 1):
        raise ValueError("spectrum is defined for l >= 1 only")
    u = ell.astype(float)
    return spec.modulation(u) * u ** (-spec.alpha)


# --------------------------------------------------------------------- sampling


@dataclass(frozen=True)
class SeedRecord:
    seed: int
    replication: int


@dataclass(frozen=True, eq=False)
class HarmonicSample:
    """Real-basis coefficients ``a_lm`` for ``1 <= l <= l_max`` (flat layout, monopole slot zero)."""

    l_max: int
    coefficients: np.ndarray
    seed: SeedRecord


def _replication_key(seed: int, rep: int) -> np.ndarray:
    return np.random.SeedSequence(int(seed), spawn_key=(int(rep),)).generate_state(2, np.uint64)


def harmonic_stream(seed: int, rep: int, ell: int, _key=None) -> np.random.Generator:
    """Independent generator for multipole ``ell`` of replication ``rep``."""
    key = _replication_key(seed, rep) if _key is None else _key
    counter = np.array([0, 0, 0, ell], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def _draw(std: np.ndarray, l_max: int, seed: int, rep: int) -> np.ndarray:
    out = np.zeros(n_coeffs(l_max))
    key = _replication_key(seed, rep)
    for ell in range(1, l_max + 1):
        z = harmonic_stream(seed, rep, ell, key).standard_normal(2 * ell + 1)
        out[ell * ell : (ell + 1) ** 2] = std[ell] * z
    return out


def _std_table(spec, l_max: int) -> np.ndarray:
    std = np.zeros(l_max + 1)
    if l_max >= 1:
        ells = np.arange(1, l_max + 1)
        cl = np.asarray(spec(ells), dtype=float)
        if np.any(cl < 0):
            raise ValueError("negative spectrum value")
        std[1:] = np.sqrt(cl)
    return std


def sample_harmonics(spec, l_max: int, rng_seed: int, replication: int = 0) -> HarmonicSample:
    """Independent ``a_lm ~ N(0, C_l)`` in the real basis; deterministic given the seed."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    coef = _draw(_std_table(spec, l_max), l_max, rng_seed, replication)
    coef.setflags(write=False)
    return HarmonicSample(l_max, coef, SeedRecord(int(rng_seed), int(replication)))


def sample_harmonics_batch(spec, l_max: int, rng_seed: int, n_reps: int, start: int = 0, threads: int = 1) -> np.ndarray:
    """Coefficient matrix ``(n_reps, (l_max+1)^2)`` for replications ``start .. start+n_reps-1``.

    Row ``i`` equals ``sample_harmonics(spec, l_max, rng_seed, start + i).coefficients``
    whatever the thread count.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    std = _std_table(spec, l_max)
    out = np.empty((n_reps, n_coeffs(l_max)))

    def fill(i):
        out[i] = _draw(std, l_max, rng_seed, start + i)

    if threads <= 1:
        for i in range(n_reps):
            fill(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(n_reps)))
    return out


def synthesize_field(h: HarmonicSample, points) -> np.ndarray:
    """Field values ``f(x) = sum_{l,m} a_lm Y_lm(x)`` at unit vectors."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(np.abs(np.linalg.norm(pts, axis=-1) - 1) > 1e-10):
        raise ValueError("points must be unit vectors")
    theta, phi = to_angles(pts)
    coef = h.coefficients if isinstance(h, HarmonicSample) else np.asarray(h, dtype=float)
    l_max = h.l_max if isinstance(h, HarmonicSample) else int(np.sqrt(coef.shape[-1])) - 1
    return coef @ real_harmonics(l_max, theta, phi).T


def _band_top(w: WindowFamily, j: int) -> int:
    ells = w.multipoles(j)
    if ells.size == 0:
        raise ZeroDivisionError(f"band {j} has no multipoles")
    return int(ells[-1])


def empirical_needlet_correlations(spec, w: WindowFamily, j: int, x, ys, n_reps: int, rng_seed: int, threads: int = 1):
    """Monte-Carlo ``Corr(beta_j(x), beta_j(y))`` for each ``y`` with jackknife errors.

    All targets reuse the same field draws; returns ``(estimates, standard_errors)``.
    """
    if n_reps < 100:
        raise ValueError("n_reps must be >= 100")
    x = np.asarray(x, dtype=float)
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    alm = sample_harmonics_batch(spec, _band_top(w, j), rng_seed, n_reps, threads=threads)
    vals = beta_field(alm, w, j, np.vstack([x[None], ys]))
    est, se = correlation_with_se(vals[:, 0], vals[:, 1:])
    same = np.all(ys == x, axis=1)
    est = np.where(same, 1.0, est)
    se = np.where(same, 0.0, se)
    return est, se


def empirical_needlet_correlation(spec, w: WindowFamily, j: int, x, y, n_reps: int, rng_seed: int, threads: int = 1):
    """Monte-Carlo oracle for the analytic needlet correlation at one pair of points."""
    est, se = empirical_needlet_correlations(spec, w, j, x, [y], n_reps, rng_seed, threads)
    return float(est[0]), float(se[0])
