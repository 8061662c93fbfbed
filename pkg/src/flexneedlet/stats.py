"""Leave-one-out jackknife helpers for Monte-Carlo summaries."""

from __future__ import annotations

import numpy as np


def jackknife_se(loo) -> np.ndarray:
    """Standard error from leave-one-out replicates along axis 0."""
    loo = np.asarray(loo, dtype=float)
    n = loo.shape[0]
    dev = loo - loo.mean(axis=0)
    return np.sqrt((n - 1) / n * np.sum(dev * dev, axis=0))


def correlation_with_se(a, b):
    """Pearson correlation of paired samples (axis 0) and its jackknife error.

    ``b`` may carry trailing columns; each is correlated with ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        est, se = correlation_with_se(a, b[:, None])
        return float(est[0]), float(se[0])
    n = a.shape[0]
    a = a - a.mean()
    b = b - b.mean(axis=0)
    saa, sbb = np.sum(a * a), np.sum(b * b, axis=0)
    sab = a @ b
    if saa <= 0 or np.any(sbb <= 0):
        raise ZeroDivisionError("degenerate variance in correlation estimate")
    est = sab / np.sqrt(saa * sbb)
    # leave-one-out moments from the full-sample sums
    m = n - 1
    sa_l = -a  # sum of centred a without sample i
    sb_l = -b
    saa_l = saa - a * a - sa_l * sa_l / m
    sbb_l = sbb - b * b - sb_l * sb_l / m
    sab_l = sab - a[:, None] * b - sa_l[:, None] * sb_l / m
    loo = sab_l / np.sqrt(saa_l[:, None] * sbb_l)
    return np.clip(est, -1.0, 1.0), jackknife_se(loo)


def central_moments(x) -> tuple[float, float, float, float]:
    """Mean, variance (1/n), skewness and excess kurtosis (moment estimators)."""
    x = np.asarray(x, dtype=float)
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d**2)
    if m2 <= 0:
        raise ZeroDivisionError("zero variance: higher moments undefined")
    return float(mean), float(m2), float(np.mean(d**3) / m2**1.5), float(np.mean(d**4) / m2**2 - 3.0)


def loo_moments(x) -> np.ndarray:
    """Leave-one-out ``(mean, var, skew, kurt)``; shape ``(n, 4)``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    x = x - x.mean()
    p = [np.sum(x**k) for k in range(1, 5)]
    m = n - 1
    s1 = p[0] - x
    s2 = p[1] - x**2
    s3 = p[2] - x**3
    s4 = p[3] - x**4
    mu = s1 / m
    c2 = s2 / m - mu**2
    c3 = s3 / m - 3 * mu * s2 / m + 2 * mu**3
    c4 = s4 / m - 4 * mu * s3 / m + 6 * mu**2 * s2 / m - 3 * mu**4
    return np.column_stack([mu, c2, c3 / c2**1.5, c4 / c2**2 - 3.0])
