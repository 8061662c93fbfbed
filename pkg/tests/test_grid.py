import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flexneedlet.grid import (
    NeedletCoefficients,
    analyze,
    analyze_all,
    band_limit,
    beta_field,
    build_cubature,
    geodesic_distance,
    min_separation,
    parseval_ratio,
    scale_grid,
    synthesize,
)
from flexneedlet.harmonics import lm_index, n_coeffs, real_harmonics


def random_alm(rng, L, batch=()):
    a = rng.normal(size=batch + (n_coeffs(L),))
    a[..., 0] = 0.0
    return a


def test_weights_and_points():
    for L in (0, 3, 8, 20):
        g = build_cubature(L)
        assert abs(g.weights.sum() - 4 * math.pi) < 1e-10
        assert np.max(np.abs(np.linalg.norm(g.points, axis=1) - 1)) < 1e-14
        assert g.n_rings == L + 1 and g.size == (L + 1) * (2 * L + 1)
        assert np.all(g.weights > 0)


def test_constants_integrated_exactly():
    g = build_cubature(0)
    assert g.weights.sum() == pytest.approx(4 * math.pi, rel=1e-15)


@pytest.mark.parametrize("L", [3, 8])
def test_discrete_orthonormality(L):
    g = build_cubature(L)
    Y = real_harmonics(L, g.theta, g.phi)
    gram = (Y * g.weights[:, None]).T @ Y
    assert np.max(np.abs(gram - np.eye(n_coeffs(L)))) < 1e-10


def test_grid_is_cached_and_readonly():
    assert build_cubature(12) is build_cubature(12)
    with pytest.raises(ValueError):
        build_cubature(12).weights[0] = 1.0
    with pytest.raises(ValueError):
        build_cubature(-1)


def test_separation_scaling():
    # ring spacing is ~1/L; the longitude spacing on the polar rings makes the
    # minimum pairwise distance ~1/L^2
    for L in (4, 8, 16, 32, 64):
        g = build_cubature(L)
        ring = np.min(np.diff(np.unique(g.theta)))
        assert 0.5 <= ring * L <= 6
        assert 2 <= min_separation(g) * L * L <= 10


def test_geodesic_distance(rng):
    x = rng.normal(size=(20, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = np.roll(x, 1, axis=0)
    assert np.all(geodesic_distance(x, x) == 0)
    assert np.allclose(geodesic_distance(x, y), geodesic_distance(y, x), atol=0)
    assert np.max(np.abs(geodesic_distance(x, -x) - math.pi)) < 1e-14


def test_band_limit():
    assert band_limit(np.zeros(25)) == 4
    with pytest.raises(ValueError):
        band_limit(np.zeros(24))


def test_analyze_single_harmonic(w2):
    # b_2(4) = 1: a single Y_{4,m} passes unchanged at band 2
    j, ell, m = 2, 4, 3
    a = np.zeros(n_coeffs(8))
    a[lm_index(ell, m)] = 1.0
    g = scale_grid(w2, j)
    beta = analyze(a, w2, j)
    Y = real_harmonics(ell, g.theta, g.phi, l_min=ell)[:, m - 1]
    assert np.allclose(beta, np.sqrt(g.weights) * Y, atol=1e-14)
    # l = 4 lies outside the open support of band 4, (8, 32)
    assert np.all(analyze(np.pad(a, (0, n_coeffs(31) - a.size)), w2, 4) == 0)


def test_analyze_zero_and_errors(w2):
    assert np.all(analyze(np.zeros(n_coeffs(16)), w2, 3) == 0)
    with pytest.raises(ValueError, match="exceeds grid exactness"):
        analyze(np.ones(n_coeffs(16)), w2, 3, grid=build_cubature(8))


def test_analyze_linear(w2, rng):
    a, b = random_alm(rng, 16), random_alm(rng, 16)
    for j in (1, 3):
        lhs = analyze(a + 2.5 * b, w2, j)
        rhs = analyze(a, w2, j) + 2.5 * analyze(b, w2, j)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_batch_and_indices(w2, rng):
    a = random_alm(rng, 16, (3,))
    full = analyze(a, w2, 3)
    assert full.shape == (3, scale_grid(w2, 3).size)
    assert np.allclose(full[1], analyze(a[1], w2, 3))
    idx = np.array([5, 0, 77])
    assert np.allclose(analyze(a, w2, 3, indices=idx), full[:, idx])


def test_continuous_discrete_consistency(w2, rng):
    a = random_alm(rng, 16)
    g = scale_grid(w2, 3)
    beta = analyze(a, w2, 3)
    direct = np.sqrt(g.weights) * beta_field(a, w2, 3, g.points)
    assert np.max(np.abs(beta - direct)) < 1e-10


def test_roundtrip_and_parseval(w2, rng):
    for _ in range(5):
        a = random_alm(rng, 16)
        rec = synthesize(analyze_all(a, w2), w2, l_max=16)
        assert np.max(np.abs(rec - a)) < 1e-9
        assert abs(parseval_ratio(a, w2) - 1) < 1e-9


def test_single_band_truncation(w2, rng):
    a = random_alm(rng, 16)
    keep = analyze_all(a, w2, bands=[3])
    rec = synthesize(keep, w2, l_max=16)
    b2 = w2.at_multipoles(3, 16) ** 2
    deg = np.floor(np.sqrt(np.arange(a.size))).astype(int)
    assert np.max(np.abs(rec - b2[deg] * a)) < 1e-12


def test_synthesize_zero_and_mismatch(w2):
    z = analyze_all(np.zeros(n_coeffs(8)), w2)
    assert np.all(synthesize(z, w2) == 0)
    with pytest.raises(ValueError):
        NeedletCoefficients({1: np.zeros(3)}, {1: scale_grid(w2, 1)})


def test_parseval_single_harmonic_and_errors(w2):
    a = np.zeros(n_coeffs(16))
    a[lm_index(11, 4)] = 3.0
    assert abs(parseval_ratio(a, w2) - 1) < 1e-12
    assert abs(parseval_ratio(7 * a, w2) - parseval_ratio(a, w2)) < 1e-12
    with pytest.raises(ZeroDivisionError):
        parseval_ratio(np.zeros(n_coeffs(4)), w2)
    with pytest.raises(ValueError):
        parseval_ratio(np.ones(n_coeffs(40)), w2)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_parseval_property(L, seed):
    from flexneedlet import WindowFamily, make_geometric

    w = WindowFamily(make_geometric(2.0, 6))
    a = random_alm(np.random.default_rng(seed), L)
    if not np.any(a):
        return
    assert abs(parseval_ratio(a, w) - 1) < 1e-9
