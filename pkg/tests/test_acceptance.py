"""Acceptance checks, one test per criterion.

Each test records a ``PASS``/``FAIL`` line (with the measured quantities and
runtime) that the terminal summary prints; the test then asserts the verdict.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from flexneedlet.field import OscillatoryTerm, PowerSpectrum, empirical_needlet_correlations
from flexneedlet.gof import SubsampleSpec, simulate_gof
from flexneedlet.grid import analyze_all, parseval_ratio, synthesize
from flexneedlet.harmonics import S2, SphereDim, n_coeffs, unit_vectors
from flexneedlet.kernel import (
    DifferenceOperator,
    FiniteSequence,
    default_theta_grid,
    localization_report,
    needlet_correlation,
    needlet_kernel,
    verify_gegenbauer_identity,
)
from flexneedlet.scale import make_custom, make_geometric, support_interval
from flexneedlet.window import WindowFamily, bump_integral, check_partition_of_unity

RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
    verdict = ok and elapsed < budget
    timing = f"{elapsed:.2f}s" if math.isinf(budget) else f"{elapsed:.2f}s / {budget:g}s"
    RESULTS.append(f"criterion {n}: {'PASS' if verdict else 'FAIL'}  {detail}  [{timing}]")
    print(RESULTS[-1])
    return verdict


# ---------------------------------------------------------------- criterion 1


def test_criterion_1_window_axioms():
    t0 = time.perf_counter()
    families = {
        "B=1.5": make_geometric(1.5, 10),
        "B=2": make_geometric(2.0, 7),
        "custom": make_custom([1, 3, 6, 10, 15]),
    }
    worst_pou = worst_peak = 0.0
    disjoint = True
    for s in families.values():
        w = WindowFamily(s)
        u = np.linspace(1.0, w.l_cover, 1000)
        worst_pou = max(worst_pou, check_partition_of_unity(w, u))
        for j in range(w.n_bands):
            worst_peak = max(worst_peak, abs(w(j, s.scale(j)) - 1.0))
        dense = np.linspace(0.0, s.scale(s.j_max), 2001)
        vals = [w(j, dense) for j in range(w.n_bands)]
        for j in range(w.n_bands):
            for k in range(j + 2, w.n_bands):
                if support_interval(s, j)[1] > support_interval(s, k)[0]:
                    disjoint = False
                if np.any(vals[j] * vals[k] != 0):
                    disjoint = False
    elapsed = time.perf_counter() - t0
    ok = worst_pou < 1e-10 and worst_peak < 1e-12 and disjoint
    detail = f"max PoU dev {worst_pou:.2e} (<1e-10); max |b_j(S_j)-1| {worst_peak:.2e} (<1e-12); disjoint={disjoint}"
    assert record(1, ok, detail, elapsed, 5.0)


# ---------------------------------------------------------------- criterion 2


def test_criterion_2_bump_constant():
    bump_integral.cache_clear()
    t0 = time.perf_counter()
    c = bump_integral()
    elapsed = time.perf_counter() - t0
    assert record(2, 0.443 <= c <= 0.445, f"C_Phi = {c:.12f} (in [0.443, 0.445])", elapsed, 1.0)


# ---------------------------------------------------------------- criterion 3


def test_criterion_3_gegenbauer_identity():
    rng = np.random.default_rng(3)
    theta = default_theta_grid(64)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        offset = int(rng.integers(0, 20))
        r = FiniteSequence(offset, rng.normal(size=int(rng.integers(1, 21))))
        for d in (2, 3):
            op = DifferenceOperator(SphereDim(d))
            for N in (1, 2, 3):
                worst = max(worst, verify_gegenbauer_identity(op, r, N, theta))
    elapsed = time.perf_counter() - t0
    assert record(3, worst < 1e-9, f"max identity error {worst:.2e} over 50 seqs x N{{1,2,3}} x d{{2,3}} (<1e-9)", elapsed, 10.0)


# ---------------------------------------------------------------- criterion 4


def test_criterion_4_tight_frame():
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    w = WindowFamily(make_geometric(2.0, 6))
    worst_p = worst_r = 0.0
    for _ in range(20):
        a = rng.normal(size=n_coeffs(16))
        a[0] = 0.0
        worst_p = max(worst_p, abs(parseval_ratio(a, w) - 1))
        rec = synthesize(analyze_all(a, w), w, l_max=16)
        worst_r = max(worst_r, float(np.max(np.abs(rec - a))))
    elapsed = time.perf_counter() - t0
    ok = worst_p < 1e-9 and worst_r < 1e-9
    assert record(4, ok, f"max |parseval-1| {worst_p:.2e}; max round-trip error {worst_r:.2e} (both <1e-9)", elapsed, 30.0)


# ---------------------------------------------------------------- criterion 5


def test_criterion_5_localization():
    t0 = time.perf_counter()
    w = WindowFamily(make_geometric(2.0, 6))
    ratios = {j: float(np.max(localization_report(w, S2, j, 3).ratio)) for j in (3, 4, 5)}
    spread = max(ratios.values()) / min(ratios.values())
    s4 = w.scales.scale(4)
    near = abs(needlet_kernel(w, S2, 4, math.cos(2.0 / s4)))
    far = abs(needlet_kernel(w, S2, 4, math.cos(math.pi / 2)))
    decay = near / far
    elapsed = time.perf_counter() - t0
    ok = spread < 2.0 and decay >= 1e4
    detail = (
        "max ratio j=3,4,5: " + ", ".join(f"{ratios[j]:.3g}" for j in (3, 4, 5))
        + f"; spread {spread:.3g} (<2); j=4 decay |Psi(2/S_j)|/|Psi(pi/2)| = {decay:.3g} (>=1e4)"
    )
    assert record(5, ok, detail, elapsed, 30.0)


# ---------------------------------------------------------------- criterion 6


def _mc_rows(spec, w, js, thetas, seed):
    x = np.array([0.0, 0.0, 1.0])
    ys = unit_vectors(thetas, np.zeros_like(thetas))
    worst = 0.0
    for j in js:
        analytic = needlet_correlation(w, S2, spec, j, thetas)
        est, se = empirical_needlet_correlations(spec, w, j, x, ys, 2000, seed)
        z = np.abs(est - analytic) / np.where(se > 0, se, np.inf)
        worst = max(worst, float(np.max(z)))
    return worst


def test_criterion_6_uncorrelation():
    t0 = time.perf_counter()
    w = WindowFamily(make_geometric(2.0, 6))
    js = [2, 3, 4, 5]
    power = PowerSpectrum.power_law(3.0)
    corr = [float(needlet_correlation(w, S2, power, j, 0.4)) for j in js]
    mags = np.abs(corr)
    monotone = bool(np.all(np.diff(mags) < 0))
    small = mags[-1] < 0.05
    thetas = np.array([0.2, 0.4, 0.8])
    z_power = _mc_rows(power, w, js, thetas, seed=600)

    osc = PowerSpectrum.oscillatory(3.0, [OscillatoryTerm(1.0, 2.0, 1.0, 0.5)])
    corr_osc = [float(needlet_correlation(w, S2, osc, j, 0.4)) for j in js]
    osc_monotone = bool(np.all(np.diff(np.abs(corr_osc)) < 0))
    z_osc = _mc_rows(osc, w, js, thetas, seed=601)
    elapsed = time.perf_counter() - t0
    ok = monotone and small and z_power <= 3 and osc_monotone
    detail = (
        "corr(0.4) j=2..5: " + ", ".join(f"{c:.4f}" for c in corr)
        + f"; |corr| decreasing={monotone}, |corr_5|<0.05={small}; max MC z {z_power:.2f} (<=3)"
        + "; oscillatory corr: " + ", ".join(f"{c:.4f}" for c in corr_osc)
        + f", |corr| decreasing={osc_monotone} (MC max z {z_osc:.2f})"
    )
    assert record(6, ok, detail, elapsed, 300.0)


# ---------------------------------------------------------------- criterion 7


def test_criterion_7_goodness_of_fit():
    t0 = time.perf_counter()
    w = WindowFamily(make_geometric(2.0, 6))
    true = PowerSpectrum.power_law(3.0)
    sub = SubsampleSpec(2.0, 0.1)
    null = simulate_gof(true, true, w, 4, sub, 2000, 700).moments
    mean_ok = abs(null.mean) < 3 * null.se_mean
    var_ok = 0.85 <= null.variance <= 1.15
    trend = []
    for seed in (0, 1, 2):
        k3 = simulate_gof(true, true, w, 3, sub, 2000, seed).moments.excess_kurtosis
        k5 = simulate_gof(true, true, w, 5, sub, 2000, seed).moments.excess_kurtosis
        trend.append((k3, k5, abs(k5) <= abs(k3)))
    trend_ok = sum(t[2] for t in trend) >= 2
    wrong = simulate_gof(true, PowerSpectrum.power_law(3.5), w, 5, sub, 2000, 701).moments
    power_ok = abs(wrong.mean) > 3
    elapsed = time.perf_counter() - t0
    ok = mean_ok and var_ok and trend_ok and power_ok
    detail = (
        f"j=4 null mean {null.mean:.4f} (SE {null.se_mean:.4f}), var {null.variance:.4f} in [0.85,1.15]"
        + "; kurt (j=3, j=5) per seed: " + ", ".join(f"({a:.3f}, {b:.3f})" for a, b, _ in trend)
        + f" -> {sum(t[2] for t in trend)}/3 seeds; mismatch alpha+0.5 at j=5 mean {wrong.mean:.2f} (|.|>3)"
    )
    assert record(7, ok, detail, elapsed, 600.0)


# ---------------------------------------------------------------- criterion 8

CLI_CASES = [
    ("windows", "bandwidth = 2\nj_max = 5\n", "csv"),
    ("windows", "scales = 1, 3, 6, 10\n", "json"),
    ("localization", "M = 3\nj = 3, 4, 5\n", "csv"),
    ("localization", "dim = 3\nM = 4\n", "json"),
    ("uncorrelation", "j = 2, 3\ntheta = 0, 0.4\nn_reps = 300\n", "csv"),
    ("uncorrelation", "spectrum = oscillatory\nosc_c = 1\nosc_d = 2\nosc_M = 1\nosc_beta = 0.5\nj = 3\nn_reps = 300\n", "json"),
    ("gof", "j = 3, 4\nn_reps = 300\n", "json"),
    ("gof", "j = 3\nn_reps = 300\nnull_alpha = 3.5\n", "csv"),
]


def _cli_bytes(tmp_path, idx, command, cfg, fmt, attempt):
    cfg_path = tmp_path / f"case{idx}.cfg"
    cfg_path.write_text(cfg)
    out = tmp_path / f"case{idx}-{attempt}.{fmt}"
    proc = subprocess.run(
        [sys.executable, "-m", "flexneedlet.cli", command, "--config", str(cfg_path),
         "--seed", "1234", "--threads", "1", "--format", fmt, "--out", str(out)],
        capture_output=True,
    )
    return proc.returncode, out.read_bytes() if out.exists() else b""


def test_criterion_8_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    same, failures = 0, []
    for i, (command, cfg, fmt) in enumerate(CLI_CASES):
        a = _cli_bytes(tmp_path, i, command, cfg, fmt, 0)
        b = _cli_bytes(tmp_path, i, command, cfg, fmt, 1)
        if a[0] == 0 and a == b and a[1]:
            same += 1
        else:
            failures.append(command)
    elapsed = time.perf_counter() - t0
    detail = f"{same}/{len(CLI_CASES)} command runs byte-identical across fresh processes"
    if failures:
        detail += f" (differing: {', '.join(failures)})"
    assert record(8, same == len(CLI_CASES), detail, elapsed, math.inf)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
