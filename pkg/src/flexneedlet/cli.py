"""Command-line driver: ``flexneedlet {windows,localization,uncorrelation,gof}``.

Runs are configured by a plain ``key = value`` file (``#`` starts a comment).
Every command is deterministic for a fixed config, seed and thread count.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from . import io as fio
from .field import OscillatoryTerm, PowerSpectrum, empirical_needlet_correlations
from .gof import SphericalCap, SubsampleSpec, simulate_gof
from .harmonics import SphereDim, unit_vectors
from .kernel import default_theta_grid, localization_report, needlet_correlation, uncorrelation_envelope
from .scale import make_custom, make_geometric
from .window import WindowFamily, check_partition_of_unity

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


def _floats(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _ints(text):
    out = []
    for x in text.replace(",", " ").split():
        v = float(x)
        if v != int(v):
            raise ValueError(f"{x!r} is not an integer")
        out.append(int(v))
    return out


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


# key -> (parser, default, help)
KEYS = {
    "bandwidth": (float, 2.0, "geometric scale ratio B > 1"),
    "j_max": (int, 6, "number of geometric scales after S_0 (S_j = B^j, j <= j_max)"),
    "scales": (_floats, None, "explicit scale list; overrides bandwidth/j_max"),
    "dim": (int, 2, "sphere dimension d (kernels only; fields live on S^2)"),
    "spectrum": (str, "power_law", "power_law | oscillatory"),
    "alpha": (float, 3.0, "spectral decay exponent > 2"),
    "g0": (float, 1.0, "power-law amplitude"),
    "osc_c": (_floats, None, "oscillatory amplitudes c_p"),
    "osc_d": (_floats, None, "oscillatory offsets d_p > 1"),
    "osc_M": (_floats, None, "oscillatory periods M_p > 0"),
    "osc_beta": (_floats, None, "oscillatory exponents beta_p in (0, 1)"),
    "null_alpha": (float, None, "hypothesized alpha for gof (default: alpha)"),
    "null_g0": (float, None, "hypothesized amplitude for gof (default: g0)"),
    "j": (_ints, None, "bands to process"),
    "theta": (_floats, None, "angles in radians"),
    "M": (int, 3, "localization order M > d"),
    "N": (int, 1, "uncorrelation envelope order"),
    "n_reps": (int, 2000, "Monte-Carlo replications"),
    "delta": (float, 2.0, "subsample distance constant"),
    "epsilon": (float, 0.1, "subsample distance exponent slack"),
    "beta": (float, None, "regularity used by the subsample threshold (default: spectrum's)"),
    "cap_center": (_floats, None, "optional observed cap centre (x, y, z)"),
    "cap_radius": (float, None, "optional observed cap radius in radians"),
    "n_u": (int, 1000, "window table resolution"),
    "emit_replications": (_bool, False, "gof: also emit one record per replication"),
    "seed": (int, 0, "unsigned 64-bit seed (overridden by --seed)"),
}

COMMAND_DEFAULTS = {
    "windows": {},
    "localization": {"j": [3, 4, 5]},
    "uncorrelation": {"j": [2, 3, 4, 5], "theta": [0.0, 0.2, 0.4, 0.8]},
    "gof": {"j": [4]},
}


@dataclass
class Config:
    values: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    source: str = "<defaults>"

    def get(self, key, command=None):
        if key in self.values:
            return self.values[key]
        if command and key in COMMAND_DEFAULTS[command]:
            return COMMAND_DEFAULTS[command][key]
        return KEYS[key][1]

    def where(self, *keys) -> str:
        for k in keys:
            if k in self.lines:
                return f"{self.source}:{self.lines[k]}: "
        return f"{self.source}: "


def parse_config(text: str, source: str = "<config>") -> Config:
    cfg = Config(source=source)
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw.strip()!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        if key in cfg.values:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r}")
        try:
            cfg.values[key] = KEYS[key][0](val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{n}: bad value for {key!r}: {exc}") from None
        cfg.lines[key] = n
    return cfg


def _checked(cfg: Config, keys, build):
    try:
        return build()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{cfg.where(*keys)}{exc}") from None


def build_scales(cfg: Config):
    if cfg.get("scales") is not None:
        return _checked(cfg, ["scales"], lambda: make_custom(cfg.get("scales")))
    return _checked(cfg, ["bandwidth", "j_max"], lambda: make_geometric(cfg.get("bandwidth"), cfg.get("j_max")))


def build_spectrum(cfg: Config, alpha_key="alpha", g0_key="g0") -> PowerSpectrum:
    alpha = cfg.get(alpha_key)
    alpha = cfg.get("alpha") if alpha is None else alpha
    g0 = cfg.get(g0_key)
    g0 = cfg.get("g0") if g0 is None else g0
    model = cfg.get("spectrum")
    keys = ["spectrum", alpha_key, "alpha"]

    def make():
        if model == "oscillatory":
            lists = [cfg.get(k) for k in ("osc_c", "osc_d", "osc_M", "osc_beta")]
            if any(x is None for x in lists) or len({len(x) for x in lists}) != 1:
                raise ValueError("oscillatory spectrum needs osc_c, osc_d, osc_M, osc_beta of equal length")
            return PowerSpectrum.oscillatory(alpha, [OscillatoryTerm(*t) for t in zip(*lists)])
        return PowerSpectrum(alpha, model, g0)

    return _checked(cfg, keys + ["osc_c"], make)


def _dim(cfg):
    return _checked(cfg, ["dim"], lambda: SphereDim(cfg.get("dim")))


def _bands(cfg, w, command, lo, hi):
    js = cfg.get("j", command)
    js = list(range(lo, hi + 1)) if js is None else js
    for j in js:
        if not lo <= j <= hi:
            raise ConfigError(f"{cfg.where('j', 'j_max', 'scales')}band {j} outside [{lo}, {hi}]")
    return js


def _finite(values, what):
    if not np.all(np.isfinite(np.asarray(values, dtype=float))):
        raise NumericalError(f"non-finite values in {what}")


# ------------------------------------------------------------------ commands


def cmd_windows(cfg: Config, out, fmt: str, threads: int = 1, log=sys.stdout) -> None:
    s = build_scales(cfg)
    w = WindowFamily(s)
    n_u = cfg.get("n_u")
    if n_u < 2:
        raise ConfigError(f"{cfg.where('n_u')}n_u must be >= 2")
    u = np.linspace(0.0, s.scale(s.j_max), n_u)
    rows = list(fio.window_rows(w, u))
    dev = check_partition_of_unity(w, np.linspace(1.0, w.l_cover, 1000))
    _finite([r["b_j"] for r in rows] + [dev], "window table")
    fio.write_table(out, fmt, ["j", "u", "a_j", "b_j"], rows)
    print(f"partition-of-unity max deviation on [1, {w.l_cover:g}]: {dev:.3e}", file=log)


def cmd_localization(cfg: Config, out, fmt: str, threads: int = 1, log=sys.stdout) -> None:
    w = WindowFamily(build_scales(cfg))
    dim = _dim(cfg)
    M = cfg.get("M")
    theta = cfg.get("theta")
    theta = default_theta_grid() if theta is None else np.asarray(theta)
    rows = []
    for j in _bands(cfg, w, "localization", 1, w.n_bands - 1):
        rep = _checked(cfg, ["M", "theta"], lambda: localization_report(w, dim, j, M, theta))
        _finite(rep.value, "kernel values")
        rows.extend(rep.rows())
    fio.write_table(out, fmt, ["d", "j", "theta", "value", "envelope", "ratio"], rows)


def cmd_uncorrelation(cfg: Config, out, fmt: str, threads: int = 1, log=sys.stdout) -> None:
    w = WindowFamily(build_scales(cfg))
    spec = build_spectrum(cfg)
    dim = _dim(cfg)
    if dim.d != 2:
        raise ConfigError(f"{cfg.where('dim')}Monte-Carlo fields are defined on S^2 only")
    theta = np.asarray(cfg.get("theta", "uncorrelation"), dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi):
        raise ConfigError(f"{cfg.where('theta')}theta must lie in [0, pi]")
    beta = cfg.get("beta")
    beta = spec.beta_effective if beta is None else beta
    N, n_reps, seed = cfg.get("N"), cfg.get("n_reps"), cfg.get("seed")
    x = np.array([0.0, 0.0, 1.0])
    ys = unit_vectors(theta, np.zeros_like(theta))
    rows = []
    for j in _bands(cfg, w, "uncorrelation", 1, w.n_bands - 1):
        analytic = needlet_correlation(w, dim, spec, j, theta)
        mc, se = _checked(cfg, ["n_reps"], lambda: empirical_needlet_correlations(spec, w, j, x, ys, n_reps, seed, threads))
        env = uncorrelation_envelope(w.scales, j, beta, N, theta)
        _finite(np.concatenate([np.atleast_1d(analytic), mc, se]), "correlations")
        for t, a, m, e, v in zip(theta, np.atleast_1d(analytic), mc, se, env):
            rows.append({"j": j, "theta": float(t), "corr_analytic": float(a), "corr_mc": float(m), "mc_se": float(e), "envelope": float(v)})
    fio.write_table(out, fmt, ["j", "theta", "corr_analytic", "corr_mc", "mc_se", "envelope"], rows)


GOF_COLUMNS = [
    "j", "I_j", "card_Dj", "mean", "var", "skew", "kurt",
    "se_mean", "se_var", "se_skew", "se_kurt", "n_reps", "seed", "alpha", "null_alpha",
]


def cmd_gof(cfg: Config, out, fmt: str, threads: int = 1, log=sys.stdout) -> None:
    w = WindowFamily(build_scales(cfg))
    true_spec = build_spectrum(cfg)
    hyp_spec = build_spectrum(cfg, "null_alpha", "null_g0")
    beta = cfg.get("beta")
    beta = true_spec.beta_effective if beta is None else beta
    region = None
    if cfg.get("cap_center") is not None or cfg.get("cap_radius") is not None:
        region = _checked(cfg, ["cap_center", "cap_radius"], lambda: SphericalCap(tuple(cfg.get("cap_center") or ()), cfg.get("cap_radius") or 0.0))
    sub = _checked(cfg, ["delta", "epsilon", "beta"], lambda: SubsampleSpec(cfg.get("delta"), cfg.get("epsilon"), beta, region))
    n_reps, seed = cfg.get("n_reps"), cfg.get("seed")
    rows, reps = [], []
    for j in _bands(cfg, w, "gof", 1, w.n_bands - 1):
        run = _checked(cfg, ["j", "delta", "n_reps"], lambda: simulate_gof(true_spec, hyp_spec, w, j, sub, n_reps, seed, threads))
        _finite(run.statistics, "I_j replications")
        m = run.moments
        rows.append({
            "j": j, "I_j": float(run.statistics[0]), "card_Dj": int(run.subsample.size),
            "mean": m.mean, "var": m.variance, "skew": m.skewness, "kurt": m.excess_kurtosis,
            "se_mean": m.se_mean, "se_var": m.se_variance, "se_skew": m.se_skewness, "se_kurt": m.se_kurtosis,
            "n_reps": n_reps, "seed": seed, "alpha": true_spec.alpha, "null_alpha": hyp_spec.alpha,
        })
        if cfg.get("emit_replications"):
            reps.extend({"j": j, "replication": i, "I_j": float(v)} for i, v in enumerate(run.statistics))
    if fmt == "json":
        fio.write_jsonl(out, rows + reps)
    else:
        fio.write_csv(out, GOF_COLUMNS, rows)


COMMANDS = {
    "windows": cmd_windows,
    "localization": cmd_localization,
    "uncorrelation": cmd_uncorrelation,
    "gof": cmd_gof,
}


def _help_epilog() -> str:
    lines = ["config keys (key = value, '#' comments):"]
    for k, (_, default, text) in KEYS.items():
        lines.append(f"  {k:<18} {text} [default: {default}]")
    lines.append("exit codes: 0 ok, 1 config error, 2 numerical failure, 3 I/O error")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="flexneedlet",
        description="Flexible-bandwidth needlet experiments.",
        epilog=_help_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH", help="key = value config file")
    p.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
    p.add_argument("--out", metavar="PATH", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--threads", type=int, default=1, metavar="N")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read(), args.config)
        else:
            cfg = Config()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=err)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.values["seed"] = args.seed
    if not 0 <= cfg.get("seed") < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=err)
        return EXIT_CONFIG
    if args.threads < 1:
        print("error: --threads must be >= 1", file=err)
        return EXIT_CONFIG

    buf = StringIO(newline="")
    log = sys.stderr if args.out == "-" else sys.stdout
    try:
        COMMANDS[args.command](cfg, buf, args.format, args.threads, log)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    try:
        if args.out == "-":
            sys.stdout.write(buf.getvalue())
            sys.stdout.flush()
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=err)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
