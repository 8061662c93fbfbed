"""CSV and JSON-lines serialization of tables produced by the library.

Floats are written with ``repr`` so output is exact and byte-stable across
runs. Non-finite values become ``inf``/``nan`` in CSV and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "format_value",
    "write_csv",
    "write_jsonl",
    "write_table",
    "window_rows",
    "coefficient_rows",
    "sample_rows",
]

SCHEMA_VERSION = "1.0"


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    return v


def write_csv(stream, columns, rows) -> None:
    """RFC-4180 style: header row, CRLF line ends, minimal quoting."""
    w = csv.writer(stream, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row[c]) for c in columns])


def write_jsonl(stream, records, schema_version: str = SCHEMA_VERSION) -> None:
    """One JSON object per line, keys in insertion order, ``schema_version`` first."""
    for rec in records:
        out = {"schema_version": schema_version}
        out.update({k: _json_value(v) for k, v in rec.items()})
        stream.write(json.dumps(out, allow_nan=False, separators=(",", ":")) + "\n")


def write_table(stream, fmt: str, columns, rows) -> None:
    rows = list(rows)
    if fmt == "csv":
        write_csv(stream, columns, rows)
    elif fmt == "json":
        write_jsonl(stream, ({c: r[c] for c in columns} for r in rows))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def to_string(fmt: str, columns, rows) -> str:
    buf = io.StringIO()
    write_table(buf, fmt, columns, rows)
    return buf.getvalue()


def window_rows(w, u):
    """Rows ``(j, u, a_j, b_j)`` for every band of a window family."""
    u = np.asarray(u, dtype=float)
    for j in range(w.n_bands):
        a = w.step(j, u)
        b = w(j, u)
        for x, av, bv in zip(u, a, b):
            yield {"j": j, "u": float(x), "a_j": float(av), "b_j": float(bv)}


def coefficient_rows(coeffs):
    """Rows ``(j, k, theta_k, phi_k, lambda_k, beta_jk)`` of a single-field coefficient set."""
    for j in coeffs.bands:
        g = coeffs.grids[j]
        beta = np.asarray(coeffs.beta[j], dtype=float)
        if beta.ndim != 1:
            raise ValueError("coefficient export expects a single field")
        for k in range(g.size):
            yield {
                "j": j,
                "k": k,
                "theta_k": float(g.theta[k]),
                "phi_k": float(g.phi[k]),
                "lambda_k": float(g.weights[k]),
                "beta_jk": float(beta[k]),
            }


def sample_rows(sample):
    """Rows ``(l, m, a_lm)`` with signed ``m`` in ``-l .. l`` (flat real layout)."""
    coef = np.asarray(sample.coefficients, dtype=float)
    for ell in range(1, sample.l_max + 1):
        base = ell * ell
        for i in range(2 * ell + 1):
            yield {"l": ell, "m": i - ell, "a_lm": float(coef[base + i])}
