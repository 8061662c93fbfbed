"""Scale sequences and the harmonic support intervals of each needlet band."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ScaleError",
    "ScaleSequence",
    "make_geometric",
    "make_custom",
    "support_interval",
]

# slack for the gap-monotonicity check on float-valued user input
_GAP_RTOL = 1e-12


class ScaleError(ValueError):
    """Raised for scale sequences violating the standing assumptions."""


@dataclass(frozen=True)
class ScaleSequence:
    """Increasing scales ``S_0 = 1 < S_1 < ... < S_jmax`` with increasing gaps.

    Index ``j`` maps to ``values[j]``; the pseudo-scale ``S_{-1} = 0`` is
    exposed through :meth:`scale` so that band ``j = 0`` is well defined.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        _validate(vals)

    @property
    def j_max(self) -> int:
        return len(self.values) - 1

    def scale(self, j: int) -> float:
        """Return ``S_j`` for ``-1 <= j <= j_max`` (``S_{-1} = 0``)."""
        if j == -1:
            return 0.0
        if not 0 <= j <= self.j_max:
            raise IndexError(f"scale index {j} outside [-1, {self.j_max}]")
        return self.values[j]

    def gap(self, j: int) -> float:
        """``S_j - S_{j-1}``."""
        return self.scale(j) - self.scale(j - 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


def _validate(vals: Sequence[float]) -> None:
    if len(vals) == 0:
        raise ScaleError("empty scale sequence")
    if not all(np.isfinite(vals)):
        raise ScaleError("scale values must be finite")
    if vals[0] != 1.0:
        raise ScaleError(f"first-value-not-one: S_0 must equal 1, got {vals[0]!r}")
    gaps = np.diff(vals)
    if np.any(gaps <= 0):
        k = int(np.argmax(gaps <= 0))
        raise ScaleError(f"non-increasing: S_{k + 1} = {vals[k + 1]!r} <= S_{k} = {vals[k]!r}")
    for k in range(1, len(gaps)):
        if gaps[k] < gaps[k - 1] * (1 - _GAP_RTOL):
            raise ScaleError(
                f"decreasing-gaps: S_{k + 1} - S_{k} = {gaps[k]!r} < "
                f"S_{k} - S_{k - 1} = {gaps[k - 1]!r}"
            )


def make_geometric(B: float, j_max: int) -> ScaleSequence:
    """Standard needlet scales ``S_j = B**j`` for ``j = 0..j_max``."""
    if not np.isfinite(B) or B <= 1:
        raise ScaleError(f"invalid bandwidth: B must exceed 1, got {B!r}")
    if int(j_max) != j_max or j_max < 1:
        raise ScaleError(f"j_max must be an integer >= 1, got {j_max!r}")
    return ScaleSequence(tuple(float(B) ** j for j in range(int(j_max) + 1)))


def make_custom(values: Sequence[float]) -> ScaleSequence:
    """Validate an explicit list of scales."""
    return ScaleSequence(tuple(values))


def support_interval(s: ScaleSequence, j: int) -> tuple[float, float]:
    """Closed harmonic support ``[S_{j-1}, S_{j+1}]`` of band ``j``.

    Valid for ``0 <= j <= j_max - 1``; band 0 uses ``S_{-1} = 0``.
    """
    if not 0 <= j <= s.j_max - 1:
        raise IndexError(f"band index {j} outside [0, {s.j_max - 1}]")
    return s.scale(j - 1), s.scale(j + 1)


def integer_multipoles(s: ScaleSequence, j: int) -> np.ndarray:
    """Integers ``l`` with ``S_{j-1} < l < S_{j+1}`` (the open support of band j)."""
    lo, hi = support_interval(s, j)
    first = int(np.floor(lo)) + 1
    last = int(np.ceil(hi)) - 1
    return np.arange(first, last + 1, dtype=int) if last >= first else np.zeros(0, dtype=int)
