"""Dilated and translated (multi)scaling bases over a data domain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cascade import ScalingTable

__all__ = [
    "BasisSpec",
    "evaluate",
    "evaluate_vector",
    "translate_range",
    "local_evaluations",
]


def translate_range(support, level: int, domain) -> tuple[int, int]:
    """Integer translates whose dilated support meets the closed domain.

    ``k`` qualifies when ``[(l + k) 2^-j, (u + k) 2^-j]`` intersects ``[a, b]``,
    i.e. ``ceil(2^j a - u) <= k <= floor(2^j b - l)``.
    """
    lo, hi = support
    a, b = domain
    if not a < b:
        raise ValueError(f"empty domain [{a}, {b}]")
    scale = 2.0 ** level
    return math.ceil(scale * a - hi), math.floor(scale * b - lo)


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """``{2^(j/2) phi_i(2^j x - k)}`` over every translate that touches ``domain``.

    With ``kind="psi"`` the basis is built from the multiwavelet vector of
    the table instead of the multiscaling vector.
    """

    table: ScalingTable
    level: int
    domain: tuple[float, float]
    kind: str = "phi"
    translates: tuple[int, int] = field(init=False)

    def __post_init__(self):
        if self.kind not in ("phi", "psi"):
            raise ValueError(f"kind must be 'phi' or 'psi', got {self.kind!r}")
        if self.kind == "psi" and self.table.psi is None:
            raise ValueError(f"{self.table.filter.name}: no multiwavelet samples available")
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        object.__setattr__(self, "translates", translate_range(self.table.support, self.level, self.domain))

    @property
    def multiplicity(self) -> int:
        return self.table.multiplicity

    @property
    def n_translates(self) -> int:
        return self.translates[1] - self.translates[0] + 1

    @property
    def coefficient_count(self) -> int:
        return self.multiplicity * self.n_translates

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.translates[0], self.translates[1] + 1)

    def with_level(self, level: int, kind: str | None = None) -> "BasisSpec":
        return BasisSpec(self.table, level, self.domain, kind or self.kind)


def evaluate(spec: BasisSpec, component: int, k: int, x):
    """``2^(j/2) phi_i(2^j x - k)`` with 1-based ``component``."""
    if not 1 <= component <= spec.multiplicity:
        raise ValueError(f"component must be in 1..{spec.multiplicity}, got {component}")
    return evaluate_vector(spec, k, x)[component - 1]


def evaluate_vector(spec: BasisSpec, k: int, x):
    """All ``r`` components at translate ``k``; shape ``(r,) + shape(x)``."""
    x = np.asarray(x, dtype=float)
    t = 2.0 ** spec.level * x - k
    return 2.0 ** (spec.level / 2) * spec.table.evaluate(t, spec.kind)


def local_evaluations(spec: BasisSpec, x):
    """Every nonzero basis value at the points ``x``.

    Returns ``(point, translate_offset, values)`` where ``values`` has shape
    ``(r, m)`` and ``translate_offset = k - k_min``.  Each point touches at
    most ``u - l + 1`` translates, so this is the sparse form of the design
    matrix.
    """
    x = np.asarray(x, dtype=float).ravel()
    lo, hi = spec.table.support
    k_min, k_max = spec.translates
    t = 2.0 ** spec.level * x
    base = np.floor(t - lo).astype(np.int64)
    points, offsets, args = [], [], []
    idx = np.arange(x.size)
    for m in range(hi - lo + 1):
        k = base - m
        arg = t - k
        keep = (arg <= hi) & (k >= k_min) & (k <= k_max)
        points.append(idx[keep])
        offsets.append(k[keep] - k_min)
        args.append(arg[keep])
    points = np.concatenate(points)
    offsets = np.concatenate(offsets)
    values = 2.0 ** (spec.level / 2) * spec.table.evaluate(np.concatenate(args), spec.kind)
    return points, offsets, values
