"""Trapezoid-rule error metrics on a uniform grid."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["QuadratureGrid", "ise", "l2_distance"]

DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid on ``[a, b]`` with ``points`` abscissae, endpoints included."""

    a: float
    b: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.points < 2:
            raise ValueError(f"need at least 2 grid points, got {self.points}")
        if not self.a < self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @classmethod
    def over(cls, domain, points: int = DEFAULT_POINTS) -> "QuadratureGrid":
        return cls(float(domain[0]), float(domain[1]), int(points))

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.points)

    @cached_property
    def weights(self) -> np.ndarray:
        h = (self.b - self.a) / (self.points - 1)
        w = np.full(self.points, h)
        w[[0, -1]] = h / 2
        return w

    def integrate(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.points,):
            raise ValueError(f"expected {self.points} grid values, got shape {values.shape}")
        return float(self.weights @ values)


def _check(f, g):
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError(f"grid functions differ in length: {f.shape} vs {g.shape}")
    return f, g


def ise(estimate, truth, grid: QuadratureGrid) -> float:
    """Integrated square error ``int (estimate - truth)^2`` over the grid."""
    f, g = _check(estimate, truth)
    return grid.integrate((f - g) ** 2)


def l2_distance(f, g, grid: QuadratureGrid) -> float:
    f, g = _check(f, g)
    return float(np.sqrt(grid.integrate((f - g) ** 2)))
