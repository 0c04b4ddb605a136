"""Cascade algorithm on a dyadic grid.

The multiscaling vector is sampled at ``x_n = l + n 2^-d`` over its support
``[l, u]``.  Because ``2 x_n - k`` lands on the same grid, the refinement
operator ``(T f)(x) = sqrt(2) sum_k H_k f(2x - k)`` acts on the sample array
by exact index arithmetic and the cascade is a plain fixed-point iteration of
that linear map.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .multifilter import Multifilter

__all__ = [
    "CascadeError",
    "ScalingTable",
    "cascade",
    "initializer",
    "orthonormality_residual",
    "translate_gram",
]

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 10
DEFAULT_MAX_ITERS = 64
DEFAULT_TOL = 1e-8


class CascadeError(RuntimeError):
    """The cascade failed to converge; ``trace`` holds the per-step sup-norm differences."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


@dataclass(frozen=True, eq=False)
class ScalingTable:
    """Dyadic samples of ``phi`` (and ``psi`` when the filter has a highpass)."""

    filter: Multifilter
    depth: int
    phi: np.ndarray
    psi: np.ndarray | None
    refinement_residual: float
    iterations: int
    trace: tuple
    converged: bool = True

    @property
    def multiplicity(self) -> int:
        return self.filter.multiplicity

    @property
    def support(self) -> tuple[int, int]:
        return self.filter.support

    @property
    def step(self) -> float:
        return 2.0 ** -self.depth

    @cached_property
    def x(self) -> np.ndarray:
        lo, hi = self.support
        n = (hi - lo) * 2 ** self.depth + 1
        return lo + np.arange(n) * self.step

    @cached_property
    def _phi_splines(self):
        return [CubicSpline(self.x, c, bc_type="natural") for c in self.phi]

    @cached_property
    def _psi_splines(self):
        if self.psi is None:
            return None
        return [CubicSpline(self.x, c, bc_type="natural") for c in self.psi]

    def evaluate(self, t, kind: str = "phi") -> np.ndarray:
        """Spline values of every component at ``t``; shape ``(r,) + t.shape``.

        Arguments outside the support give exactly 0.  Near jump
        discontinuities (Haar-type tables) the cubic spline rings over a few
        grid cells.
        """
        splines = self._phi_splines if kind == "phi" else self._psi_splines
        if splines is None:
            raise ValueError(f"{self.filter.name}: no highpass filter, psi is unavailable")
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        lo, hi = self.support
        inside = (flat >= lo) & (flat <= hi)
        out = np.zeros((self.multiplicity, flat.size))
        if np.any(inside):
            ti = flat[inside]
            for i, s in enumerate(splines):
                out[i, inside] = s(ti)
        return out.reshape((self.multiplicity,) + t.shape)

    def to_csv(self, path) -> None:
        r = self.multiplicity
        header = ["x"] + [f"phi_{i + 1}" for i in range(r)]
        cols = [self.x, *self.phi]
        if self.psi is not None:
            header += [f"psi_{i + 1}" for i in range(r)]
            cols += list(self.psi)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in zip(*cols):
                w.writerow([repr(float(v)) for v in row])


def initializer(r: int, depth: int = DEFAULT_DEPTH, support=(0, 1)) -> np.ndarray:
    """Piecewise-constant orthonormal start on the dyadic grid over ``support``.

    Component ``i`` (1-based) is ``sqrt(r)`` on ``[l + (i-1)/r, l + i/r)``.
    """
    if r < 1:
        raise ValueError(f"multiplicity must be >= 1, got {r}")
    lo, hi = support
    x = lo + np.arange((hi - lo) * 2 ** depth + 1) * 2.0 ** -depth
    s = x - lo
    phi = np.zeros((r, x.size))
    for i in range(r):
        phi[i, (s >= i / r) & (s < (i + 1) / r)] = np.sqrt(r)
    return phi


def _refinement_indices(filt: Multifilter, depth: int):
    """Grid index of ``2 x_n - k`` for each filter matrix; ``n_grid`` marks out-of-support."""
    lo, hi = filt.support
    n_grid = (hi - lo) * 2 ** depth + 1
    n = np.arange(n_grid)
    idx = []
    for k in filt.indices:
        src = 2 * n + (lo - k) * 2 ** depth
        idx.append(np.where((src >= 0) & (src < n_grid), src, n_grid))
    return idx


def _apply(mats, idx, values):
    """sqrt(2) sum_k M_k values(2x - k) on the grid."""
    ext = np.concatenate([values, np.zeros((values.shape[0], 1))], axis=1)
    out = np.zeros_like(values)
    for m, ix in zip(mats, idx):
        out += m @ ext[:, ix]
    return np.sqrt(2.0) * out


def _mass_vector(filt: Multifilter) -> np.ndarray:
    """Unit left eigenvector of ``sum_k H_k / sqrt(2)`` for eigenvalue 1.

    For an orthonormal refinable vector with approximation order >= 1 this
    equals ``integral(phi)`` and ``sum_k u^T phi(x - k) = 1``.
    """
    m = filt.lowpass.sum(axis=0).T / np.sqrt(2.0)
    ev, vec = np.linalg.eig(m)
    u = np.real(vec[:, np.argmin(np.abs(ev - 1.0))])
    u /= np.linalg.norm(u)
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    return u


def cascade(
    filt: Multifilter,
    depth: int = DEFAULT_DEPTH,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> ScalingTable:
    """Iterate the refinement equation from the piecewise-constant start.

    Stops when the sup-norm difference of successive iterates is ``<= tol``.
    The fixed point is determined by the filter only up to a scalar factor,
    so the limit is rescaled to ``sum_k u^T phi(x - k) = 1`` with ``u`` the
    unit mass vector of the filter, which gives unit-norm components.

    Raises
    ------
    CascadeError
        If the iteration stagnates above ``tol`` or the limit degenerates.
    """
    if depth < 4:
        raise ValueError(f"depth must be >= 4, got {depth}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    idx = _refinement_indices(filt, depth)
    phi = initializer(filt.multiplicity, depth, filt.support)
    trace = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        new = _apply(filt.lowpass, idx, phi)
        diff = float(np.max(np.abs(new - phi)))
        trace.append(diff)
        phi = new
        if not np.isfinite(diff):
            raise CascadeError(f"{filt.name}: cascade diverged", trace)
        if diff <= tol:
            converged = True
            break
    if not converged:
        recent = trace[-6:]
        if len(recent) == 6 and recent[-1] > 0.9 * recent[0]:
            raise CascadeError(
                f"{filt.name}: cascade stagnated at {trace[-1]:.3e} after {it} iterations", trace
            )
        logger.warning("%s: cascade stopped at %.3e > tol after %d iterations", filt.name, trace[-1], it)

    # fix the scale of the fixed point: sum_k u^T phi(x - k) = 1
    u = _mass_vector(filt)
    per = 2 ** depth
    cell = (u @ phi)[:-1].reshape(-1, per).sum(axis=0)
    scale = float(np.mean(cell))
    if abs(scale) < 1e-6:
        raise CascadeError(f"{filt.name}: cascade limit has no component along the mass vector", trace)
    if abs(scale - 1.0) > 8 * np.finfo(float).eps:  # keep exact fixed points bit-exact
        phi = phi / scale

    residual = float(np.max(np.abs(_apply(filt.lowpass, idx, phi) - phi)))
    psi = None
    if filt.highpass is not None:
        psi = _apply(filt.highpass, idx, phi)
    for a in (phi, psi):
        if a is not None:
            a.flags.writeable = False
    return ScalingTable(filt, depth, phi, psi, residual, it, tuple(trace), converged)


def translate_gram(a: np.ndarray, b: np.ndarray, shift: int, depth: int) -> np.ndarray:
    """Riemann-sum Gram matrix ``2^-d sum_n a_i(x_n) b_j(x_n - shift)``."""
    off = shift * 2 ** depth
    n = a.shape[1]
    if abs(off) >= n:
        return np.zeros((a.shape[0], b.shape[0]))
    if off >= 0:
        return a[:, off:] @ b[:, : n - off].T * 2.0 ** -depth
    return a[:, : n + off] @ b[:, -off:].T * 2.0 ** -depth


def orthonormality_residual(table: ScalingTable) -> float:
    """Max defect of the discrete translate orthonormality relations.

    Covers phi/phi and, when present, psi/psi and phi/psi.
    """
    lo, hi = table.support
    r = table.multiplicity
    eye = np.eye(r)
    pairs = [(table.phi, table.phi, eye)]
    if table.psi is not None:
        pairs += [(table.psi, table.psi, eye), (table.phi, table.psi, np.zeros((r, r)))]
    res = 0.0
    for a, b, target in pairs:
        for k in range(-(hi - lo), hi - lo + 1):
            g = translate_gram(a, b, k, table.depth)
            expected = target if k == 0 else 0.0
            res = max(res, float(np.max(np.abs(g - expected))))
    return res
