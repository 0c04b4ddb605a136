"""Linear (multi)wavelet density estimation by projection.

Coefficients are sample means of basis evaluations,

    alpha_k = (1/N) sum_i phi_{j0,k}(X_i),   beta_{j,k} = (1/N) sum_i psi_{j,k}(X_i),

and the estimate is ``sum_k alpha_k^T phi_{j0,k}(x) + sum_j sum_k beta_{j,k}^T psi_{j,k}(x)``.
No thresholding is applied.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .basis import BasisSpec, local_evaluations
from .metrics import QuadratureGrid

__all__ = [
    "CoefficientSet",
    "DensityEstimate",
    "NormalizationError",
    "estimate",
    "estimate_coefficients",
    "normalize",
    "project_to_density",
    "reconstruct",
]


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """``alpha[n]`` is the r-vector for translate ``k_min + n``.

    ``beta`` maps a detail level ``j`` to its ``(k_min, array)`` pair.
    """

    alpha: np.ndarray
    k_min: int
    sample_size: int
    beta: dict = field(default_factory=dict)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_min + self.alpha.shape[0])

    def as_dict(self) -> dict:
        """Translate -> r-vector mapping (plain Python types)."""
        return {int(k): a.tolist() for k, a in zip(self.ks, self.alpha)}

    def count(self) -> int:
        n = self.alpha.size
        for _, b in self.beta.values():
            n += b.size
        return n


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    """Raw projection estimate plus, once normalized, a corrected grid view."""

    spec: BasisSpec
    coefficients: CoefficientSet
    detail_specs: tuple = ()
    grid: QuadratureGrid | None = None
    values: np.ndarray | None = None
    normalization: dict | None = None

    @property
    def normalized(self) -> bool:
        return self.normalization is not None

    def __call__(self, x):
        return reconstruct(self, x)


def _check_samples(spec: BasisSpec, samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    a, b = spec.domain
    bad = (x < a) | (x > b)
    if np.any(bad):
        raise ValueError(f"sample value {x[bad][0]!r} lies outside the basis domain [{a}, {b}]")
    return x


def _sample_means(spec: BasisSpec, x: np.ndarray) -> np.ndarray:
    _, offsets, values = local_evaluations(spec, x)
    r = spec.multiplicity
    out = np.empty((spec.n_translates, r))
    for i in range(r):
        out[:, i] = np.bincount(offsets, weights=values[i], minlength=spec.n_translates)
    return out / x.size


def estimate_coefficients(spec: BasisSpec, samples, detail_levels=()) -> CoefficientSet:
    """Sample-mean projection coefficients at ``spec.level`` and optional detail levels."""
    x = _check_samples(spec, samples)
    alpha = _sample_means(spec, x)
    beta = {}
    for j in detail_levels:
        dspec = spec.with_level(int(j), "psi")
        beta[int(j)] = (dspec.translates[0], _sample_means(dspec, x))
    return CoefficientSet(alpha, spec.translates[0], x.size, beta)


def estimate(spec: BasisSpec, samples, detail_levels=()) -> DensityEstimate:
    coeffs = estimate_coefficients(spec, samples, detail_levels)
    details = tuple(spec.with_level(j, "psi") for j in sorted(coeffs.beta))
    return DensityEstimate(spec, coeffs, details)


def _expand(spec: BasisSpec, coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    points, offsets, values = local_evaluations(spec, x)
    contrib = np.einsum("im,mi->m", values, coef[offsets])
    return np.bincount(points, weights=contrib, minlength=x.size)


def reconstruct(est: DensityEstimate, grid) -> np.ndarray:
    """Raw estimate ``p_hat`` at the given points (linear in the coefficients)."""
    x = np.asarray(grid.x if isinstance(grid, QuadratureGrid) else grid, dtype=float)
    shape = x.shape
    x = x.ravel()
    out = _expand(est.spec, est.coefficients.alpha, x)
    for dspec in est.detail_specs:
        out += _expand(dspec, est.coefficients.beta[dspec.level][1], x)
    return out.reshape(shape)


def project_to_density(values, weights, tol: float = 1e-6, max_rounds: int = 8):
    """Nearest nonnegative unit-mass grid function in the weighted L2 norm.

    The minimizer of ``sum_n w_n (q_n - v_n)^2`` over ``q >= 0``,
    ``sum_n w_n q_n = 1`` is ``q = max(v - c, 0)`` with the shift ``c`` fixed
    by the mass constraint.  Being a projection onto a convex set that
    contains every true density, it never moves the estimate away from one.

    Returns ``(q, shift)``.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not np.any(v > 0):
        raise NormalizationError("estimate is nonpositive everywhere; cannot normalize")
    # mass(c) = sum w max(v - c, 0) is piecewise linear and decreasing in c;
    # scan breakpoints in decreasing order of v.
    order = np.argsort(-v, kind="stable")
    vs, ws = v[order], w[order]
    cw = np.cumsum(ws)
    cwv = np.cumsum(ws * vs)
    # with the top m points active: c = (cwv[m-1] - 1) / cw[m-1], valid if vs[m] <= c < vs[m-1]
    c = (cwv - 1.0) / cw
    nxt = np.append(vs[1:], -np.inf)
    ok = (c < vs) & (c >= nxt)
    shift = float(c[np.argmax(ok)]) if np.any(ok) else float(c[-1])
    q = np.maximum(v - shift, 0.0)
    for _ in range(max_rounds):
        mass = float(w @ q)
        if abs(mass - 1.0) <= tol:
            break
        q = q / mass
    return q, shift


def normalize(est: DensityEstimate, grid: QuadratureGrid) -> DensityEstimate:
    """Return a copy whose grid view is a valid density on ``grid``.

    Raw coefficients are kept; the corrected values live in ``values`` and
    ``normalization`` records the raw mass, removed negative mass and shift.
    """
    raw = reconstruct(est, grid)
    q, shift = project_to_density(raw, grid.weights)
    neg = np.minimum(raw, 0.0)
    diag = {
        "raw_mass": grid.integrate(raw),
        "negative_mass": 0.0 - grid.integrate(neg),
        "shift": shift,
        "mass": grid.integrate(q),
        "min_value": float(q.min()),
    }
    return replace(est, grid=grid, values=q, normalization=diag)


def export_estimate(est: DensityEstimate, path, grid: QuadratureGrid | None = None, extra=None) -> Path:
    """Write ``x, p_hat`` rows to ``path`` and a JSON sidecar next to it.

    Uses the normalized grid view when present, otherwise reconstructs on
    ``grid``.
    """
    path = Path(path)
    if est.values is not None:
        x, y = est.grid.x, est.values
    else:
        if grid is None:
            raise ValueError("a grid is required for an unnormalized estimate")
        x, y = grid.x, reconstruct(est, grid)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p_hat"])
        for xi, yi in zip(x, y):
            w.writerow([repr(float(xi)), repr(float(yi))])
    spec = est.spec
    side = {
        "filter": spec.table.filter.name,
        "multiplicity": spec.multiplicity,
        "level": spec.level,
        "domain": list(spec.domain),
        "translates": list(spec.translates),
        "coefficient_count": est.coefficients.count(),
        "sample_size": est.coefficients.sample_size,
        "normalized": est.normalized,
        "normalization": est.normalization,
        "alpha": est.coefficients.as_dict(),
        "beta": {
            str(j): {"k_min": k0, "values": b.tolist()} for j, (k0, b) in est.coefficients.beta.items()
        },
    }
    if extra:
        side.update(extra)
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(side, indent=1) + "\n")
    return sidecar
