"""Gaussian-mixture test densities with exact pdf and seeded sampling.

Sampling uses numpy's ``PCG64`` bit generator (``np.random.default_rng``):
the component is chosen by inverse-CDF lookup of one uniform variate, then a
standard normal variate from numpy's ziggurat sampler is scaled and shifted.
Draws outside the benchmark domain are redrawn.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

__all__ = ["MixtureDensity", "ZOO", "get_density", "load_mixture", "pdf", "sample"]

DEFAULT_DOMAIN = (-4.0, 4.0)


@dataclass(frozen=True, eq=False)
class MixtureDensity:
    name: str
    weights: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray
    domain: tuple[float, float] = DEFAULT_DOMAIN

    def __post_init__(self):
        w, m, s = (np.array(v, dtype=float).ravel() for v in (self.weights, self.means, self.stddevs))
        if not (len(w) == len(m) == len(s)) or len(w) == 0:
            raise ValueError(f"{self.name}: weights, means and stddevs must have equal nonzero length")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: weights must be positive and sum to 1 (sum={w.sum()!r})")
        if np.any(s <= 0):
            raise ValueError(f"{self.name}: stddevs must be positive")
        a, b = self.domain
        if not a < b:
            raise ValueError(f"{self.name}: empty domain {self.domain}")
        for name, v in (("weights", w), ("means", m), ("stddevs", s)):
            v.flags.writeable = False
            object.__setattr__(self, name, v)
        object.__setattr__(self, "domain", (float(a), float(b)))

    @property
    def components(self) -> int:
        return len(self.weights)

    def pdf(self, x):
        return pdf(self, x)

    def domain_mass(self) -> float:
        """Probability the untruncated mixture assigns to ``domain``."""
        a, b = self.domain
        za = (a - self.means) / self.stddevs
        zb = (b - self.means) / self.stddevs
        return float(self.weights @ (ndtr(zb) - ndtr(za)))

    def truncated_pdf(self, x):
        """Density of :meth:`sample` output: ``pdf`` restricted to ``domain`` and renormalized."""
        x = np.asarray(x, dtype=float)
        a, b = self.domain
        return np.where((x >= a) & (x <= b), pdf(self, x) / self.domain_mass(), 0.0)

    def sample(self, n: int, seed: int, return_rejected: bool = False):
        return sample(self, n, seed, return_rejected)


def pdf(d: MixtureDensity, x):
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - d.means) / d.stddevs
    return np.sum(d.weights / (d.stddevs * np.sqrt(2 * np.pi)) * np.exp(-0.5 * z * z), axis=-1)


def _draw(d: MixtureDensity, rng: np.random.Generator, n: int):
    comp = np.searchsorted(np.cumsum(d.weights), rng.random(n), side="right")
    comp = np.minimum(comp, d.components - 1)
    return d.means[comp] + d.stddevs[comp] * rng.standard_normal(n), comp


def sample(d: MixtureDensity, n: int, seed: int, return_rejected: bool = False):
    """``n`` i.i.d. draws restricted to ``d.domain``.

    With ``return_rejected`` also returns the fraction of raw draws that fell
    outside the domain and were redrawn.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    a, b = d.domain
    out = np.empty(n)
    filled = 0
    total = 0
    while filled < n:
        need = n - filled
        x, _ = _draw(d, rng, need)
        total += need
        x = x[(x >= a) & (x <= b)]
        out[filled : filled + x.size] = x
        filled += x.size
    if return_rejected:
        return out, 1.0 - n / total
    return out


def _claw():
    w = [0.5] + [0.1] * 5
    m = [0.0] + [l / 2 - 1 for l in range(5)]
    s = [1.0] + [0.1] * 5
    return w, m, s


def _double_claw():
    w = [49 / 100, 49 / 100] + [1 / 350] * 7
    m = [-1.0, 1.0] + [(l - 3) / 2 for l in range(7)]
    s = [2 / 3, 2 / 3] + [1 / 100] * 7
    return w, m, s


ZOO = {
    "normal": MixtureDensity("normal", [1.0], [0.0], [1.0]),
    "bimodal": MixtureDensity("bimodal", [0.5, 0.5], [-1.0, 1.0], [2 / 3, 2 / 3]),
    "skewed-bimodal": MixtureDensity("skewed-bimodal", [0.75, 0.25], [0.0, 1.5], [1.0, 1 / 3]),
    "claw": MixtureDensity("claw", *_claw()),
    "double-claw": MixtureDensity("double-claw", *_double_claw()),
}


def get_density(name: str) -> MixtureDensity:
    try:
        return ZOO[name]
    except KeyError:
        raise KeyError(f"unknown density {name!r}; known: {', '.join(ZOO)}") from None


def load_mixture(source) -> MixtureDensity:
    """Mixture from a JSON file path or parsed mapping ``{weights, means, stddevs, domain}``."""
    if isinstance(source, (str, Path)):
        source = json.loads(Path(source).read_text())
    return MixtureDensity(
        source.get("name", "custom"),
        source["weights"],
        source["means"],
        source["stddevs"],
        tuple(source.get("domain", DEFAULT_DOMAIN)),
    )
