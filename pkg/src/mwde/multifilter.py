"""Filter banks for scalar wavelets and multiwavelets.

A :class:`Multifilter` holds the low-pass recursion matrices ``H_k`` (and
optionally the high-pass ``G_k``) of a dyadic refinement equation

    phi(x) = sqrt(2) * sum_k H_k phi(2x - k)

with ``r x r`` matrix coefficients.  Scalar wavelets are the ``r = 1`` case.
Built-in families are stored as JSON records under ``mwde/data/filters``;
balanced multiplicity-2 families (``bal-<scalar>``) are generated on demand
from their scalar parent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Union

import numpy as np

__all__ = [
    "FilterError",
    "Multifilter",
    "ORTHOGONALITY_TOL",
    "balance_scalar_filter",
    "filter_from_record",
    "filter_to_record",
    "list_filters",
    "load_filter",
    "orthogonality_residual",
    "save_filter",
]

ORTHOGONALITY_TOL = 1e-8
BALANCED_PREFIX = "bal-"

FilterSource = Union[str, Path, Mapping]


class FilterError(ValueError):
    """Raised when a filter record is unknown, malformed or not orthogonal."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Multifilter:
    """Orthogonal dyadic (multi)filter.

    ``lowpass[n]`` is the matrix ``H_{l+n}`` where ``l = support[0]``; the
    same index convention applies to ``highpass``.  Instances are validated
    on construction and their arrays are read-only.
    """

    name: str
    multiplicity: int
    support: tuple[int, int]
    lowpass: np.ndarray
    highpass: np.ndarray | None = None
    dilation: int = 2

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        object.__setattr__(self, "lowpass", _frozen(self.lowpass))
        if self.highpass is not None:
            object.__setattr__(self, "highpass", _frozen(self.highpass))
        self._validate()

    @property
    def length(self) -> int:
        """Number of recursion matrices."""
        return self.lowpass.shape[0]

    @property
    def first(self) -> int:
        return self.support[0]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.first, self.first + self.length)

    @property
    def has_highpass(self) -> bool:
        return self.highpass is not None

    def _validate(self):
        r = self.multiplicity
        if not isinstance(r, (int, np.integer)) or r < 1:
            raise FilterError(f"{self.name}: multiplicity must be a positive integer, got {r!r}")
        if self.dilation != 2:
            raise FilterError(f"{self.name}: only dilation 2 is supported, got {self.dilation}")
        if self.lowpass.ndim != 3 or self.lowpass.shape[1:] != (r, r) or self.length < 1:
            raise FilterError(
                f"{self.name}: lowpass must be a nonempty list of {r}x{r} matrices, "
                f"got shape {self.lowpass.shape}"
            )
        if self.highpass is not None and self.highpass.shape != self.lowpass.shape:
            raise FilterError(
                f"{self.name}: highpass shape {self.highpass.shape} does not match "
                f"lowpass shape {self.lowpass.shape}"
            )
        if not np.all(np.isfinite(self.lowpass)) or (
            self.highpass is not None and not np.all(np.isfinite(self.highpass))
        ):
            raise FilterError(f"{self.name}: non-finite filter entries")
        lo, hi = self.support
        # support of phi can be strictly inside the filter extent (e.g. DGHM)
        if not 1 <= hi - lo <= max(self.length - 1, 1):
            raise FilterError(
                f"{self.name}: support {self.support} is inconsistent with "
                f"{self.length} recursion matrices"
            )
        res = orthogonality_residual(self.lowpass, self.highpass)
        if res > ORTHOGONALITY_TOL:
            raise FilterError(
                f"{self.name}: orthogonality residual {res:.3e} exceeds {ORTHOGONALITY_TOL:g}",
                residual=res,
            )
        # refinable solution needs eigenvalue sqrt(2) of sum_k H_k
        ev = np.linalg.eigvals(self.lowpass.sum(axis=0))
        if np.min(np.abs(ev - np.sqrt(2))) > 1e-8:
            raise FilterError(
                f"{self.name}: sum of lowpass matrices has no eigenvalue sqrt(2) "
                f"(eigenvalues {np.round(ev, 6).tolist()})"
            )

    def __repr__(self):
        return (
            f"Multifilter(name={self.name!r}, multiplicity={self.multiplicity}, "
            f"support={self.support}, length={self.length}, "
            f"highpass={self.has_highpass})"
        )


def _shift_products(a, b, t):
    """sum_k a_k b_{k+2t}^T for stacked matrices."""
    n = a.shape[0]
    out = np.zeros((a.shape[1], b.shape[1]))
    for k in range(max(0, -2 * t), min(n, n - 2 * t)):
        out += a[k] @ b[k + 2 * t].T
    return out


def orthogonality_residual(lowpass, highpass=None) -> float:
    """Max-norm defect of the discrete orthogonality relations.

    Checks ``sum_k H_k H_{k+2t}^T = delta_{0t} I`` for every shift ``t`` and,
    when ``highpass`` is given, the analogous ``G/G`` and ``H/G`` relations.
    """
    lowpass = np.asarray(lowpass, dtype=float)
    n, r, _ = lowpass.shape
    eye = np.eye(r)
    pairs = [(lowpass, lowpass, eye)]
    if highpass is not None:
        highpass = np.asarray(highpass, dtype=float)
        pairs += [(highpass, highpass, eye), (lowpass, highpass, np.zeros((r, r)))]
    res = 0.0
    tmax = (n - 1) // 2 + 1
    for a, b, target in pairs:
        for t in range(-tmax, tmax + 1):
            expected = target if t == 0 else 0.0
            res = max(res, float(np.max(np.abs(_shift_products(a, b, t) - expected))))
    return res


def filter_to_record(filt: Multifilter) -> dict:
    """JSON-serializable record of a filter (full float precision)."""
    rec = {
        "name": filt.name,
        "multiplicity": int(filt.multiplicity),
        "support": list(filt.support),
        "lowpass": filt.lowpass.tolist(),
    }
    if filt.highpass is not None:
        rec["highpass"] = filt.highpass.tolist()
    return rec


def filter_from_record(record: Mapping) -> Multifilter:
    try:
        name = str(record["name"])
        r = int(record["multiplicity"])
        support = tuple(record["support"])
        lowpass = np.array(record["lowpass"], dtype=float)
        highpass = record.get("highpass")
        if highpass is not None:
            highpass = np.array(highpass, dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FilterError(f"malformed filter record: {exc}") from exc
    if len(support) != 2:
        raise FilterError(f"{name}: support must be a pair [l, u], got {support!r}")
    if r == 1 and lowpass.ndim == 1:
        lowpass = lowpass.reshape(-1, 1, 1)
        if highpass is not None:
            highpass = highpass.reshape(-1, 1, 1)
    return Multifilter(name, r, support, lowpass, highpass)


def save_filter(filt: Multifilter, path) -> None:
    Path(path).write_text(json.dumps(filter_to_record(filt), indent=1) + "\n")


def _builtin_dir():
    return resources.files("mwde") / "data" / "filters"


@lru_cache(maxsize=None)
def _builtin_records() -> dict:
    out = {}
    for entry in _builtin_dir().iterdir():
        if entry.name.endswith(".json"):
            rec = json.loads(entry.read_text())
            out[rec["name"]] = rec
    return out


def list_filters(include_balanced: bool = True) -> list[str]:
    """Names of the built-in families (scalar first, then multiwavelets)."""
    recs = _builtin_records()
    scalar = sorted((n for n, r in recs.items() if r["multiplicity"] == 1), key=_family_key)
    multi = sorted((n for n, r in recs.items() if r["multiplicity"] > 1), key=_family_key)
    names = scalar + multi
    if include_balanced:
        names += [BALANCED_PREFIX + n for n in scalar if n.startswith("db")]
    return names


def _family_key(name):
    stem = name.rstrip("0123456789")
    digits = name[len(stem):]
    return (stem, int(digits) if digits else 0)


@lru_cache(maxsize=None)
def _load_builtin(name: str) -> Multifilter:
    if name.startswith(BALANCED_PREFIX):
        base = _load_builtin(name[len(BALANCED_PREFIX):])
        return balance_scalar_filter(base)
    recs = _builtin_records()
    if name not in recs:
        raise FilterError(f"unknown filter family {name!r}; known: {', '.join(list_filters())}")
    return filter_from_record(recs[name])


def load_filter(source: FilterSource, registry=None) -> Multifilter:
    """Load and validate a filter.

    ``source`` may be a built-in family name (``"db4"``, ``"dghm"``,
    ``"bal-db5"``, ...), a path to a JSON filter file, or an already parsed
    record.  With ``registry`` set to a directory, names are first looked up
    as ``<registry>/<name>.json``.
    """
    if isinstance(source, Mapping):
        return filter_from_record(source)
    if isinstance(source, Path) or str(source).endswith(".json"):
        path = Path(source)
        try:
            return filter_from_record(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise FilterError(f"cannot read filter file {path}: {exc}") from exc
    name = str(source)
    if registry is not None:
        candidate = Path(registry) / f"{name}.json"
        if candidate.exists():
            return load_filter(candidate)
    return _load_builtin(name)


def balance_scalar_filter(base: Multifilter) -> Multifilter:
    """Regroup a scalar filter into a balanced multiplicity-2 multifilter.

    The returned multiscaling vector is ``(sqrt(2) phi(2x), sqrt(2) phi(2x-1))``
    where ``phi`` is the scaling function of ``base``.  Row 1 of ``H_k`` is
    ``(h_{2k}, h_{2k+1})`` and row 2 is ``(h_{2k-2}, h_{2k-1})``; the wavelet
    filter is regrouped the same way.
    """
    if base.multiplicity != 1:
        raise FilterError(f"{base.name}: balancing needs a scalar filter (r=1), got r={base.multiplicity}")
    lo, hi = base.support
    if lo % 2:
        # keep row-1 taps on even offsets from the new origin
        h = np.concatenate([[0.0], base.lowpass[:, 0, 0]])
        g = None if base.highpass is None else np.concatenate([[0.0], base.highpass[:, 0, 0]])
        lo -= 1
    else:
        h = base.lowpass[:, 0, 0]
        g = None if base.highpass is None else base.highpass[:, 0, 0]
    # scalar tap n lives at absolute index lo + n
    nmat = (len(h) + 1) // 2 + 1

    def regroup(taps):
        padded = np.zeros(2 * nmat + 2)
        padded[2 : 2 + len(taps)] = taps  # padded[m + 2] = taps[m]
        mats = np.zeros((nmat, 2, 2))
        for k in range(nmat):
            mats[k, 0] = padded[2 * k + 2 : 2 * k + 4]
            mats[k, 1] = padded[2 * k : 2 * k + 2]
        return mats

    lowpass = regroup(h)
    highpass = None if g is None else regroup(g)
    # trim all-zero trailing matrices
    while nmat > 2 and not np.any(lowpass[-1]) and (highpass is None or not np.any(highpass[-1])):
        nmat -= 1
        lowpass = lowpass[:-1]
        highpass = None if highpass is None else highpass[:-1]
    first = lo // 2
    # phi(2x - 1) ends at (hi + 1) / 2; trailing zero taps can end it sooner
    support = (first, min(-(-(hi + 1) // 2), first + nmat - 1))
    return Multifilter(BALANCED_PREFIX + base.name, 2, support, lowpass, highpass)
