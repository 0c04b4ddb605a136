"""Density x family x resolution sweeps scored by integrated square error."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .basis import BasisSpec
from .cascade import DEFAULT_DEPTH, cascade
from .densities import ZOO, get_density
from .estimator import estimate, normalize, reconstruct
from .metrics import QuadratureGrid, ise
from .multifilter import list_filters, load_filter

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "best_per_density",
    "cell_seed",
    "run_benchmark",
    "write_results",
    "write_summary",
]

logger = logging.getLogger(__name__)

TABLE_FAMILIES = (
    [f"db{n}" for n in range(2, 11)]
    + [f"sym{n}" for n in range(4, 11)]
    + [f"coif{n}" for n in range(1, 6)]
    + [f"bal-db{n}" for n in range(2, 11)]
    + ["cl2", "cl3", "dghm", "stt"]
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    densities: list = field(default_factory=lambda: list(ZOO))
    families: list = field(default_factory=lambda: list(TABLE_FAMILIES))
    levels: tuple = (-2, 3)
    sample_size: int = 10000
    seed: int = 0
    grid_points: int = 4096
    normalize: bool = True
    per_cell_seed: bool = False
    depth: int = DEFAULT_DEPTH
    workers: int = 1
    results_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self):
        self.levels = tuple(int(j) for j in self.levels)
        if len(self.levels) != 2 or self.levels[0] > self.levels[1]:
            raise ConfigError(f"levels must be [j_lo, j_hi] with j_lo <= j_hi, got {self.levels}")
        if self.sample_size < 1:
            raise ConfigError(f"sample_size must be >= 1, got {self.sample_size}")
        if self.grid_points < 2:
            raise ConfigError(f"grid_points must be >= 2, got {self.grid_points}")
        if not self.densities or not self.families:
            raise ConfigError("need at least one density and one family")
        for name in self.densities:
            if name not in ZOO:
                raise ConfigError(f"unknown density {name!r}; known: {', '.join(ZOO)}")
        known = set(list_filters())
        for name in self.families:
            if name not in known:
                raise ConfigError(f"unknown family {name!r}")

    @classmethod
    def from_json(cls, source) -> "ExperimentConfig":
        if isinstance(source, (str, Path)):
            try:
                source = json.loads(Path(source).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
        names = {f.name for f in fields(cls)}
        unknown = set(source) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**source)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def level_range(self) -> range:
        return range(self.levels[0], self.levels[1] + 1)


@dataclass(frozen=True)
class ExperimentResult:
    density: str
    family: str
    multiplicity: int
    level: int
    ise: float
    ise_raw: float
    coefficient_count: int
    stored_alpha: int
    seed: int
    n: int
    raw_mass: float
    negative_mass: float
    shift: float
    mass: float
    min_value: float
    status: str = "ok"

    @property
    def method(self) -> str:
        return "MWDE" if self.multiplicity > 1 else "WDE"


def cell_seed(master: int, *keys) -> int:
    """Stable 63-bit seed from the master seed and cell keys."""
    text = "|".join(str(k) for k in (master, *keys))
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little") >> 1


def _run_cell(config, density, family, table, level, samples, seed, grid, truth):
    spec = BasisSpec(table, level, density.domain)
    est = estimate(spec, samples)
    raw = reconstruct(est, grid)
    ise_raw = ise(raw, truth, grid)
    if config.normalize:
        est = normalize(est, grid)
        score = ise(est.values, truth, grid)
        diag = est.normalization
    else:
        score = ise_raw
        diag = {
            "raw_mass": grid.integrate(raw),
            "negative_mass": 0.0 - grid.integrate(np.minimum(raw, 0)),
            "shift": 0.0,
            "mass": grid.integrate(raw),
            "min_value": float(raw.min()),
        }
    return ExperimentResult(
        density=density.name,
        family=family,
        multiplicity=table.multiplicity,
        level=level,
        ise=score,
        ise_raw=ise_raw,
        coefficient_count=spec.coefficient_count,
        stored_alpha=est.coefficients.alpha.size,
        seed=seed,
        n=samples.size,
        raw_mass=diag["raw_mass"],
        negative_mass=diag["negative_mass"],
        shift=diag["shift"],
        mass=diag["mass"],
        min_value=diag["min_value"],
    )


def _failed(density, family, level, seed, n, exc, multiplicity=0):
    nan = float("nan")
    return ExperimentResult(density, family, multiplicity, level, nan, nan, 0, 0, seed, n, nan, nan, nan, nan, nan,
                            status=f"error: {exc}")


def run_benchmark(config: ExperimentConfig) -> list[ExperimentResult]:
    """One result per (density, family, level) cell, in canonical order.

    Samples are shared by every cell of a density unless ``per_cell_seed``
    is set.  A failing cell yields a result with an ``error`` status.
    """
    tables = {}
    table_errors = {}
    for name in config.families:
        try:
            tables[name] = cascade(load_filter(name), depth=config.depth)
        except Exception as exc:  # recorded per cell
            table_errors[name] = exc

    jobs = []
    for dname in config.densities:
        density = get_density(dname)
        grid = QuadratureGrid.over(density.domain, config.grid_points)
        # samples are domain-truncated, so score against the truncated density
        truth = density.truncated_pdf(grid.x)
        shared_seed = cell_seed(config.seed, dname)
        shared = density.sample(config.sample_size, shared_seed)
        for family in config.families:
            for level in config.level_range:
                if config.per_cell_seed:
                    seed = cell_seed(config.seed, dname, family, level)
                    samples = None
                else:
                    seed, samples = shared_seed, shared
                jobs.append((density, family, level, seed, samples, grid, truth))

    def work(job):
        density, family, level, seed, samples, grid, truth = job
        if family in table_errors:
            return _failed(density.name, family, level, seed, config.sample_size, table_errors[family])
        table = tables[family]
        try:
            if samples is None:
                samples = density.sample(config.sample_size, seed)
            return _run_cell(config, density, family, table, level, samples, seed, grid, truth)
        except Exception as exc:
            logger.warning("cell %s/%s/j=%d failed: %s", density.name, family, level, exc)
            return _failed(density.name, family, level, seed, config.sample_size, exc, table.multiplicity)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    return _canonical(results, config)


def _canonical(results, config):
    dorder = {d: i for i, d in enumerate(config.densities)}
    forder = {f: i for i, f in enumerate(config.families)}
    return sorted(results, key=lambda r: (dorder[r.density], forder[r.family], r.level))


RESULT_COLUMNS = [f.name for f in fields(ExperimentResult)]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results(results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            row = asdict(r)
            w.writerow([_fmt(row[c]) for c in RESULT_COLUMNS])


def read_results(path) -> list[ExperimentResult]:
    types = {f.name: f.type for f in fields(ExperimentResult)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            vals = {}
            for k, v in row.items():
                t = types[k]
                vals[k] = int(v) if t == "int" else float(v) if t == "float" else v
            out.append(ExperimentResult(**vals))
    return out


def best_per_density(results) -> dict:
    """Minimum-ISE WDE (r = 1) and MWDE (r >= 2) row for each density.

    Ties go to the coarser level, then fewer coefficients, then family name.
    A class without any successful row maps to ``None``.
    """
    if not results:
        raise ValueError("no results")
    table = {}
    for r in results:
        table.setdefault(r.density, {"MWDE": None, "WDE": None})
        if r.status != "ok" or not np.isfinite(r.ise):
            continue
        key = (r.ise, r.level, r.coefficient_count, r.family)
        cur = table[r.density][r.method]
        if cur is None or key < (cur.ise, cur.level, cur.coefficient_count, cur.family):
            table[r.density][r.method] = r
    return table


SUMMARY_COLUMNS = [
    "density",
    "mwde_family", "mwde_ise_e3", "mwde_level", "mwde_coefficients",
    "wde_family", "wde_ise_e3", "wde_level", "wde_coefficients",
]


def _sig3(v):
    return f"{v * 1e3:.3g}"


def write_summary(best: dict, path) -> None:
    """Best-per-density table; ISE in units of 1e-3 with three significant figures."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for density, slots in best.items():
            row = [density]
            for cls in ("MWDE", "WDE"):
                r = slots[cls]
                row += ["", "", "", ""] if r is None else [r.family, _sig3(r.ise), r.level, r.coefficient_count]
            w.writerow(row)
