"""Command-line entry point ``mwde``.

Exit codes: 0 success, 1 configuration or input error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .basis import BasisSpec
from .bench import ConfigError, ExperimentConfig, best_per_density, run_benchmark, write_results, write_summary
from .cascade import DEFAULT_DEPTH, DEFAULT_MAX_ITERS, DEFAULT_TOL, CascadeError, cascade
from .densities import ZOO, get_density
from .estimator import NormalizationError, estimate, export_estimate, normalize
from .metrics import DEFAULT_POINTS, QuadratureGrid
from .multifilter import FilterError, list_filters, load_filter

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("mwde")


class _Usage(Exception):
    pass


def _domain(text: str):
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"domain must look like A:B, got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"empty domain {text!r}")
    return a, b


def _glue_domain(argv):
    """``--domain -4:4`` -> ``--domain=-4:4`` so argparse does not read ``-4:4`` as a flag."""
    out, it = [], iter(argv)
    for a in it:
        if a == "--domain":
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and ":" in nxt:
                out.append(f"--domain={nxt}")
                continue
            out.append(a)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(a)
    return out


def _cmd_filters(args) -> int:
    for name in list_filters():
        f = load_filter(name)
        print(f"{name}\tr={f.multiplicity}\tsupport=[{f.support[0]},{f.support[1]}]"
              f"\tlength={f.length}\thighpass={'yes' if f.has_highpass else 'no'}")
    return EXIT_OK


def _cmd_densities(args) -> int:
    for name, d in ZOO.items():
        print(f"{name}\tcomponents={d.components}\tdomain=[{d.domain[0]:g},{d.domain[1]:g}]")
    return EXIT_OK


def _cmd_cascade(args) -> int:
    filt = load_filter(args.filter)
    table = cascade(filt, depth=args.depth, max_iters=args.max_iters, tol=args.tol)
    table.to_csv(args.out)
    log.info("%s: %d iterations, refinement residual %.3g", filt.name, table.iterations, table.refinement_residual)
    return EXIT_OK


def _read_samples(path):
    try:
        x = np.loadtxt(path, dtype=float, ndmin=1)
    except (OSError, ValueError) as exc:
        raise _Usage(f"cannot read samples from {path}: {exc}") from exc
    if x.ndim != 1:
        raise _Usage(f"{path}: expected one value per line")
    return x


def _cmd_estimate(args) -> int:
    filt = load_filter(args.filter)
    extra = {}
    if args.samples is not None:
        samples = _read_samples(args.samples)
        domain = args.domain or (-4.0, 4.0)
        extra["samples"] = str(args.samples)
    else:
        try:
            density = get_density(args.density)
        except KeyError as exc:
            raise _Usage(exc.args[0]) from exc
        domain = args.domain or density.domain
        samples = density.sample(args.n, args.seed)
        extra.update(density=density.name, seed=args.seed)
    a, b = domain
    if np.any((samples < a) | (samples > b)):
        raise _Usage(f"samples fall outside the domain [{a}, {b}]; pass --domain")
    table = cascade(filt, depth=args.depth)
    spec = BasisSpec(table, args.level, domain)
    est = estimate(spec, samples)
    grid = QuadratureGrid.over(domain, args.grid)
    if args.normalize:
        est = normalize(est, grid)
    export_estimate(est, args.out, grid=grid, extra=extra)
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.workers is not None:
        config.workers = args.workers
    out = args.out or config.results_path
    summary = args.summary or config.summary_path
    if out is None:
        raise _Usage("no results path: pass --out or set results_path in the config")
    results = run_benchmark(config)
    write_results(results, out)
    if summary is not None:
        write_summary(best_per_density(results), summary)
    failed = [r for r in results if r.status != "ok"]
    for r in failed:
        log.error("%s/%s/j=%d: %s", r.density, r.family, r.level, r.status)
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mwde", description="Wavelet and multiwavelet density estimation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("filters", help="filter registry")
    fs = f.add_subparsers(dest="action", required=True)
    fs.add_parser("list").set_defaults(func=_cmd_filters)

    d = sub.add_parser("densities", help="benchmark densities")
    ds = d.add_subparsers(dest="action", required=True)
    ds.add_parser("list").set_defaults(func=_cmd_densities)

    c = sub.add_parser("cascade", help="tabulate scaling functions on a dyadic grid")
    c.add_argument("--filter", required=True)
    c.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    c.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_cascade)

    e = sub.add_parser("estimate", help="single density estimate")
    e.add_argument("--filter", required=True)
    e.add_argument("--level", type=int, required=True)
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--samples", help="text file, one value per line")
    src.add_argument("--density", help="draw from a named benchmark density")
    e.add_argument("--n", type=int, default=10000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--domain", type=_domain, default=None, help="A:B (default: density domain or -4:4)")
    e.add_argument("--grid", type=int, default=DEFAULT_POINTS)
    e.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    e.add_argument("--normalize", action="store_true")
    e.add_argument("--out", required=True)
    e.set_defaults(func=_cmd_estimate)

    b = sub.add_parser("benchmark", help="density x family x level sweep")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.add_argument("--summary")
    b.add_argument("--workers", type=int)
    b.set_defaults(func=_cmd_benchmark)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_domain(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="mwde: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CascadeError, NormalizationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"mwde: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (_Usage, ConfigError, FilterError, KeyError, OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mwde: error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
