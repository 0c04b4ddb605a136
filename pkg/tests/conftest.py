from functools import lru_cache

import pytest

from mwde import cascade, load_filter


@lru_cache(maxsize=None)
def _table(name, depth=10):
    return cascade(load_filter(name), depth=depth)


@pytest.fixture(scope="session")
def table():
    """Cached cascade tables keyed by family name."""
    return _table


@pytest.fixture(scope="session")
def full_sweep():
    """Five densities x every table family x levels -2..3 at N = 10000, master seed 0."""
    from mwde.bench import ExperimentConfig, run_benchmark

    config = ExperimentConfig()
    return config, run_benchmark(config)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
