"""Shared fixtures: the synthetic one-factor recipe and cached ensembles."""

import numpy as np
import pytest

from corrwishart.core import (
    AspectRatio,
    CorrelationMatrix,
    OneFactorConfig,
    estimate_correlation,
    one_factor_series,
)
from corrwishart.montecarlo import run_ensemble

SEED = 20260826

#: one-per-criterion summary lines collected by the acceptance tests;
#: replayed after the run so output capture cannot hide them
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def recipe40():
    """The 40x100 one-factor recipe: blocks (20,12,8), s_noise=4."""
    cfg = OneFactorConfig(block_sizes=(20, 12, 8), n=100, s_noise=4.0, seed=SEED)
    series = one_factor_series(cfg)
    C = estimate_correlation(series)
    spec = C.spectrum()
    return {
        "cfg": cfg,
        "C": C,
        "spectrum": spec,
        "aspect": AspectRatio(40 / 100),
    }


@pytest.fixture(scope="session")
def recipe40_doubled(recipe40):
    C = recipe40["C"]
    C2 = CorrelationMatrix(np.kron(C.entries, np.eye(2)))
    return {
        "C": C2,
        "spectrum": C2.spectrum(),
        "aspect": recipe40["aspect"],
    }


@pytest.fixture(scope="session")
def bulk40(recipe40):
    """Support and separated-outlier count of the 40x100 spectrum."""
    from corrwishart import outliers, saddle

    spec = recipe40["spectrum"]
    a = recipe40["aspect"]
    sup = saddle.support(spec, a)
    nsep = sum(r.separated for r in outliers.classify_outliers(spec, a, sup))
    return spec, a, sup, nsep


@pytest.fixture(scope="session")
def ensemble40(recipe40):
    """10^5 eigenvalue samples of the 40x100 ensemble."""
    return run_ensemble(recipe40["C"], 100, 100_000, seed=SEED + 1)


@pytest.fixture(scope="session")
def ensemble80(recipe40_doubled):
    """10^5 samples of the doubled (80x200) ensemble."""
    return run_ensemble(recipe40_doubled["C"], 200, 100_000, seed=SEED + 2)
