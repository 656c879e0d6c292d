"""Analytic and Monte Carlo spectral statistics of correlated Wishart ensembles."""

from . import core, gapcdf, localstats, montecarlo, outliers, saddle
from .core import (
    AspectRatio,
    CorrelationMatrix,
    EmpiricalSpectrum,
    OneFactorConfig,
    SpectrumError,
    TimeSeriesMatrix,
    degenerate_spectrum,
    estimate_correlation,
    load_spectrum,
    one_factor_series,
    spectrum_from_values,
)
from .gapcdf import GapCdfError, gap_cdf, gap_cdf_table, pfaffian
from .montecarlo import EigenvalueEnsemble, run_ensemble
from .outliers import OutlierReport, classify_outliers
from .saddle import SaddleError, SpectralSupport, density, solve_saddle, support

__version__ = "0.1.0"

__all__ = [
    "AspectRatio",
    "CorrelationMatrix",
    "EigenvalueEnsemble",
    "EmpiricalSpectrum",
    "GapCdfError",
    "OneFactorConfig",
    "OutlierReport",
    "SaddleError",
    "SpectralSupport",
    "SpectrumError",
    "TimeSeriesMatrix",
    "classify_outliers",
    "core",
    "degenerate_spectrum",
    "density",
    "estimate_correlation",
    "gap_cdf",
    "gap_cdf_table",
    "gapcdf",
    "load_spectrum",
    "localstats",
    "montecarlo",
    "one_factor_series",
    "outliers",
    "pfaffian",
    "run_ensemble",
    "saddle",
    "solve_saddle",
    "spectrum_from_values",
    "support",
]
