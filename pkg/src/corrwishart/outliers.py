"""Outlier positions, fluctuation widths, and validity classification.

An outlier is an empirical eigenvalue separated from the bulk of the
spectrum.  Its limiting peak position is slightly shifted from the raw
eigenvalue,

    x0 = Lambda_o * (1 + (gamma^2/p) sum_{j != o} m_j Lambda_j / (Lambda_o - Lambda_j)),

and the fluctuation width is

    dx0 = 2 gamma sqrt(1 - (gamma^2/p) sum_{j != o} m_j Lambda_j^2 / (Lambda_o - Lambda_j)^2)
          * Lambda_o / sqrt(p).

When the radicand is nonpositive the expansion behind these formulas
breaks down (typically two outliers too close together) and the width is
reported as invalid rather than raised as an error.

The sums run over distinct values weighted by multiplicity, and ``p``
excludes the stored degeneracy factor, which makes both quantities
exactly invariant under Lambda -> Lambda (x) 1_l.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AspectRatio, EmpiricalSpectrum
from .saddle import SpectralSupport

__all__ = [
    "OutlierReport",
    "outlier_position",
    "outlier_width",
    "classify_outliers",
    "outlier_shape_reference",
]

# Multiples of dx0 by which x0 must clear the support to count as separated.
DEFAULT_SEPARATION_MARGIN = 1.0


@dataclass(frozen=True)
class OutlierReport:
    lambda_o: float
    x0: float
    width: float | None
    valid: bool
    separated: bool


def _check_outlier_index(s: EmpiricalSpectrum, o: int) -> None:
    if not (0 <= o < len(s.values)):
        raise IndexError(f"outlier index {o} out of range")
    if s.p < 2:
        raise ValueError("need at least two eigenvalues")
    if s.multiplicities[o] > 1:
        raise ValueError(
            "degenerate outlier unsupported by expansion "
            f"(value {s.values[o]} has multiplicity {s.multiplicities[o]})"
        )


def outlier_position(s: EmpiricalSpectrum, o: int, a: AspectRatio) -> float:
    """Predicted peak position x0 of the outlier at value index ``o``."""
    _check_outlier_index(s, o)
    lam = np.asarray(s.values, dtype=float)
    mult = np.asarray(s.multiplicities, dtype=float)
    lo = lam[o]
    others = np.arange(lam.size) != o
    shift = np.sum(mult[others] * lam[others] / (lo - lam[others]))
    return float(lo * (1.0 + a.gamma_sq / s.p * shift))


def outlier_width(
    s: EmpiricalSpectrum, o: int, a: AspectRatio
) -> tuple[float | None, bool]:
    """Fluctuation width dx0 and validity flag.

    Returns ``(width, True)`` when the radicand is positive and
    ``(None, False)`` otherwise; invalidity is a result, not an error.
    """
    _check_outlier_index(s, o)
    lam = np.asarray(s.values, dtype=float)
    mult = np.asarray(s.multiplicities, dtype=float)
    lo = lam[o]
    others = np.arange(lam.size) != o
    radicand = 1.0 - a.gamma_sq / s.p * np.sum(
        mult[others] * lam[others] ** 2 / (lo - lam[others]) ** 2
    )
    if radicand <= 0.0:
        return None, False
    gamma = np.sqrt(a.gamma_sq)
    return float(2.0 * gamma * np.sqrt(radicand) * lo / np.sqrt(s.p)), True


def classify_outliers(
    s: EmpiricalSpectrum,
    a: AspectRatio,
    sup: SpectralSupport,
    separation_margin: float = DEFAULT_SEPARATION_MARGIN,
) -> list[OutlierReport]:
    """Analyze every eigenvalue whose predicted x0 falls outside the bulk.

    An isolated eigenvalue carries its own narrow band in the finite-p
    support, so candidacy is judged against the support of the spectrum
    with the candidate removed (the bulk it is supposed to separate
    from); the passed full-spectrum support is the fallback when that
    complement support cannot be computed.  Each candidate's position
    and width are analyzed against all remaining eigenvalues (including
    other outliers).  Reports are sorted by x0 descending.
    """
    from .saddle import support as _support

    reports: list[OutlierReport] = []
    for o, (value, mult) in enumerate(zip(s.values, s.multiplicities)):
        if mult > 1:
            continue  # expansion needs a simple pole
        x0 = outlier_position(s, o, a)
        rest_v = s.values[:o] + s.values[o + 1:]
        rest_m = s.multiplicities[:o] + s.multiplicities[o + 1:]
        try:
            bulk = _support(
                EmpiricalSpectrum(rest_v, rest_m, s.degeneracy_l), a
            )
        except Exception:
            bulk = sup
        if bulk.contains(x0):
            continue
        width, valid = outlier_width(s, o, a)
        margin = separation_margin * width if (valid and width) else 0.0
        separated = valid and not bulk.contains(x0, margin=margin)
        reports.append(OutlierReport(float(value), x0, width, valid, separated))
    reports.sort(key=lambda r: r.x0, reverse=True)
    return reports


def _goe_level_density_2(x: np.ndarray) -> np.ndarray:
    """Level density of the 2x2 GOE (unit-variance diagonal entries)."""
    from scipy.stats import norm

    phi = norm.pdf(x)
    Phi = norm.cdf(x)
    return np.sqrt(2.0) / 4.0 * np.exp(-0.5 * x**2) * (
        x * (2.0 * Phi - 1.0) + 2.0 * phi
    )


def outlier_shape_reference(
    l: int | float, grid, mc_draws: int = 10**6, mc_bins: int = 200, seed: int = 0
) -> np.ndarray:
    """Standardized l x l GOE level density evaluated on ``grid``.

    This is the reference shape of the eigenvalue cloud around an
    outlier with degeneracy l: closed form for l = 1 (standard normal)
    and l = 2, Monte Carlo (histogram, linear interpolation) for finite
    l >= 3, and the unit-variance semicircle for l = inf.
    """
    grid = np.asarray(grid, dtype=float)
    if l == np.inf:
        # semicircle on [-2, 2] already has unit variance
        out = np.zeros_like(grid)
        inside = np.abs(grid) < 2.0
        out[inside] = np.sqrt(4.0 - grid[inside] ** 2) / (2.0 * np.pi)
        return out
    l = int(l)
    if l < 1:
        raise ValueError("degeneracy must be >= 1")
    if l == 1:
        return np.exp(-0.5 * grid**2) / np.sqrt(2.0 * np.pi)
    if l == 2:
        raw = _goe_level_density_2
        # standardize: zero mean by symmetry, variance from quadrature
        from scipy.integrate import quad

        var = quad(lambda t: t**2 * raw(np.array([t]))[0], -np.inf, np.inf)[0]
        sd = np.sqrt(var)
        return raw(grid * sd) * sd
    # finite l >= 3: batched Monte Carlo over small GOE matrices
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    batch = max(1, 10**5 // l)
    samples = []
    remaining = mc_draws
    while remaining > 0:
        b = min(batch, remaining)
        m = rng.standard_normal((b, l, l))
        h = (m + np.swapaxes(m, 1, 2)) / np.sqrt(2.0)
        samples.append(np.linalg.eigvalsh(h).ravel())
        remaining -= b
    eigs = np.concatenate(samples)
    eigs = (eigs - eigs.mean()) / eigs.std()
    counts, edges = np.histogram(eigs, bins=mc_bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return np.interp(grid, centers, counts, left=0.0, right=0.0)
