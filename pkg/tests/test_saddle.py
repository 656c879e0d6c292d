import time

import numpy as np
import pytest

from corrwishart.core import AspectRatio, degenerate_spectrum, spectrum_from_values
from corrwishart.saddle import (
    SaddleError,
    density,
    density_grid,
    edge_critical_point,
    solve_saddle,
    support,
)


def mp_density(x, g2):
    """Closed-form Marchenko-Pastur density for unit eigenvalues."""
    g = np.sqrt(g2)
    lo, hi = (1 - g) ** 2, (1 + g) ** 2
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > lo) & (x < hi)
    xi = x[inside]
    out[inside] = np.sqrt((hi - xi) * (xi - lo)) / (2 * np.pi * g2 * xi)
    return out


@pytest.mark.parametrize("g2", [0.25, 0.5, 1.0])
def test_matches_marchenko_pastur(g2):
    s = spectrum_from_values([1.0])
    a = AspectRatio(g2)
    g = np.sqrt(g2)
    lo, hi = (1 - g) ** 2, (1 + g) ** 2
    xs = np.linspace(lo + 1e-3, hi - 1e-3, 200)
    got = density_grid(xs, s, a)
    np.testing.assert_allclose(got, mp_density(xs, g2), atol=1e-8)


def test_mp_support_endpoints():
    for g2 in (0.25, 0.5):
        sup = support(spectrum_from_values([1.0]), AspectRatio(g2))
        g = np.sqrt(g2)
        assert len(sup.intervals) == 1
        assert sup.intervals[0][0] == pytest.approx((1 - g) ** 2, abs=1e-10)
        assert sup.intervals[0][1] == pytest.approx((1 + g) ** 2, abs=1e-10)


def test_hard_edge_divergence():
    # gamma^2 = 1: density ~ 1/(pi sqrt(x)) near the origin for MP
    s = spectrum_from_values([1.0])
    a = AspectRatio(1.0)
    for x in (1e-4, 1e-5):
        assert density(x, s, a) * np.pi * np.sqrt(x) / np.sqrt(1 - x / 4) == (
            pytest.approx(1.0, rel=1e-3)
        )


def test_density_vanishes_outside_support():
    s = spectrum_from_values([1.0, 2.0])
    a = AspectRatio(0.4)
    sup = support(s, a)
    hi = sup.intervals[-1][1]
    assert density(hi + 0.5, s, a) == pytest.approx(0.0, abs=1e-10)


def test_density_integrates_to_one():
    s = spectrum_from_values([0.5, 1.0, 3.0], [2, 3, 1])
    a = AspectRatio(0.6)
    sup = support(s, a)
    total = 0.0
    for lo, hi in sup.intervals:
        xs = np.linspace(lo + 1e-9, hi - 1e-9, 2001)
        total += np.trapezoid(density_grid(xs, s, a), xs)
    assert total == pytest.approx(1.0, abs=2e-3)


def test_split_support_two_widely_separated_values():
    s = spectrum_from_values([1.0, 20.0], [1, 1])
    a = AspectRatio(0.5)
    sup = support(s, a)
    assert len(sup.intervals) == 2
    gap_mid = 0.5 * (sup.intervals[0][1] + sup.intervals[1][0])
    assert density(gap_mid, s, a) == pytest.approx(0.0, abs=1e-10)


def test_saddle_solution_in_upper_half_plane():
    s = spectrum_from_values([0.7, 1.5])
    a = AspectRatio(0.5)
    sol = solve_saddle(1.0, s, a)
    assert sol.q0.imag > 0
    assert density(1.0, s, a) == pytest.approx(sol.q0.imag / (a.gamma_sq * np.pi))


def test_degeneracy_invariance_exact():
    s = spectrum_from_values([0.5, 1.0, 2.5], [1, 2, 1])
    a = AspectRatio(0.5)
    xs = np.linspace(0.05, 5.0, 60)
    base = density_grid(xs, s, a)
    sup = support(s, a)
    for l in (2, 3, 5):
        sl = degenerate_spectrum(s, l)
        np.testing.assert_allclose(density_grid(xs, sl, a), base, atol=1e-12)
        supl = support(sl, a)
        np.testing.assert_allclose(supl.edges, sup.edges, atol=1e-12)


def test_edge_critical_point_is_real_root():
    s = spectrum_from_values([1.0])
    a = AspectRatio(0.25)
    hi = (1 + 0.5) ** 2
    q = edge_critical_point(hi, s, a)
    # saddle equation holds at the edge with the real critical q*
    lhs = -1.0 / q + a.gamma_sq * 1.0 / (1 + q)
    assert lhs == pytest.approx(hi, rel=1e-8)


def test_runtime_budget_grid():
    s = spectrum_from_values([1.0])
    a = AspectRatio(0.5)
    xs = np.linspace(0.05, 2.8, 600)
    t0 = time.time()
    density_grid(xs, s, a)
    assert time.time() - t0 < 2.0
