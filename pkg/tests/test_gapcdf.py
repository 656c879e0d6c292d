import numpy as np
import pytest

from corrwishart.gapcdf import (
    GapCdfError,
    build_kernel,
    gap_cdf,
    gap_cdf_table,
    h_norm,
    kernel_g2,
    log_h_norm,
    pfaffian,
    pfaffian_log,
    q_hat,
)


def random_antisymmetric(rng, m):
    a = rng.standard_normal((m, m))
    return a - a.T


def test_pfaffian_2x2():
    a = np.array([[0.0, 3.5], [-3.5, 0.0]])
    assert pfaffian(a) == pytest.approx(3.5)


def test_pfaffian_squared_is_determinant():
    rng = np.random.default_rng(42)
    for _ in range(30):
        m = 2 * rng.integers(1, 7)
        a = random_antisymmetric(rng, m)
        assert pfaffian(a) ** 2 == pytest.approx(np.linalg.det(a), rel=1e-8)


def test_pfaffian_rejects_bad_input():
    with pytest.raises(ValueError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pfaffian(np.ones((2, 2)))


def test_pfaffian_log_sign():
    a = np.array([[0.0, -2.0], [2.0, 0.0]])
    sign, logmag = pfaffian_log(a)
    assert sign == -1.0
    assert logmag == pytest.approx(np.log(2.0))


def test_h_norm_positive_and_consistent():
    for n in (2, 3, 6):
        for j in range(n):
            assert h_norm(j, n) > 0
            assert np.log(h_norm(j, n)) == pytest.approx(log_h_norm(j, n))
    with pytest.raises(GapCdfError):
        log_h_norm(5, 3)


def test_q_hat_even_is_imaginary():
    for l, n in ((0, 2), (1, 3)):
        v = q_hat("even", l, n, 1.5, dps=30)
        assert abs(v.real) < 1e-9 * max(abs(v.imag), 1e-12)


def test_q_hat_rejects_bad_regime():
    with pytest.raises(GapCdfError):
        q_hat("even", 3, 2, 1.0)
    with pytest.raises(GapCdfError):
        q_hat("middle", 0, 2, 1.0)
    with pytest.raises(GapCdfError):
        q_hat("even", 0, 2, -1.0)


def test_kernel_g2_antisymmetric():
    v12 = kernel_g2(1.0, 2.0, 3)
    v21 = kernel_g2(2.0, 1.0, 3)
    assert v12 == pytest.approx(-v21, rel=1e-10)
    assert kernel_g2(1.3, 1.3, 3) == pytest.approx(0.0, abs=1e-12)


def test_build_kernel_matrix_shape():
    K = build_kernel(2.0, (1.0, 2.0), 3)
    assert K.matrix.shape == (2, 2)
    np.testing.assert_allclose(K.matrix, -K.matrix.T, atol=1e-12)


def test_gap_cdf_input_validation():
    with pytest.raises(GapCdfError):
        gap_cdf(1.0, (1.0, 2.0, 3.0), 5)  # odd p unsupported
    with pytest.raises(GapCdfError):
        gap_cdf(1.0, (1.0, 1.0), 5)  # confluent
    with pytest.raises(GapCdfError):
        gap_cdf(1.0, (1.0, 2.0, 3.0, 4.0), 1)  # p > 2n
    with pytest.raises(GapCdfError):
        gap_cdf(-1.0, (1.0, 2.0), 5)


def test_gap_cdf_table_monotone_cdf():
    ts = np.array([0.5, 1.5, 2.5, 3.5, 4.5, 6.0, 8.0, 25.0])
    table = gap_cdf_table(ts, (1.0, 2.0), 3)
    v = table.values
    assert np.all(v >= 0.0) and np.all(v <= 1.0)
    assert np.all(np.diff(v) >= -1e-6)
    assert v[-1] == pytest.approx(1.0, abs=1e-4)
    assert v[0] < 0.05


def test_gap_cdf_median_matches_mc_n3():
    # quick single-point check against a direct 20000-sample simulation
    from corrwishart.core import CorrelationMatrix
    from corrwishart.montecarlo import extreme_samples, run_ensemble

    C = CorrelationMatrix(np.diag([1.0, 1.0, 2.0, 2.0]))
    ens = run_ensemble(C, 6, 20_000, seed=33)
    lmax = extreme_samples(ens, "largest")
    t = float(np.median(lmax))
    assert gap_cdf(t, (1.0, 2.0), 3) == pytest.approx(0.5, abs=0.02)
