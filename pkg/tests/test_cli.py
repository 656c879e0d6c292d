import numpy as np
import pytest

from corrwishart.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main, parse_config


@pytest.fixture()
def two_spec(tmp_path):
    path = tmp_path / "two.txt"
    path.write_text("1.0 1\n2.0 1\n")
    return str(path)


@pytest.fixture()
def mp_spec(tmp_path):
    path = tmp_path / "mp.txt"
    path.write_text("1.0 8\n")
    return str(path)


def read_csv(path):
    with open(path) as f:
        lines = [l for l in f if not l.startswith("#")]
    return np.genfromtxt(lines, delimiter=",", names=True)


def test_missing_seed_is_usage_error(two_spec, tmp_path):
    code = main(
        ["simulate", "--spectrum", two_spec, "--gamma-sq", "0.25",
         "--n", "8", "--out", str(tmp_path / "o")]
    )
    assert code == EXIT_USAGE


def test_config_file_flag_override(two_spec, tmp_path):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text(f"spectrum={two_spec}\ngamma-sq=0.25\ngrid=0:4:100\n")
    out = tmp_path / "out"
    code = main(
        ["density", "--config", str(cfgfile), "--grid", "0:4:50",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    manifest = (out / "run-manifest.txt").read_text()
    assert "grid=0:4:50" in manifest
    assert "overridden-by-flag=grid" in manifest
    data = read_csv(out / "density.csv")
    assert data.shape[0] == 50


def test_density_matches_mp_closed_form(mp_spec, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["density", "--spectrum", mp_spec, "--gamma-sq", "0.25",
         "--grid", "0.3:2.2:80", "--out", str(out)]
    )
    assert code == EXIT_OK
    data = read_csv(out / "density.csv")
    x = data["x"]
    g2 = 0.25
    lo, hi = (1 - 0.5) ** 2, (1 + 0.5) ** 2
    mp_law = np.where(
        (x > lo) & (x < hi),
        np.sqrt(np.abs((hi - x) * (x - lo))) / (2 * np.pi * g2 * x),
        0.0,
    )
    np.testing.assert_allclose(data["R1"], mp_law, atol=1e-7)
    assert (out / "plot-density.py").exists()


def test_support_csv(two_spec, tmp_path):
    out = tmp_path / "out"
    assert (
        main(["support", "--spectrum", two_spec, "--gamma-sq", "0.1",
              "--out", str(out)])
        == EXIT_OK
    )
    data = read_csv(out / "support.csv")
    assert data.size >= 1


def test_gap_cdf_monotone_csv(two_spec, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["gap-cdf", "--spectrum", two_spec, "--n", "6", "--t-min", "1",
         "--t-max", "12", "--points", "8", "--out", str(out)]
    )
    assert code == EXIT_OK
    data = read_csv(out / "gap-cdf.csv")
    assert np.all(np.diff(data["E"]) >= -1e-6)
    assert data["E"][-1] > 0.95


def test_gap_cdf_odd_p_numeric_error(tmp_path):
    spec = tmp_path / "odd.txt"
    spec.write_text("1.0 1\n2.0 1\n3.0 1\n")
    code = main(
        ["gap-cdf", "--spectrum", str(spec), "--n", "6",
         "--out", str(tmp_path / "o")]
    )
    assert code == EXIT_NUMERIC


def test_simulate_hist_roundtrip(two_spec, tmp_path):
    out = tmp_path / "sim"
    code = main(
        ["simulate", "--spectrum", two_spec, "--gamma-sq", "0.25",
         "--n", "8", "--samples", "300", "--seed", "5", "--out", str(out)]
    )
    assert code == EXIT_OK
    out2 = tmp_path / "hist"
    code = main(
        ["hist", "--spectrum", two_spec, "--gamma-sq", "0.25",
         "--ensemble", str(out / "ensemble"), "--bins", "20",
         "--seed", "5", "--out", str(out2)]
    )
    assert code == EXIT_OK
    data = read_csv(out2 / "hist.csv")
    widths = data["x"][1] - data["x"][0]
    assert np.sum(data["density"] * widths) == pytest.approx(1.0, abs=0.01)


def test_extremes_output(two_spec, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["extremes", "--spectrum", two_spec, "--gamma-sq", "0.25",
         "--n", "8", "--samples", "200", "--seed", "9", "--out", str(out)]
    )
    assert code == EXIT_OK
    data = read_csv(out / "extremes.csv")
    assert data.shape[0] == 200
    assert abs(np.mean(data["standardized"])) < 1e-9


def test_ingest_writes_spectrum(tmp_path):
    rng = np.random.default_rng(3)
    series = rng.standard_normal((4, 30))
    path = tmp_path / "ts.csv"
    np.savetxt(path, series, delimiter=",")
    out = tmp_path / "out"
    assert main(["ingest", "--series", str(path), "--out", str(out)]) == EXIT_OK
    assert (out / "spectrum.txt").exists()
    data = read_csv(out / "correlation-eigs.csv")
    assert int(np.sum(data["multiplicity"])) == 4


def test_manifest_reproduces_run(mp_spec, tmp_path):
    out1 = tmp_path / "a"
    main(["density", "--spectrum", mp_spec, "--gamma-sq", "0.5",
          "--grid", "0.2:3:40", "--out", str(out1)])
    out2 = tmp_path / "b"
    code = main(
        ["density", "--config", str(out1 / "run-manifest.txt"), "--out", str(out2)]
    )
    assert code == EXIT_OK
    assert (out1 / "density.csv").read_text().replace(str(out1), "") == (
        out2 / "density.csv"
    ).read_text().replace(str(out2), "")


def test_parse_config_requires_command():
    from corrwishart.cli import UsageError

    with pytest.raises(UsageError):
        parse_config([])
