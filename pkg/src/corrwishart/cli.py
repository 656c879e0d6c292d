"""Command-line front end tying the analytic and Monte Carlo pipelines together.

Every run writes its fully resolved configuration to ``run-manifest.txt``
(key=value lines) in the output directory, so any run can be reproduced by
feeding that file back through ``--config``.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import core, gapcdf, localstats, montecarlo, outliers, saddle
from .core import AspectRatio, EmpiricalSpectrum

__all__ = ["main", "parse_config", "RunConfig"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

STOCHASTIC = {"simulate", "hist", "extremes", "local-stats", "compare-degeneracy"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """Fully resolved parameters of one CLI invocation."""

    command: str
    params: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.params[name.replace("_", "-")]
        except KeyError:
            raise AttributeError(name) from None


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="corrwishart",
        description="Spectral statistics of correlated real Wishart ensembles.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, helptext, spectrum=True, seedless=True):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="key=value config file; flags override")
        s.add_argument("--out", default=".", help="output directory")
        if spectrum:
            s.add_argument("--spectrum", help="spectrum file (value [mult] lines)")
            s.add_argument("--gamma-sq", type=float, help="aspect ratio p/n")
            s.add_argument("--degeneracy", type=int, default=1, help="l factor")
        if name in STOCHASTIC:
            s.add_argument("--seed", type=int, help="mandatory RNG seed")
            s.add_argument("--samples", type=int, default=10000)
            s.add_argument("--workers", type=int, default=1)
            s.add_argument("--n", type=int, help="number of columns")
        return s

    s = add("density", "macroscopic level density on a grid")
    s.add_argument("--grid", default="0:4:400", help="min:max:points")

    add("support", "support intervals of the macroscopic density")

    add("outliers", "positions and widths of separated outliers")

    s = add("simulate", "sample a Wishart eigenvalue ensemble to disk")

    s = add("hist", "empirical eigenvalue density histogram")
    s.add_argument("--bins", type=int, default=200)
    s.add_argument("--exclude-top", type=int, default=0)
    s.add_argument("--ensemble", help="reuse a persisted ensemble directory")

    s = add("extremes", "largest/smallest eigenvalue samples")
    s.add_argument("--which", choices=["largest", "smallest"], default="largest")
    s.add_argument("--exclude-top", type=int, default=0)
    s.add_argument("--ensemble", help="reuse a persisted ensemble directory")

    s = add("gap-cdf", "analytic largest-eigenvalue CDF (doubly degenerate)")
    s.add_argument("--n", type=int, required=False)
    s.add_argument("--t-min", type=float, default=None)
    s.add_argument("--t-max", type=float, default=None)
    s.add_argument("--points", type=int, default=25)
    s.add_argument("--dps", type=int, default=None, help="working precision")

    s = add("local-stats", "unfolded spacing statistics against GOE/Poisson")
    s.add_argument("--x", type=float, help="bulk reference point")
    s.add_argument("--bins", type=int, default=60)

    s = add("compare-degeneracy", "C vs C (x) 1_2 pipelines, KS/TV report")
    s.add_argument("--bins", type=int, default=200)

    s = add("ingest", "time series CSV -> correlation matrix -> spectrum", spectrum=False)
    s.add_argument("--series", help="CSV of p rows x n columns")

    return ap


def _read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise OSError(f"cannot read config {path}: {e}") from e
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"malformed config line: {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_config(argv) -> RunConfig:
    """Parse flags (+ optional config file) into a validated RunConfig."""
    ap = _build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        if e.code not in (0, None):
            raise UsageError("bad command line") from None
        raise
    params = {}
    explicit = {
        a.lstrip("-").split("=")[0] for a in argv if a.startswith("--")
    }
    file_vals = _read_config_file(ns.config) if ns.config else {}
    overridden = []
    for key, val in vars(ns).items():
        if key in ("command", "config"):
            continue
        name = key.replace("_", "-")
        if name in file_vals and name not in explicit:
            raw = file_vals[name]
            if val is not None and not isinstance(val, str):
                raw = type(val)(raw)
            params[name] = raw
        else:
            if name in file_vals:
                overridden.append(name)
            params[name] = val
    for name, raw in file_vals.items():
        params.setdefault(name, raw)
    cfg = RunConfig(ns.command, params)
    cfg.params["command"] = ns.command
    cfg.params["overridden-by-flag"] = ",".join(overridden)
    if ns.command in STOCHASTIC and params.get("seed") is None:
        raise UsageError(f"--seed is mandatory for `{ns.command}`")
    return cfg


def _write_manifest(cfg: RunConfig, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    lines = [f"{k}={v}" for k, v in sorted(cfg.params.items()) if v is not None]
    (outdir / "run-manifest.txt").write_text("\n".join(lines) + "\n")


def _write_csv(path: Path, header: list[str], columns, meta: dict) -> None:
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w") as f:
        for k, v in meta.items():
            f.write(f"# {k} = {v}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(f"{v:.12g}" for v in row) + "\n")


def _write_plot_script(outdir: Path, csvname: str, xlabel: str, ylabel: str) -> None:
    stem = csvname.rsplit(".", 1)[0]
    script = f"""\
#!/usr/bin/env python3
# plot helper generated alongside {csvname}
import numpy as np
import matplotlib.pyplot as plt

with open("{csvname}") as f:
    lines = [l for l in f if not l.startswith("#")]
data = np.genfromtxt(lines, delimiter=",", names=True)
cols = data.dtype.names
plt.plot(data[cols[0]], data[cols[1]])
plt.xlabel("{xlabel}")
plt.ylabel("{ylabel}")
plt.tight_layout()
plt.savefig("{stem}.png", dpi=150)
"""
    (outdir / f"plot-{stem}.py").write_text(script)


def _load_problem(cfg: RunConfig):
    if not cfg.params.get("spectrum"):
        raise UsageError("--spectrum is required")
    if cfg.params.get("gamma-sq") is None:
        raise UsageError("--gamma-sq is required")
    s = core.load_spectrum(cfg.params["spectrum"])
    l = int(cfg.params.get("degeneracy") or 1)
    if l > 1:
        s = core.degenerate_spectrum(s, l)
    a = AspectRatio(float(cfg.params["gamma-sq"]))
    return s, a


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, npts = text.split(":")
        return np.linspace(float(lo), float(hi), int(npts))
    except ValueError as e:
        raise UsageError(f"bad grid spec {text!r} (want min:max:points)") from e


def _correlation_from_spectrum(s: EmpiricalSpectrum):
    return core.CorrelationMatrix(np.diag(s.expanded(with_degeneracy=True)))


def _get_ensemble(cfg: RunConfig, s, outdir: Path):
    if cfg.params.get("ensemble"):
        return montecarlo.load_ensemble(cfg.params["ensemble"])
    if cfg.params.get("n") is None:
        raise UsageError("--n is required when sampling")
    C = _correlation_from_spectrum(s)
    return montecarlo.run_ensemble(
        C,
        int(cfg.params["n"]),
        int(cfg.params["samples"]),
        int(cfg.params["seed"]),
        workers=int(cfg.params.get("workers") or 1),
    )


def _cmd_density(cfg: RunConfig, outdir: Path) -> None:
    s, a = _load_problem(cfg)
    xs = _parse_grid(cfg.params.get("grid") or "0:4:400")
    ys = saddle.density_grid(xs, s, a)
    meta = {"command": "density", "gamma_sq": a.gamma_sq, "p": s.p}
    _write_csv(outdir / "density.csv", ["x", "R1"], [xs, ys], meta)
    _write_plot_script(outdir, "density.csv", "x", "R1(x)")


def _cmd_support(cfg: RunConfig, outdir: Path) -> None:
    s, a = _load_problem(cfg)
    sup = saddle.support(s, a)
    los = [i[0] for i in sup.intervals]
    his = [i[1] for i in sup.intervals]
    _write_csv(
        outdir / "support.csv",
        ["lower", "upper"],
        [los, his],
        {"command": "support", "intervals": len(los)},
    )


def _cmd_outliers(cfg: RunConfig, outdir: Path) -> None:
    s, a = _load_problem(cfg)
    sup = saddle.support(s, a)
    reports = outliers.classify_outliers(s, a, sup)
    _write_csv(
        outdir / "outliers.csv",
        ["lambda_o", "x0", "width", "valid", "separated"],
        [
            [r.lambda_o for r in reports],
            [r.x0 for r in reports],
            [r.width if r.width is not None else np.nan for r in reports],
            [float(r.valid) for r in reports],
            [float(r.separated) for r in reports],
        ],
        {"command": "outliers", "count": len(reports)},
    )


def _cmd_simulate(cfg: RunConfig, outdir: Path) -> None:
    s, _ = _load_problem(cfg)
    if cfg.params.get("n") is None:
        raise UsageError("--n is required for simulate")
    C = _correlation_from_spectrum(s)
    montecarlo.run_ensemble(
        C,
        int(cfg.params["n"]),
        int(cfg.params["samples"]),
        int(cfg.params["seed"]),
        workers=int(cfg.params.get("workers") or 1),
        out=outdir / "ensemble",
    )


def _cmd_hist(cfg: RunConfig, outdir: Path) -> None:
    s, _ = _load_problem(cfg)
    ens = _get_ensemble(cfg, s, outdir)
    h = montecarlo.histogram_density(
        ens,
        bins=int(cfg.params.get("bins") or 200),
        exclude_top=int(cfg.params.get("exclude-top") or 0),
    )
    _write_csv(
        outdir / "hist.csv",
        ["x", "density"],
        [h.centers, h.heights],
        {"command": "hist", "samples": ens.count},
    )
    _write_plot_script(outdir, "hist.csv", "x", "density")


def _cmd_extremes(cfg: RunConfig, outdir: Path) -> None:
    s, _ = _load_problem(cfg)
    ens = _get_ensemble(cfg, s, outdir)
    vals = montecarlo.extreme_samples(
        ens,
        which=cfg.params.get("which") or "largest",
        exclude_top=int(cfg.params.get("exclude-top") or 0),
    )
    std = montecarlo.standardize(
        vals, mirror=(cfg.params.get("which") == "smallest")
    )
    _write_csv(
        outdir / "extremes.csv",
        ["value", "standardized"],
        [np.sort(vals), np.sort(std)],
        {"command": "extremes", "which": cfg.params.get("which"), "count": vals.size},
    )


def _cmd_gap_cdf(cfg: RunConfig, outdir: Path) -> None:
    if not cfg.params.get("spectrum"):
        raise UsageError("--spectrum is required")
    if cfg.params.get("n") is None:
        raise UsageError("--n is required for gap-cdf")
    s = core.load_spectrum(cfg.params["spectrum"])
    n = int(cfg.params["n"])
    lam = s.expanded()
    t_max = cfg.params.get("t-max")
    t_max = float(t_max) if t_max is not None else 6.0 * float(np.max(lam))
    t_min = cfg.params.get("t-min")
    t_min = float(t_min) if t_min is not None else t_max / 50.0
    pts = int(cfg.params.get("points") or 25)
    dps = cfg.params.get("dps")
    table = gapcdf.gap_cdf_table(
        np.linspace(t_min, t_max, pts),
        lam,
        n,
        dps=int(dps) if dps else None,
    )
    _write_csv(
        outdir / "gap-cdf.csv",
        ["t", "E"],
        [table.t, table.values],
        {"command": "gap-cdf", "n": n, "p": len(lam)},
    )
    _write_plot_script(outdir, "gap-cdf.csv", "t", "E(t)")


def _cmd_local_stats(cfg: RunConfig, outdir: Path) -> None:
    s, a = _load_problem(cfg)
    ens = _get_ensemble(cfg, s, outdir)
    x = cfg.params.get("x")
    if x is None:
        sup = saddle.support(s, a)
        lo, hi = sup.intervals[0]
        x = 0.5 * (lo + hi)
    x = float(x)
    n_cols = int(cfg.params["n"]) if cfg.params.get("n") else None
    eigs = ens.samples()
    dim = s.effective_dimension
    window = []
    r1 = saddle.density(x, s, a)
    half = 10.0 / (r1 * dim)
    for row in eigs:
        sel = row[(row > x - half) & (row < x + half)]
        window.append(sel)
    flat = [localstats.unfold_bulk(w, x, s, a).values for w in window if w.size >= 2]
    spac = np.concatenate([np.diff(np.sort(v)) for v in flat])
    h = localstats.spacing_histogram(spac, bins=int(cfg.params.get("bins") or 60))
    ref = localstats.wigner_surmise(h.centers)
    _write_csv(
        outdir / "spacings.csv",
        ["s", "density", "wigner"],
        [h.centers, h.heights, ref],
        {"command": "local-stats", "x": x, "spacings": spac.size},
    )
    _write_plot_script(outdir, "spacings.csv", "s", "P(s)")


def _cmd_compare_degeneracy(cfg: RunConfig, outdir: Path) -> None:
    s, a = _load_problem(cfg)
    s2 = core.degenerate_spectrum(s, 2)
    seed = int(cfg.params["seed"])
    count = int(cfg.params["samples"])
    if cfg.params.get("n") is None:
        raise UsageError("--n is required for compare-degeneracy")
    n = int(cfg.params["n"])
    bins = int(cfg.params.get("bins") or 200)
    results = {}
    for tag, spec in (("base", s), ("doubled", s2)):
        C = _correlation_from_spectrum(spec)
        ens = montecarlo.run_ensemble(
            C, n, count, seed + (0 if tag == "base" else 1),
            workers=int(cfg.params.get("workers") or 1),
        )
        sup = saddle.support(spec, a)
        n_out = sum(
            r.separated for r in outliers.classify_outliers(spec, a, sup)
        )
        excl = n_out * spec.degeneracy_l
        h = montecarlo.histogram_density(ens, bins=bins, exclude_top=excl)
        ext = montecarlo.standardize(
            montecarlo.extreme_samples(ens, "largest", exclude_top=excl)
        )
        results[tag] = (h, ext)
        _write_csv(
            outdir / f"bulk-{tag}.csv",
            ["x", "density"],
            [h.centers, h.heights],
            {"command": "compare-degeneracy", "variant": tag},
        )
    hb, eb = results["base"]
    hd, ed = results["doubled"]
    tv = montecarlo.histogram_tv(hb, hd)
    ks = montecarlo.ks_distance(eb, ed)
    report = (
        f"bulk_tv={tv:.6f}\n"
        f"extreme_ks={ks:.6f}\n"
        f"samples={count}\nn={n}\nseed={seed}\n"
    )
    (outdir / "report.txt").write_text(report)


def _cmd_ingest(cfg: RunConfig, outdir: Path) -> None:
    if not cfg.params.get("series"):
        raise UsageError("--series is required for ingest")
    ts = core.load_time_series_csv(cfg.params["series"])
    C = core.estimate_correlation(ts)
    spec = C.spectrum()
    core.save_spectrum(spec, outdir / "spectrum.txt")
    _write_csv(
        outdir / "correlation-eigs.csv",
        ["value", "multiplicity"],
        [spec.values, spec.multiplicities],
        {"command": "ingest", "p": ts.p, "n": ts.n},
    )


_COMMANDS = {
    "density": _cmd_density,
    "support": _cmd_support,
    "outliers": _cmd_outliers,
    "simulate": _cmd_simulate,
    "hist": _cmd_hist,
    "extremes": _cmd_extremes,
    "gap-cdf": _cmd_gap_cdf,
    "local-stats": _cmd_local_stats,
    "compare-degeneracy": _cmd_compare_degeneracy,
    "ingest": _cmd_ingest,
}


def run(cfg: RunConfig) -> int:
    outdir = Path(cfg.params.get("out") or ".")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        _write_manifest(cfg, outdir)
        _COMMANDS[cfg.command](cfg, outdir)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except (
        ArithmeticError,
        np.linalg.LinAlgError,
        saddle.SaddleError,
        gapcdf.GapCdfError,
        ValueError,
    ) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
