"""Monte Carlo sampling of correlated real Wishart ensembles.

A sample is W W^T with W = C^{1/2} X / sqrt(n), X a p x n standard-normal
matrix, so that <W W^T> = C.  Every sample k draws from its own
counter-based Philox stream derived from (seed, k); results are therefore
byte-identical regardless of worker count or chunking.

Persisted layout of an ensemble directory:

    meta.json       parameters, hash of C, chunk table
    chunk-0000.bin  fixed-width little-endian float64, samples x dim,
                    eigenvalues ascending per sample
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CorrelationMatrix

__all__ = [
    "EigenvalueEnsemble",
    "HistogramDensity",
    "sample_wishart_eigs",
    "run_ensemble",
    "load_ensemble",
    "histogram_density",
    "extreme_samples",
    "standardize",
    "ks_distance",
    "histogram_tv",
    "tv_to_density",
]

CHUNK_SAMPLES = 4096
_EIG_CLIP = -1e-10


@dataclass(frozen=True)
class HistogramDensity:
    """Unit-integral histogram estimate of a density."""

    edges: np.ndarray
    heights: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        widths = np.diff(self.edges)
        total = float(np.sum(self.heights * widths))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"histogram integral {total} != 1")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass(frozen=True)
class EigenvalueEnsemble:
    """Sorted eigenvalue samples of one Wishart ensemble."""

    meta: dict
    _samples: np.ndarray | None = None
    directory: Path | None = None

    @property
    def count(self) -> int:
        return int(self.meta["count"])

    @property
    def dim(self) -> int:
        return int(self.meta["dim"])

    def samples(self) -> np.ndarray:
        """All samples as a (count, dim) array, loading from disk if needed."""
        if self._samples is not None:
            return self._samples
        parts = [
            np.fromfile(self.directory / name, dtype="<f8").reshape(-1, self.dim)
            for name in self.meta["chunks"]
        ]
        arr = np.concatenate(parts, axis=0)
        object.__setattr__(self, "_samples", arr)
        return arr

    def export_csv(self, path) -> None:
        np.savetxt(path, self.samples(), delimiter=",")


def _rng_for_sample(seed: int, k: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(k,))
    return np.random.Generator(np.random.Philox(ss))


def sample_wishart_eigs(C: CorrelationMatrix, n: int, seed: int, k: int = 0) -> np.ndarray:
    """Eigenvalues (ascending) of one draw of W W^T for sample index k."""
    if n < C.p:
        raise ValueError(f"n={n} must be >= p={C.p}")
    rng = _rng_for_sample(seed, k)
    x = rng.standard_normal((C.p, n))
    w = C.sqrt() @ x / np.sqrt(n)
    eigs = np.linalg.eigvalsh(w @ w.T)
    if eigs[0] < _EIG_CLIP * max(1.0, eigs[-1]):
        raise RuntimeError(f"eigensolver returned eigenvalue {eigs[0]} < 0")
    return np.clip(eigs, 0.0, None)


def _compute_chunk(sqrt_c: np.ndarray, n: int, seed: int, start: int, size: int) -> np.ndarray:
    p = sqrt_c.shape[0]
    xs = np.empty((size, p, n))
    for i in range(size):
        xs[i] = _rng_for_sample(seed, start + i).standard_normal((p, n))
    w = np.matmul(sqrt_c, xs) / np.sqrt(n)
    eigs = np.linalg.eigvalsh(np.matmul(w, np.swapaxes(w, 1, 2)))
    return np.clip(eigs, 0.0, None)


def _chunk_worker(args) -> tuple[int, str]:
    sqrt_c, n, seed, start, size, path = args
    arr = _compute_chunk(sqrt_c, n, seed, start, size)
    arr.astype("<f8").tofile(path)
    return start, os.path.basename(path)


def run_ensemble(
    C: CorrelationMatrix,
    n: int,
    count: int,
    seed: int,
    workers: int = 1,
    out: Path | str | None = None,
    chunk_samples: int = CHUNK_SAMPLES,
) -> EigenvalueEnsemble:
    """Sample ``count`` eigenvalue spectra, optionally persisted to ``out``.

    Deterministic for a given (seed, count) regardless of ``workers``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if n < C.p:
        raise ValueError(f"n={n} must be >= p={C.p}")
    sqrt_c = C.sqrt()
    starts = list(range(0, count, chunk_samples))
    sizes = [min(chunk_samples, count - s) for s in starts]
    meta = {
        "c_hash": C.content_hash(),
        "p": C.p,
        "n": n,
        "dim": C.p,
        "count": count,
        "seed": seed,
        "chunk_samples": chunk_samples,
    }

    if out is None:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(
                    pool.map(
                        _compute_chunk_star,
                        [(sqrt_c, n, seed, s, z) for s, z in zip(starts, sizes)],
                    )
                )
        else:
            parts = [_compute_chunk(sqrt_c, n, seed, s, z) for s, z in zip(starts, sizes)]
        meta["chunks"] = []
        return EigenvalueEnsemble(meta, np.concatenate(parts, axis=0))

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        (sqrt_c, n, seed, s, z, str(out / f"chunk-{i:04d}.bin"))
        for i, (s, z) in enumerate(zip(starts, sizes))
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_chunk_worker, jobs))
    else:
        done = [_chunk_worker(j) for j in jobs]
    done.sort(key=lambda t: t[0])
    meta["chunks"] = [name for _, name in done]
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return EigenvalueEnsemble(meta, None, out)


def _compute_chunk_star(args):
    return _compute_chunk(*args)


def load_ensemble(directory) -> EigenvalueEnsemble:
    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())
    return EigenvalueEnsemble(meta, None, directory)


def _retained(e: EigenvalueEnsemble, exclude_top: int) -> np.ndarray:
    samples = e.samples()
    if exclude_top < 0 or exclude_top >= e.dim:
        raise ValueError(f"exclude_top must be in [0, {e.dim})")
    if exclude_top:
        samples = samples[:, : e.dim - exclude_top]
    return samples


def histogram_density(
    e: EigenvalueEnsemble,
    bins: int = 200,
    hist_range: tuple[float, float] | None = None,
    exclude_top: int = 0,
) -> HistogramDensity:
    """Histogram over all retained eigenvalues, normalized to unit integral.

    ``exclude_top`` removes the largest eigenvalues of every sample
    (outlier removal) before binning.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    flat = _retained(e, exclude_top).ravel()
    if hist_range is not None:
        flat = flat[(flat >= hist_range[0]) & (flat <= hist_range[1])]
    if flat.size == 0:
        raise ValueError("no eigenvalues retained for the histogram")
    counts, edges = np.histogram(flat, bins=bins, range=hist_range)
    widths = np.diff(edges)
    heights = counts / (counts.sum() * widths)
    return HistogramDensity(edges, heights, counts)


def extreme_samples(
    e: EigenvalueEnsemble, which: str = "largest", exclude_top: int = 0
) -> np.ndarray:
    """Per-sample extreme eigenvalue after removing exclude_top largest."""
    retained = _retained(e, exclude_top)
    if which == "largest":
        return retained[:, -1].copy()
    if which == "smallest":
        return retained[:, 0].copy()
    raise ValueError("which must be 'largest' or 'smallest'")


def standardize(samples, mirror: bool = False) -> np.ndarray:
    """Affine map to zero mean and unit variance by sample moments.

    ``mirror=True`` flips the sign first (used for smallest-eigenvalue
    samples, which are mirrored at the origin before comparison with
    largest-eigenvalue references).
    """
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least two samples")
    if mirror:
        arr = -arr
    sd = arr.std()
    if sd == 0:
        raise ValueError("zero variance")
    return (arr - arr.mean()) / sd


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic in [0, 1]."""
    from scipy.stats import ks_2samp

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample set")
    return float(ks_2samp(a, b, method="asymp").statistic)


def histogram_tv(a: HistogramDensity, b: HistogramDensity) -> float:
    """Total-variation distance of two histograms on identical binning."""
    if not np.array_equal(a.edges, b.edges):
        raise ValueError("histograms use different binnings")
    widths = np.diff(a.edges)
    return float(0.5 * np.sum(np.abs(a.heights - b.heights) * widths))


def tv_to_density(h: HistogramDensity, f, subdiv: int = 8) -> float:
    """Total-variation distance of a histogram to a density callable.

    The callable is averaged over ``subdiv`` points per bin.
    """
    widths = np.diff(h.edges)
    avg = np.empty(len(widths))
    for i, (lo, w) in enumerate(zip(h.edges[:-1], widths)):
        pts = lo + (np.arange(subdiv) + 0.5) / subdiv * w
        avg[i] = np.mean([f(float(x)) for x in pts])
    return float(0.5 * np.sum(np.abs(h.heights - avg) * widths))
