"""Domain types and data ingestion for correlated Wishart spectra.

Conventions
-----------
* The empirical correlation matrix ``C`` is the fixed input of the model;
  its eigenvalues are stored as a sorted list of distinct values with
  integer multiplicities plus a separate degeneracy factor ``l`` standing
  for the replacement ``C -> C (x) 1_l``.
* The correlation estimator uses the 1/n normalization (not 1/(n-1)).
  The model density is scaled so that the sample correlation matrix of an
  n-long series has mean C; 1/(n-1) would break that convention.  This is
  a documented choice, see README.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "EmpiricalSpectrum",
    "AspectRatio",
    "CorrelationMatrix",
    "OneFactorConfig",
    "TimeSeriesMatrix",
    "load_spectrum",
    "save_spectrum",
    "load_time_series_csv",
    "one_factor_series",
    "estimate_correlation",
    "degenerate_spectrum",
    "spectrum_from_values",
]

# Relative distance below which two eigenvalues are treated as one value
# with summed multiplicity.  The saddle solver needs distinct poles.
MERGE_RTOL = 1e-12


class SpectrumError(ValueError):
    """Invalid spectrum data (nonpositive value, empty input, ...)."""


@dataclass(frozen=True)
class EmpiricalSpectrum:
    """Distinct eigenvalues of the empirical correlation matrix.

    ``values`` are strictly increasing positive reals, ``multiplicities``
    the positive integer count of each.  ``p`` is the total number of
    eigenvalues (sum of multiplicities) *before* applying the degeneracy
    factor ``degeneracy_l``; the effective ensemble dimension is
    ``degeneracy_l * p``.
    """

    values: tuple[float, ...]
    multiplicities: tuple[int, ...]
    degeneracy_l: int = 1

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=int)
        if vals.size == 0:
            raise SpectrumError("empty spectrum")
        if vals.size != mult.size:
            raise SpectrumError("values and multiplicities length mismatch")
        if np.any(vals <= 0):
            raise SpectrumError("nonpositive eigenvalue")
        if np.any(np.diff(vals) <= 0):
            raise SpectrumError("values must be strictly increasing")
        if np.any(mult < 1):
            raise SpectrumError("multiplicities must be positive")
        if self.degeneracy_l < 1:
            raise SpectrumError("degeneracy factor must be >= 1")

    @property
    def p(self) -> int:
        """Number of eigenvalues counted with multiplicity (without l)."""
        return int(sum(self.multiplicities))

    @property
    def effective_dimension(self) -> int:
        """Matrix dimension l*p of the (possibly degenerate) ensemble."""
        return self.degeneracy_l * self.p

    @property
    def mean_value(self) -> float:
        return float(
            np.dot(self.values, self.multiplicities) / self.p
        )

    def expanded(self, with_degeneracy: bool = False) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending.

        With ``with_degeneracy=True`` each value is additionally repeated
        ``degeneracy_l`` times (the spectrum of Lambda (x) 1_l).
        """
        reps = np.asarray(self.multiplicities, dtype=int)
        if with_degeneracy:
            reps = reps * self.degeneracy_l
        return np.repeat(np.asarray(self.values, dtype=float), reps)


@dataclass(frozen=True)
class AspectRatio:
    """The ratio gamma^2 = p/n of matrix dimensions, in (0, 1]."""

    gamma_sq: float

    def __post_init__(self):
        if not (0.0 < self.gamma_sq <= 1.0):
            raise ValueError(f"gamma_sq must be in (0, 1], got {self.gamma_sq}")


@dataclass(frozen=True)
class TimeSeriesMatrix:
    """p series of length n as a dense real matrix (rows = series)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2:
            raise ValueError("time series matrix must be 2-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("time series contains non-finite entries")
        object.__setattr__(self, "data", arr)

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric positive semidefinite correlation matrix."""

    entries: np.ndarray
    _eigenvalues: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("correlation matrix must be square")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
            raise ValueError("correlation matrix must be symmetric within 1e-12")
        m = 0.5 * (m + m.T)
        object.__setattr__(self, "entries", m)
        eigs = np.linalg.eigvalsh(m)
        if eigs[0] < -1e-10 * max(1.0, abs(eigs[-1])):
            raise ValueError("correlation matrix has negative eigenvalues")
        object.__setattr__(self, "_eigenvalues", np.clip(eigs, 0.0, None))

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues, ascending, clipped at zero."""
        return self._eigenvalues

    def sqrt(self) -> np.ndarray:
        """Symmetric square root via eigendecomposition."""
        eigs, vecs = np.linalg.eigh(self.entries)
        return (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.T

    def degenerate(self, l: int) -> "CorrelationMatrix":
        """The Kronecker blow-up C (x) 1_l."""
        if l < 1:
            raise ValueError("degeneracy factor must be >= 1")
        return CorrelationMatrix(np.kron(self.entries, np.eye(l)))

    def spectrum(self, drop_below: float = 1e-10) -> EmpiricalSpectrum:
        """Empirical spectrum of this matrix (near-zero modes dropped)."""
        eigs = self.eigenvalues
        eigs = eigs[eigs > drop_below * max(1.0, eigs[-1])]
        if eigs.size == 0:
            raise SpectrumError("correlation matrix has no positive eigenvalues")
        return spectrum_from_values(eigs)

    def content_hash(self) -> str:
        return hashlib.sha256(
            np.ascontiguousarray(self.entries).tobytes()
        ).hexdigest()[:16]


@dataclass(frozen=True)
class OneFactorConfig:
    """Configuration of the synthetic one-factor time series model.

    Each block of ``block_sizes`` rows shares a single standard-normal
    factor series (perfect within-block correlation, independent across
    blocks); on top an i.i.d. standard-normal noise matrix scaled by
    ``s_noise`` is added.
    """

    block_sizes: tuple[int, ...]
    n: int
    s_noise: float
    seed: int

    def __post_init__(self):
        if len(self.block_sizes) == 0 or any(b < 1 for b in self.block_sizes):
            raise ValueError("block sizes must be positive integers")
        if self.s_noise < 0:
            raise ValueError("noise strength must be nonnegative")
        if self.n < self.p:
            raise ValueError(f"series length n={self.n} must be >= p={self.p}")

    @property
    def p(self) -> int:
        return int(sum(self.block_sizes))


def _merge_values(values: np.ndarray, multiplicities: np.ndarray):
    """Sort and merge values closer than MERGE_RTOL relative distance."""
    order = np.argsort(values)
    values = values[order]
    multiplicities = multiplicities[order]
    out_v: list[float] = []
    out_m: list[int] = []
    for v, m in zip(values, multiplicities):
        if out_v and (v - out_v[-1]) <= MERGE_RTOL * max(abs(v), abs(out_v[-1])):
            out_m[-1] += int(m)
        else:
            out_v.append(float(v))
            out_m.append(int(m))
    return tuple(out_v), tuple(out_m)


def spectrum_from_values(
    values, multiplicities=None, degeneracy_l: int = 1
) -> EmpiricalSpectrum:
    """Build a spectrum from raw eigenvalues, merging near-duplicates."""
    vals = np.atleast_1d(np.asarray(values, dtype=float))
    if multiplicities is None:
        mult = np.ones(vals.size, dtype=int)
    else:
        mult = np.atleast_1d(np.asarray(multiplicities, dtype=int))
    if np.any(vals <= 0):
        raise SpectrumError("nonpositive eigenvalue")
    v, m = _merge_values(vals, mult)
    return EmpiricalSpectrum(v, m, degeneracy_l)


def load_spectrum(path) -> EmpiricalSpectrum:
    """Read a spectrum from a text file: one "value [multiplicity]" per line.

    Blank lines and ``#`` comments are skipped.  Duplicated values are
    merged with summed multiplicities.
    """
    path = Path(path)
    values: list[float] = []
    mults: list[int] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise SpectrumError(f"{path}:{lineno}: expected 'value [multiplicity]'")
        try:
            value = float(parts[0])
            mult = int(parts[1]) if len(parts) == 2 else 1
        except ValueError as exc:
            raise SpectrumError(f"{path}:{lineno}: {exc}") from exc
        if value <= 0:
            raise SpectrumError(f"{path}:{lineno}: nonpositive eigenvalue {value}")
        if mult < 1:
            raise SpectrumError(f"{path}:{lineno}: nonpositive multiplicity {mult}")
        values.append(value)
        mults.append(mult)
    if not values:
        raise SpectrumError(f"{path}: empty spectrum file")
    return spectrum_from_values(np.array(values), np.array(mults))


def save_spectrum(spectrum: EmpiricalSpectrum, path) -> None:
    lines = [
        f"{v!r} {m}" for v, m in zip(spectrum.values, spectrum.multiplicities)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_time_series_csv(path) -> TimeSeriesMatrix:
    """Read a time-series matrix from CSV (rows = series, optional header)."""
    path = Path(path)
    rows: list[list[float]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            if lineno == 1 or (not rows and lineno <= 2):
                continue  # header row
            raise
    if not rows:
        raise ValueError(f"{path}: no numeric rows")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"{path}: ragged rows, lengths {sorted(lengths)}")
    return TimeSeriesMatrix(np.array(rows, dtype=float))


def one_factor_series(cfg: OneFactorConfig) -> TimeSeriesMatrix:
    """Synthesize T = T0 + s_noise * T1 per the one-factor model.

    T0 repeats one standard-normal factor series per block across that
    block's rows; T1 is i.i.d. standard normal.  Bit-reproducible for a
    fixed seed.
    """
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=cfg.seed))
    )
    factors = rng.standard_normal((len(cfg.block_sizes), cfg.n))
    signal = np.repeat(factors, cfg.block_sizes, axis=0)
    noise = rng.standard_normal((cfg.p, cfg.n))
    return TimeSeriesMatrix(signal + cfg.s_noise * noise)


def estimate_correlation(series: TimeSeriesMatrix) -> CorrelationMatrix:
    """Pearson correlation matrix with 1/n normalization.

    Rows are centered and scaled to unit sample variance, then
    C = (1/n) T~ T~^T, giving a unit diagonal.
    """
    data = series.data
    centered = data - data.mean(axis=1, keepdims=True)
    scale = np.sqrt((centered**2).mean(axis=1))
    dead = np.flatnonzero(scale == 0.0)
    if dead.size:
        raise ValueError(f"zero-variance row(s): {dead.tolist()}")
    normed = centered / scale[:, None]
    corr = (normed @ normed.T) / series.n
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(corr)


def degenerate_spectrum(s: EmpiricalSpectrum, l: int) -> EmpiricalSpectrum:
    """Apply Lambda -> Lambda (x) 1_l.

    Representation choice: the distinct values and their multiplicities
    stay fixed and the stored degeneracy factor is multiplied, so the
    normalized eigenvalue measure is preserved exactly and composition
    l1 then l2 equals l1*l2.
    """
    if l < 1:
        raise ValueError("degeneracy factor must be >= 1")
    return EmpiricalSpectrum(
        s.values, s.multiplicities, s.degeneracy_l * l
    )
