"""Scalar saddle-point solver, macroscopic level density, and support edges.

The macroscopic level density of the correlated real Wishart ensemble is
obtained from the unique upper-half-plane root q0(x) of

    ghat(q, x) = -x - 1/q + (gamma^2/p) sum_i m_i Lambda_i / (1 + Lambda_i q) = 0

via R1(x) = Im q0(x) / (gamma^2 pi).  q0 / gamma^2 is the Stieltjes
transform of R1.  Support edges sit at x = g(q*) for the real critical
points g'(q*) = 0 of g(q) = -1/q + (gamma^2/p) sum_i m_i Lambda_i/(1+Lambda_i q).

Note on g'': direct differentiation gives the coefficient 2 in

    g''(q) = -2/q^3 + (2 gamma^2 / p) sum_i m_i Lambda_i^3/(1+Lambda_i q)^3

which is what this module implements; the Marchenko-Pastur cross-check
(edge coefficient 0.4001 for Lambda = 1, gamma^2 = 0.25) confirms it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AspectRatio, EmpiricalSpectrum

__all__ = [
    "SaddleSolution",
    "SpectralSupport",
    "SaddleError",
    "g_funcs",
    "solve_saddle",
    "density",
    "density_grid",
    "support",
    "edge_coefficient",
]

RESIDUAL_TOL = 1e-10
POLE_GUARD = 1e-12
_FP_MAX_ITER = 200
_FP_DAMPING = 0.5


class SaddleError(RuntimeError):
    """Saddle-point evaluation failure (pole hit, non-convergence)."""


@dataclass(frozen=True)
class SaddleSolution:
    """Root of the saddle equation at one evaluation point x."""

    x: float
    q0: complex
    residual: float
    in_support: bool


@dataclass(frozen=True)
class SpectralSupport:
    """Disjoint support intervals of the macroscopic density.

    ``edge_coeffs`` maps each soft edge position to the constant c in
    R1(x) ~ c sqrt(|x - x_edge|) on the support side.  For gamma^2 = 1
    the origin is a hard edge (1/sqrt(x) divergence) without such a
    coefficient.
    """

    intervals: tuple[tuple[float, float], ...]
    edge_coeffs: dict[float, float]
    hard_edge_at_origin: bool

    @property
    def edges(self) -> tuple[float, ...]:
        return tuple(x for lo_hi in self.intervals for x in lo_hi)

    def contains(self, x: float, margin: float = 0.0) -> bool:
        return any(lo - margin <= x <= hi + margin for lo, hi in self.intervals)


def _params(s: EmpiricalSpectrum, a: AspectRatio):
    lam = np.asarray(s.values, dtype=float)
    weight = np.asarray(s.multiplicities, dtype=float) * (a.gamma_sq / s.p)
    return lam, weight


def g_funcs(q, s: EmpiricalSpectrum, a: AspectRatio):
    """Evaluate (g, g', g'') at q (real or complex, scalar).

    Raises SaddleError if q sits within the pole guard of 0 or any
    -1/Lambda_i.
    """
    lam, w = _params(s, a)
    q = complex(q)
    scale = 1.0 / s.mean_value
    if abs(q) < POLE_GUARD * scale:
        raise SaddleError("evaluation at pole q=0")
    if abs(q) > 1e100:
        raise SaddleError("runaway iterate |q| > 1e100")
    d = 1.0 + lam * q
    if np.any(np.abs(d) < 1e-14):
        raise SaddleError("evaluation at pole q=-1/Lambda")
    g = -1.0 / q + np.sum(w * lam / d)
    g1 = 1.0 / q**2 - np.sum(w * lam**2 / d**2)
    g2 = -2.0 / q**3 + 2.0 * np.sum(w * lam**3 / d**3)
    return g, g1, g2


def _saddle_poly(x: float, s: EmpiricalSpectrum, a: AspectRatio) -> np.ndarray:
    """Coefficients (highest first) of ghat(q,x) * q * prod(1 + Lambda_i q).

    Multiplicities enter through the weights only, so the degree is
    m + 1 with m the number of distinct values.
    """
    lam, w = _params(s, a)
    # prod over distinct poles (1 + Lambda_i q)
    prod = np.array([1.0])
    for L in lam:
        prod = np.convolve(prod, np.array([L, 1.0]))
    poly = np.convolve(prod, np.array([-x, 0.0]))  # -x q prod
    poly = _polyadd(poly, -prod)  # - prod
    for i, L in enumerate(lam):
        rest = np.array([1.0])
        for j, Lj in enumerate(lam):
            if j != i:
                rest = np.convolve(rest, np.array([Lj, 1.0]))
        term = np.convolve(rest, np.array([w[i] * L, 0.0]))  # w L q rest
        poly = _polyadd(poly, term)
    return poly


def _polyadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[len(a) - len(b):] += b
    return out


def _residual(q: complex, x: float, s, a) -> float:
    try:
        g, _, _ = g_funcs(q, s, a)
    except (SaddleError, OverflowError):
        return float("inf")
    return abs(-x + g)


def _polish(q: complex, x: float, s, a, steps: int = 50) -> complex:
    """Newton refinement of ghat(q,x)=0 from a starting iterate."""
    for _ in range(steps):
        try:
            g, g1, _ = g_funcs(q, s, a)
        except (SaddleError, OverflowError):
            break
        f = -x + g
        if abs(f) < 1e-14:
            break
        if g1 == 0:
            break
        q = q - f / g1
    return q


def solve_saddle(x: float, s: EmpiricalSpectrum, a: AspectRatio) -> SaddleSolution:
    """The unique contributing root of ghat(q, x) = 0 with Im q >= 0.

    Inside the support this is the upper-half-plane root; outside it is
    the real root at which g has positive slope.  A damped fixed-point
    iteration is tried first, with companion-matrix polynomial roots as
    the exhaustive fallback.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    lam, w = _params(s, a)
    scale = 1.0 / s.mean_value
    im_threshold = 1e-8 * scale

    def S(q):
        return np.sum(w * lam / (1.0 + lam * q))

    # damped fixed point q <- 1/(S(q) - x)
    q = 1j * scale
    converged = False
    for _ in range(_FP_MAX_ITER):
        try:
            q_new = 1.0 / (S(q) - x)
        except ZeroDivisionError:
            break
        q_next = (1.0 - _FP_DAMPING) * q + _FP_DAMPING * q_new
        if abs(q_next - q) < 1e-15 * max(1.0, abs(q)):
            q = q_next
            converged = True
            break
        q = q_next
    if converged:
        if q.imag < 0:
            q = q.conjugate()
        q = _polish(q, x, s, a)
        res = _residual(q, x, s, a)
        if res < RESIDUAL_TOL and q.imag > -1e-13 * scale:
            q0 = complex(q.real, max(q.imag, 0.0))
            return SaddleSolution(x, q0, res, q0.imag > im_threshold)

    # fallback: all roots of the cleared-denominator polynomial
    roots = np.roots(_saddle_poly(x, s, a))
    roots = np.array([_polish(r, x, s, a) for r in roots])
    candidates = [
        (complex(r), _residual(complex(r), x, s, a))
        for r in roots
        if r.imag > im_threshold
    ]
    candidates = [(q, res) for q, res in candidates if res < RESIDUAL_TOL]
    if candidates:
        q, res = max(candidates, key=lambda t: t[0].imag)
        return SaddleSolution(x, q, res, True)
    # no complex root: pick the real root with positive slope of g
    best = None
    for r in roots:
        if abs(r.imag) > 1e-6 * scale:
            continue
        qr = _polish(complex(r.real, 0.0), x, s, a)
        qr = complex(qr.real, 0.0)
        try:
            g, g1, _ = g_funcs(qr, s, a)
        except SaddleError:
            continue
        res = abs(-x + g)
        if g1 > 0 and res < RESIDUAL_TOL:
            if best is None or res < best[1]:
                best = (qr, res)
    if best is not None:
        return SaddleSolution(x, best[0], best[1], False)
    # report best iterate
    res_all = [(_residual(complex(r), x, s, a), complex(r)) for r in roots]
    res_all.sort(key=lambda t: t[0])
    raise SaddleError(
        f"saddle solver failed at x={x}: best residual {res_all[0][0]:.3e} "
        f"at q={res_all[0][1]}"
    )


def density(x: float, s: EmpiricalSpectrum, a: AspectRatio) -> float:
    """Macroscopic level density R1(x) = Im q0(x) / (gamma^2 pi).

    The generic n - p zero modes at the origin are not part of R1.
    """
    if x <= 0.0:
        return 0.0
    sol = solve_saddle(x, s, a)
    if not sol.in_support:
        return 0.0
    return sol.q0.imag / (a.gamma_sq * np.pi)


def density_grid(xs, s: EmpiricalSpectrum, a: AspectRatio) -> np.ndarray:
    return np.array([density(float(x), s, a) for x in np.asarray(xs, float)])


def _gprime_zeros_in(lo: float, hi: float, s, a, probes: int = 64):
    """Real zeros of g' in the open interval (lo, hi) by sign bracketing.

    ``lo``/``hi`` may be pole positions or -inf; evaluation points keep a
    relative margin away from them.  g' is convex where negative, so at
    most two zeros occur between poles.
    """
    from scipy.optimize import brentq

    lam, w = _params(s, a)
    span_scale = 1.0 / s.mean_value

    def g1(q):
        return 1.0 / q**2 - np.sum(w * lam**2 / (1.0 + lam * q) ** 2)

    if np.isinf(lo):
        width = max(10.0 / abs(hi), 10.0 * span_scale) if hi != 0 else 10.0 * span_scale
        left = hi - width
        # widen until g' sign at the far end settles (g' -> 1/q^2 > 0)
        for _ in range(60):
            if g1(left) > 0:
                break
            width *= 2.0
            left = hi - width
        grid = hi - np.geomspace(1e-9 * abs(hi), width, probes)[::-1]
    else:
        eps = 1e-9 * (hi - lo)
        grid = lo + (hi - lo) * (
            0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, probes)))
        )
        grid = np.clip(grid, lo + eps, hi - eps)
    vals = np.array([g1(q) for q in grid])
    zeros = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            zeros.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            zeros.append(brentq(g1, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16))
    return zeros


def support(s: EmpiricalSpectrum, a: AspectRatio) -> SpectralSupport:
    """Locate all support intervals and soft-edge coefficients.

    Edges are x = g(q*) at the real critical points of g: the unique one
    in (-1/Lambda_max, 0) (global upper edge), the unique one left of
    -1/Lambda_min when gamma^2 < 1 (global lower edge), and zero or two
    per interval between consecutive poles (interior gaps).
    """
    lam = np.asarray(s.values, dtype=float)
    poles = np.sort(-1.0 / lam)  # ascending: -1/Lambda_min ... -1/Lambda_max
    hard_edge = a.gamma_sq >= 1.0

    crit: list[float] = []
    crit += _gprime_zeros_in(poles[-1], 0.0, s, a)
    if not hard_edge:
        crit += _gprime_zeros_in(-np.inf, poles[0], s, a)
    for lo, hi in zip(poles[:-1], poles[1:]):
        crit += _gprime_zeros_in(lo, hi, s, a)

    edge_list = []
    for q in crit:
        g, _, g2 = g_funcs(q, s, a)
        edge_list.append((float(np.real(g)), float(q), float(np.real(g2))))
    xs = sorted(e[0] for e in edge_list)
    if hard_edge:
        xs = [0.0] + xs
    if len(xs) % 2 != 0:
        raise SaddleError(f"unpaired support edges: {xs}")
    intervals = tuple(
        (xs[i], xs[i + 1]) for i in range(0, len(xs), 2) if xs[i + 1] > xs[i]
    )
    coeffs: dict[float, float] = {}
    for x_edge, q_star, g2 in edge_list:
        if abs(g2) >= 1e-10:
            coeffs[x_edge] = float(
                np.sqrt(2.0 / abs(g2)) / (a.gamma_sq * np.pi)
            )
    return SpectralSupport(intervals, coeffs, bool(hard_edge))


def edge_coefficient(
    x_edge: float, q_star: float, s: EmpiricalSpectrum, a: AspectRatio
) -> float:
    """Coefficient c of the square-root law R1 ~ c sqrt(|x - x_edge|)."""
    g, g1, g2 = g_funcs(q_star, s, a)
    if abs(g1) > 1e-8 * max(1.0, abs(g2)):
        raise ValueError("q_star is not a critical point of g")
    if abs(g2) < 1e-10:
        raise SaddleError("multicritical edge (Pearcey regime), unsupported")
    return float(np.sqrt(2.0 / abs(g2)) / (a.gamma_sq * np.pi))


def edge_critical_point(x_edge: float, s: EmpiricalSpectrum, a: AspectRatio) -> float:
    """The real critical point q* with g(q*) = x_edge (nearest match)."""
    lam = np.asarray(s.values, dtype=float)
    poles = np.sort(-1.0 / lam)
    crit = _gprime_zeros_in(poles[-1], 0.0, s, a)
    if a.gamma_sq < 1.0:
        crit += _gprime_zeros_in(-np.inf, poles[0], s, a)
    for lo, hi in zip(poles[:-1], poles[1:]):
        crit += _gprime_zeros_in(lo, hi, s, a)
    if not crit:
        raise SaddleError("no critical points found")
    best = min(crit, key=lambda q: abs(np.real(g_funcs(q, s, a)[0]) - x_edge))
    if abs(np.real(g_funcs(best, s, a)[0]) - x_edge) > 1e-6 * max(1.0, abs(x_edge)):
        raise SaddleError(f"no critical point maps to edge {x_edge}")
    return float(best)
