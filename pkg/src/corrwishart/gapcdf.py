"""Analytic largest-eigenvalue CDF of the doubly degenerate ensemble.

For a correlation matrix Lambda (x) 1_2 with p distinct eigenvalues and a
(2p) x (2n) data matrix, the probability E(t) that no eigenvalue of W W^T
exceeds t has a closed Pfaffian form.  The building blocks are the skew
bilinear form

    <f, g> = integral sign(E1 - E2) f(E1) g(E2) dE1 dE2

over the weight w(E) = e^(iE+1) / (iE+1)^nu, nu = (2n+1)/2, the Cauchy-type
transforms T_j(x) = <E^j w, w/(iE+x+1)>, and the antisymmetric kernel

    K(x1, x2) = (1/i) [ <v1, v2> + T(x1)^T mu^{-1} T(x2) ],

where v_a is the x_a-deformed weight, mu is the (2L) x (2L) moment matrix
of the skew form restricted to monomials of degree < 2L, and L = n - p/2.
The projection term is the basis-independent form of the usual
skew-orthogonal-polynomial mode sum.  Then

    E(t)  proportional to  Pf[K(x_a, x_b)] / (Delta_p(x) prod_a x_a^(-2n)),

with x_a = n t / Lambda_a, and the proportionality constant is fixed by
the normalization E(t -> infinity) = 1, evaluated at a large reference
threshold.  Everything is computed in arbitrary precision: the raw
Pfaffian ratio cancels to a relative depth of order prod_a x_a^(2n), so
the working precision is chosen from the evaluation grid.

All Fourier-side integrals run over k in (0, 1) with a principal-value /
Hadamard-finite-part prescription: the integrand is expanded near the
endpoint k = 1 in half-integer powers of sigma = 1 - k and integrated
term by term, which regularizes the non-integrable endpoint powers that
appear for monomial degrees above nu - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

__all__ = [
    "GapCdfError",
    "GapCdfTable",
    "KernelMatrix",
    "h_norm",
    "log_h_norm",
    "q_hat",
    "kernel_g2",
    "build_kernel",
    "pfaffian",
    "pfaffian_log",
    "gap_cdf",
    "gap_cdf_table",
]

#: finite-part tail width at the k=1 endpoint
TAIL_DELTA = 32  # delta = 1/TAIL_DELTA
#: minimum relative gap between distinct Lambda values
CONFLUENT_RTOL = 1e-6
#: reference multiple of the support scale used for the E(inf) normalization
T_REF_FACTOR = 4.0


class GapCdfError(RuntimeError):
    pass


# ----------------------------------------------------------------------
# sigma-series helpers: a series is a dict {2*exponent: mpmath coefficient}
# (exponents live on the half-integer grid, so twice the exponent is int)

def _ser_mul(a, b, cap2):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e <= cap2:
                out[e] = out.get(e, mp.mpf(0)) + ca * cb
    return out


def _ser_axpy(out, c, s):
    for e, v in s.items():
        out[e] = out.get(e, mp.mpf(0)) + c * v
    return out


def _exp_series(c, nmax):
    out = {0: mp.mpf(1)}
    term = mp.mpf(1)
    for r in range(1, nmax + 1):
        term = term * c / r
        out[2 * r] = term
    return out


def _pow_series(base, alpha2, nmax):
    """Taylor of (base - sigma)^(alpha2/2) in sigma."""
    a = mp.mpf(alpha2) / 2
    out = {}
    term = base ** a
    for r in range(nmax + 1):
        out[2 * r] = term
        term = term * (a - r) / (r + 1) * (-1) / base
    return out


class _Factor:
    """A Fourier-side factor: callable on (-1, 1) plus endpoint expansions.

    ``neg`` expands f(-1 + sigma) (half-integer powers allowed), ``pos``
    expands f(1 - sigma) (plain Taylor).  Calls are memoized because the
    quadrature grid is shared across many bilinear integrals.
    """

    def __init__(self, fun, ser_neg, ser_pos):
        self._fun = fun
        self.neg = ser_neg
        self.pos = ser_pos
        self._memo = {}

    def __call__(self, u):
        v = self._memo.get(u)
        if v is None:
            v = self._fun(u)
            self._memo[u] = v
        return v


def _series_order(xmax, dps):
    """Number of tail-series terms so the truncated tail is < 10^-(dps+10)."""
    z = float(xmax) / TAIL_DELTA
    target = (dps + 10) * math.log(10.0)
    nser = 120
    while nser < 4000:
        # magnitude of term nser of exp(z): z^nser / nser!
        lt = nser * math.log(max(z, 1e-9)) - math.lgamma(nser + 1)
        if lt < -target:
            break
        nser += 40
    return nser


def _monomial_factors(n, d, nser):
    """Transforms of E^m w(E) for m < d, as _Factor objects."""
    nu = mp.mpf(2 * n + 1) / 2
    two_nu = 2 * n + 1
    cw = 2 * mp.pi * mp.e / mp.gamma(nu)
    cap2 = 2 * nser

    # (-i d/dk)^m of s^(nu-1) e^(-s), s = 1 + k, as sum_a a_j s^(nu-1-j)
    coeff_maps = [{0: mp.mpf(1)}]
    for _ in range(d - 1):
        new = {}
        for j, a in coeff_maps[-1].items():
            new[j + 1] = new.get(j + 1, mp.mpf(0)) + a * (nu - 1 - j)
            new[j] = new.get(j, mp.mpf(0)) - a
        coeff_maps.append(new)

    e_neg = _exp_series(mp.mpf(-1), nser)
    e_pos2 = {k: v * mp.e ** (-2) for k, v in _exp_series(mp.mpf(1), nser).items()}
    out = []
    for m in range(d):
        amap = coeff_maps[m]
        pref = (-1j) ** m * cw

        def fun(u, amap=amap, pref=pref):
            s = 1 + u
            if s <= 0:
                return mp.mpf(0)
            tot = mp.mpf(0)
            for j, a in amap.items():
                tot += a * s ** (nu - 1 - j)
            return pref * mp.e ** (-s) * tot

        sneg = {}
        for j, a in amap.items():
            base2 = two_nu - 2 - 2 * j
            for e, v in e_neg.items():
                if base2 + e <= cap2:
                    sneg[base2 + e] = sneg.get(base2 + e, mp.mpf(0)) + pref * a * v
        spos = {}
        for j, a in amap.items():
            ps = _pow_series(mp.mpf(2), two_nu - 2 - 2 * j, nser)
            _ser_axpy(spos, pref * a, _ser_mul(e_pos2, ps, cap2))
        out.append(_Factor(fun, sneg, spos))
    return out


def _deformed_factor(n, x, nser, derivative=False):
    """Transform of w(E)/(iE+x+1), or its x-derivative, as a _Factor."""
    nu = mp.mpf(2 * n + 1) / 2
    two_nu = 2 * n + 1
    cw = 2 * mp.pi * mp.e / mp.gamma(nu)
    cap2 = 2 * nser
    x = mp.mpf(x)
    X = x + 1

    def a_plain(s):
        return cw * mp.e ** (-s * X) * s ** nu / nu * mp.hyp1f1(nu, nu + 1, s * x)

    def a_deriv(s):
        m1 = mp.hyp1f1(nu, nu + 1, s * x)
        m2 = mp.hyp1f1(nu + 1, nu + 2, s * x)
        return cw * mp.e ** (-s * X) * (s ** (nu + 1)) * (m2 / (nu + 1) - m1 / nu)

    val = a_deriv if derivative else a_plain

    def fun(u):
        s = 1 + u
        if s <= 0:
            return mp.mpf(0)
        return val(s)

    # expansion at u = -1 + sigma (s = sigma):
    #   cw e^(-sigma X) sum_r x^r sigma^(nu+r) / ((nu+r) r!)
    # and its term-wise x-derivative for the derivative factor.
    hy = {}
    xr = mp.mpf(1)
    xr_d = mp.mpf(0)
    for r in range(nser + 1):
        hy[two_nu + 2 * r] = cw * (xr_d if derivative else xr) / (nu + r)
        xr_d = (xr_d * x + xr) / (r + 1) if r + 1 else xr_d
        xr = xr * x / (r + 1)
    sneg = _ser_mul(hy, _exp_series(-X, nser), cap2)
    if derivative:
        # product rule: also -(d/dx e^(-sigma X)) branch = -sigma * (plain)
        hy0 = {}
        xr = mp.mpf(1)
        for r in range(nser + 1):
            hy0[two_nu + 2 * r] = cw * xr / (nu + r)
            xr = xr * x / (r + 1)
        plain_neg = _ser_mul(hy0, _exp_series(-X, nser), cap2)
        _ser_axpy(sneg, mp.mpf(-1), {e + 2: v for e, v in plain_neg.items() if e + 2 <= cap2})

    # expansion at u = 1 - sigma (s = 2 - sigma) via the ODE
    #   A'(s) = cw s^(nu-1) e^(-s) - X A(s)      (plain)
    #   B'(s) = -A(s) - X B(s)                   (derivative, B = dA/dx)
    src = _ser_mul(
        {k: v * cw for k, v in _pow_series(mp.mpf(2), two_nu - 2, nser).items()},
        {k: v * mp.e ** (-2) for k, v in _exp_series(mp.mpf(1), nser).items()},
        cap2,
    )
    a_coeff = [a_plain(mp.mpf(2))]
    for r in range(nser):
        a_coeff.append((X * a_coeff[r] - src.get(2 * r, mp.mpf(0))) / (r + 1))
    if not derivative:
        spos = {2 * r: a_coeff[r] for r in range(nser + 1)}
    else:
        b_coeff = [a_deriv(mp.mpf(2))]
        for r in range(nser):
            b_coeff.append((X * b_coeff[r] + a_coeff[r]) / (r + 1))
        spos = {2 * r: b_coeff[r] for r in range(nser + 1)}
    return _Factor(fun, sneg, spos)


def _fp_pair(F: _Factor, G: _Factor):
    """Skew bilinear <F, G> as a finite-part principal-value integral.

    (1/(i pi)) * FP int_0^1 [F(k) G(-k) - F(-k) G(k)] / k dk.
    """
    delta = mp.mpf(1) / TAIL_DELTA
    cap2 = max(
        max(F.neg, default=0), max(F.pos, default=0),
        max(G.neg, default=0), max(G.pos, default=0),
    )

    def phi(k):
        return (F(k) * G(-k) - F(-k) * G(k)) / k

    pts = [mp.mpf(0), mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4,
           mp.mpf(7) / 8, mp.mpf(15) / 16, 1 - delta]
    body = mp.quad(phi, pts, method="gauss-legendre", maxdegree=9)

    inv_k = {2 * r: mp.mpf(1) for r in range(cap2 // 2 + 1)}
    t1 = _ser_mul(_ser_mul(F.pos, G.neg, cap2), inv_k, cap2)
    t2 = _ser_mul(_ser_mul(F.neg, G.pos, cap2), inv_k, cap2)
    tail = mp.mpf(0)
    for e, v in t1.items():
        g = mp.mpf(e) / 2
        tail += v * delta ** (g + 1) / (g + 1)
    for e, v in t2.items():
        g = mp.mpf(e) / 2
        tail -= v * delta ** (g + 1) / (g + 1)
    return (body + tail) / (1j * mp.pi)


# ----------------------------------------------------------------------
# engines: cached per (n, L, dps)

_ENGINES: dict = {}


class _Engine:
    def __init__(self, n: int, L: int, dps: int, xmax: float):
        self.n = n
        self.L = L
        self.d = 2 * L
        self.dps = dps
        self.nser = _series_order(max(xmax, 4.0), dps)
        with mp.workdps(dps):
            self.monomials = _monomial_factors(n, max(self.d, 1), self.nser)
            d = self.d
            mu = mp.matrix(max(d, 1), max(d, 1))
            for j in range(d):
                for k in range(j + 1, d):
                    v = _fp_pair(self.monomials[j], self.monomials[k])
                    mu[j, k] = v
                    mu[k, j] = -v
            self.mu = mu
            self.mu_inv = mu ** -1 if d else None

    def kernel(self, xs):
        """Antisymmetric kernel matrix over the points xs (mp matrix)."""
        d = self.d
        with mp.workdps(self.dps):
            vf = [_deformed_factor(self.n, x, self.nser) for x in xs]
            T = [[_fp_pair(self.monomials[j], v) for j in range(d)] for v in vf]
            m = len(xs)
            K = mp.matrix(m, m)
            for a in range(m):
                for b in range(a + 1, m):
                    g2 = _fp_pair(vf[a], vf[b])
                    proj = mp.mpf(0)
                    for j in range(d):
                        for k in range(d):
                            proj += T[a][j] * self.mu_inv[j, k] * T[b][k]
                    K[a, b] = (g2 + proj) / 1j
                    K[b, a] = -K[a, b]
            return K


def _engine(n: int, L: int, dps: int, xmax: float) -> _Engine:
    key = (n, L, dps)
    eng = _ENGINES.get(key)
    if eng is None or eng.nser < _series_order(max(xmax, 4.0), dps):
        eng = _Engine(n, L, dps, xmax)
        _ENGINES[key] = eng
    return eng


def _dps_for(n: int, xs) -> int:
    """Working precision covering the Pfaffian cancellation depth."""
    depth = sum(2 * n * math.log10(max(float(x), 2.0)) for x in xs)
    return int(30 + math.ceil(depth) + 4 * len(xs))


# ----------------------------------------------------------------------
# public API

@dataclass(frozen=True)
class KernelMatrix:
    """p x p real antisymmetric kernel evaluated at x_a = n t / Lambda_a."""

    t: float
    n: int
    lam: tuple
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        scale = np.max(np.abs(a)) or 1.0
        if np.max(np.abs(a + a.T)) > 1e-10 * scale:
            raise GapCdfError("kernel matrix not antisymmetric")


@dataclass(frozen=True)
class GapCdfTable:
    """Largest-eigenvalue CDF values on a threshold grid."""

    t: np.ndarray
    values: np.ndarray
    lam: tuple
    n: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < -1e-9) or np.any(v > 1.0 + 1e-6):
            raise GapCdfError("CDF values out of range")
        if np.any(np.diff(v) < -1e-6):
            raise GapCdfError("CDF not monotone")


def log_h_norm(j: int, n: int) -> float:
    """log h_j from the normalization-product identity.

    The skew-orthogonality normalizations satisfy prod_{l<j} h_l =
    1/K_tilde_{j,n} with 1/K_tilde_{j,n} = prod_{a=1}^{j}
    2^(2n-4a+5) pi (2a)! / (2n-2a+1)!, hence
    h_j = 2^(2n-4j+1) pi (2j+2)! / (2n-2j-1)!.
    """
    if not (0 <= j <= n - 1):
        raise GapCdfError(f"h index {j} out of range for n={n}")
    return float(
        (2 * n - 4 * j + 1) * mp.log(2)
        + mp.log(mp.pi)
        + mp.loggamma(2 * j + 3)
        - mp.loggamma(2 * n - 2 * j)
    )


def h_norm(j: int, n: int) -> float:
    """The normalization h_j (see log_h_norm for the identity used)."""
    return math.exp(log_h_norm(j, n))


def _validate_lam(lam):
    lam = tuple(float(v) for v in np.atleast_1d(np.asarray(lam, dtype=float)))
    if any(v <= 0 for v in lam):
        raise GapCdfError("Lambda values must be positive")
    sv = sorted(lam)
    for a, b in zip(sv, sv[1:]):
        if (b - a) <= CONFLUENT_RTOL * max(a, b):
            raise GapCdfError("confluent kernel unsupported (repeated Lambda)")
    return lam


def _check_pn(p: int, n: int):
    if p % 2:
        raise GapCdfError(
            "odd number of distinct eigenvalues unsupported "
            "(dummy-eigenvalue limit not implemented)"
        )
    if p > 2 * n:
        raise GapCdfError(f"need p <= 2n, got p={p}, n={n}")


def q_hat(parity: str, l: int, n: int, x: float, dps: int = 30) -> complex:
    """Cauchy transform of the l-th skew-orthogonal polynomial pair.

    ``parity`` selects the even member (degree 2l, built by skew
    Gram-Schmidt on the monomial moment matrix) or the odd member,
    defined from the even one through

        q_hat_odd(x) = -i x (1 + d/dx) q_hat_even(x),

    with the derivative evaluated analytically.
    """
    if parity not in ("even", "odd"):
        raise GapCdfError(f"parity must be 'even' or 'odd', got {parity!r}")
    if not (0 <= l <= n - 1):
        raise GapCdfError(f"invalid (l,n) regime: l={l}, n={n}")
    if x <= 0:
        raise GapCdfError("x must be positive")
    eng = _engine(n, l + 1, dps, float(x))
    with mp.workdps(dps):
        coeffs = _gs_even_coeffs(eng, l)
        v = _deformed_factor(n, x, eng.nser)
        if parity == "even":
            tot = mp.mpf(0)
            for j, c in enumerate(coeffs):
                tot += c * _fp_pair(eng.monomials[j], v)
            return complex(tot)
        vd = _deformed_factor(n, x, eng.nser, derivative=True)
        tot = mp.mpf(0)
        totd = mp.mpf(0)
        for j, c in enumerate(coeffs):
            tot += c * _fp_pair(eng.monomials[j], v)
            totd += c * _fp_pair(eng.monomials[j], vd)
        return complex(-1j * mp.mpf(x) * (tot + totd))


def _gs_even_coeffs(eng: _Engine, l: int):
    """Monomial coefficients of the monic even skew polynomial q_{2l}."""
    d = 2 * l + 1
    mu = eng.mu
    # skew Gram-Schmidt on monomials: subtract projections onto earlier pairs
    qs = []  # coefficient lists
    def form(ca, cb):
        tot = mp.mpf(0)
        for j, a in enumerate(ca):
            for k, b in enumerate(cb):
                tot += a * b * mu[j, k]
        return tot

    for m in range(d):
        c = [mp.mpf(0)] * (m + 1)
        c[m] = mp.mpf(1)
        for ll in range(m // 2):
            q0, q1 = qs[2 * ll], qs[2 * ll + 1]
            h = form(q0, q1)
            c_odd = form(c, q0) / h
            c_even = form(c, q1) / h
            for j, v in enumerate(q1):
                c[j] -= c_odd * v
            for j, v in enumerate(q0):
                c[j] += c_even * v
        qs.append(c)
    return qs[2 * l]


def kernel_g2(x1: float, x2: float, n: int, dps: int = 30) -> float:
    """Antisymmetrized two-point weight integral (1/i) <v_{x1}, v_{x2}>."""
    if x1 <= 0 or x2 <= 0:
        raise GapCdfError("x values must be positive")
    nser = _series_order(max(x1, x2, 4.0), dps)
    with mp.workdps(dps):
        f1 = _deformed_factor(n, x1, nser)
        f2 = _deformed_factor(n, x2, nser)
        v = _fp_pair(f1, f2) / 1j
        if abs(mp.im(v)) > 1e-9 * max(abs(mp.re(v)), mp.mpf(1e-30)):
            raise GapCdfError("kernel quadrature failed to cancel imaginary part")
        return float(mp.re(v))


def build_kernel(t: float, lam, n: int, dps: int | None = None) -> KernelMatrix:
    """Kernel matrix K(x_a, x_b) at x_a = n t / Lambda_a (float export)."""
    lam = _validate_lam(lam)
    p = len(lam)
    _check_pn(p, n)
    if t <= 0:
        raise GapCdfError("t must be positive")
    xs = [mp.mpf(n) * t / v for v in lam]
    if dps is None:
        dps = _dps_for(n, xs)
    eng = _engine(n, n - p // 2, dps, float(max(xs)))
    K = eng.kernel(xs)
    out = np.zeros((p, p))
    with mp.workdps(dps):
        for a in range(p):
            for b in range(p):
                v = K[a, b]
                if a != b and abs(mp.im(v)) > 1e-9 * max(abs(mp.re(v)), mp.mpf(1e-300)):
                    raise GapCdfError("kernel entries not real after cancellation")
                out[a, b] = float(mp.re(v))
    return KernelMatrix(float(t), n, lam, out)


def _pf_small(K, p):
    if p == 2:
        return K[0, 1]
    if p == 4:
        return K[0, 1] * K[2, 3] - K[0, 2] * K[1, 3] + K[0, 3] * K[1, 2]
    # expansion along the first row for larger (rare) even p
    tot = mp.mpf(0)
    for j in range(1, p):
        rest = [i for i in range(p) if i not in (0, j)]
        sub = mp.matrix(p - 2, p - 2)
        for a, ia in enumerate(rest):
            for b, ib in enumerate(rest):
                sub[a, b] = K[ia, ib]
        tot += (-1) ** (j + 1) * K[0, j] * _pf_small(sub, p - 2)
    return tot


def _raw_value(t, lam, n, eng):
    """Pf[K] / (Vandermonde * prod x^(-2n)) at threshold t (mp float)."""
    xs = [mp.mpf(n) * t / mp.mpf(v) for v in lam]
    p = len(xs)
    K = eng.kernel(xs)
    with mp.workdps(eng.dps):
        pf = _pf_small(K, p)
        vdm = mp.mpf(1)
        for a in range(p):
            for b in range(a + 1, p):
                vdm *= xs[b] - xs[a]
        logdet = -2 * n * mp.fsum(mp.log(x) for x in xs)
        return pf / vdm * mp.e ** (-logdet)


def _reference_t(lam, n) -> float:
    """Threshold far enough in the upper tail that E ~ 1 to < 1e-4."""
    from .core import AspectRatio, EmpiricalSpectrum
    from .outliers import classify_outliers
    from .saddle import support

    s = EmpiricalSpectrum(tuple(sorted(lam)), (1,) * len(lam), degeneracy_l=2)
    a = AspectRatio(len(lam) / n)
    try:
        sup = support(s, a)
        top = sup.intervals[-1][1]
        for r in classify_outliers(s, a, sup):
            if r.x0 > top:
                top = r.x0 + 3 * (r.width or 0.0)
    except Exception:
        top = 2.0 * max(lam)
    return T_REF_FACTOR * float(top)


def gap_cdf_table(ts, lam, n: int, dps: int | None = None) -> GapCdfTable:
    """E(t) on a grid, normalized by the large-t plateau of the raw ratio.

    ``t`` is in the units of the sampled eigenvalues of W W^T with
    W = C^(1/2) X / sqrt(columns), i.e. directly comparable to the
    Monte Carlo module's largest-eigenvalue samples.
    """
    lam = _validate_lam(lam)
    p = len(lam)
    _check_pn(p, n)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise GapCdfError("thresholds must be positive")
    t_ref = max(_reference_t(lam, n), 1.5 * float(ts.max()))
    xs_ref = [n * t_ref / v for v in lam]
    if dps is None:
        dps = _dps_for(n, xs_ref)
    eng = _engine(n, n - p // 2, dps, float(max(xs_ref)))
    ref = _raw_value(mp.mpf(t_ref), lam, n, eng)
    if ref == 0:
        raise GapCdfError("normalization reference vanished")
    vals = []
    with mp.workdps(dps):
        for t in ts:
            r = _raw_value(mp.mpf(float(t)), lam, n, eng) / ref
            v = float(mp.re(r))
            if -1e-9 <= v < 0.0:
                v = 0.0
            if 1.0 < v <= 1.0 + 1e-6:
                v = 1.0
            vals.append(v)
    return GapCdfTable(ts, np.asarray(vals), lam, n)


def gap_cdf(t: float, lam, n: int, dps: int | None = None) -> float:
    """P(largest eigenvalue <= t) for the doubly degenerate ensemble."""
    return float(gap_cdf_table([float(t)], lam, n, dps=dps).values[0])


# ----------------------------------------------------------------------
# Pfaffian of float antisymmetric matrices (Parlett-Reid with pivoting)

def pfaffian(a) -> float:
    """Pfaffian of an even-dimensional real antisymmetric matrix."""
    sign, logmag = pfaffian_log(a)
    return sign * math.exp(logmag) if sign else 0.0


def pfaffian_log(a):
    """(sign, log|Pf|) via skew-symmetric tridiagonalization with pivoting."""
    a = np.array(a, dtype=float)
    m = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if m % 2:
        raise ValueError("Pfaffian needs even dimension")
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a + a.T)) > 1e-10 * scale:
        raise ValueError("matrix not antisymmetric")
    if m == 0:
        return 1.0, 0.0
    sign = 1.0
    logmag = 0.0
    for k in range(0, m - 1, 2):
        piv = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if a[piv, k] == 0.0:
            return 0.0, -np.inf
        if piv != k + 1:
            a[[k + 1, piv], :] = a[[piv, k + 1], :]
            a[:, [k + 1, piv]] = a[:, [piv, k + 1]]
            sign = -sign
        pivot = a[k + 1, k]
        # Pfaffian factor is the superdiagonal element a[k, k+1] = -pivot
        sign *= 1.0 if -pivot > 0 else -1.0
        logmag += math.log(abs(pivot))
        if k + 2 < m:
            tau = a[k + 2:, k] / pivot
            a[k + 2:, :] -= np.outer(tau, a[k + 1, :])
            a[:, k + 2:] -= np.outer(a[:, k + 1], tau)
    return sign, logmag
