"""Scalar (and batched) special-function kernels.

Everything is evaluated from its defining series or integral
representation: hypergeometric series by term-ratio recursion, Bessel
functions through 0F1, the Macdonald function and G^{20}_{12} by
quadrature.  Gamma values come from :mod:`math`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import quad
from .errors import DenominatorPole, NonConvergent, NotSupported, ParameterOutOfDomain, QuadratureNoConvergence
from .quad import QuadConfig, QuadResult

MAX_SERIES_TERMS = 10_000
MAX_ANTIDIAGONALS = 500
BESSEL_J_MAX_ARG = 30.0
DEFAULT_TOL = 1e-15


@dataclass(frozen=True)
class SeriesValue:
    """A converged series.

    ``tail_estimate`` bounds the neglected tail relative to ``|value|``
    (absolute when the value is zero).
    """

    value: complex
    terms_used: int
    tail_estimate: float


def _is_nonpositive_integer(b) -> bool:
    b = complex(b)
    return b.imag == 0 and b.real <= 0 and b.real == math.floor(b.real)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n; may overflow to inf for large n."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def log_pochhammer(a: float, n: int):
    """``(log|(a)_n|, sign)``; sign is 0 when the product vanishes."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n == 0:
        return 0.0, 1
    if _is_nonpositive_integer(a) and a + n - 1 >= 0:
        return -math.inf, 0
    if a > 0:
        return math.lgamma(a + n) - math.lgamma(a), 1
    total, sign = 0.0, 1
    for k in range(n):
        f = a + k
        total += math.log(abs(f))
        if f < 0:
            sign = -sign
    return total, sign


def gamma(x: float) -> float:
    return math.gamma(x)


def _fsum(terms):
    if any(isinstance(t, complex) for t in terms):
        return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    return math.fsum(terms)


def hyp_pfq(
    numerators: Sequence[float],
    denominators: Sequence[float],
    x: complex,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_SERIES_TERMS,
) -> SeriesValue:
    """Generalized hypergeometric series pFq(numerators; denominators; x).

    Terms are generated by their ratio and summed with compensated
    summation.  Summation stops once three consecutive terms are below
    ``tol * |partial sum|``, the term ratio has dropped below one, and the
    geometric bound on the remaining tail is within ``tol``.
    """
    numerators = list(numerators)
    denominators = list(denominators)
    for b in denominators:
        if _is_nonpositive_integer(b):
            raise DenominatorPole(f"denominator parameter {b} is a nonpositive integer")
    if len(numerators) > len(denominators) + 1:
        raise NotSupported("only p <= q + 1 series are supported")
    if len(numerators) == len(denominators) + 1 and x != 0:
        raise NotSupported("p = q + 1 series are not entire; only p <= q is implemented")

    complex_mode = isinstance(x, complex) and x.imag != 0
    x = complex(x) if complex_mode else float(complex(x).real)
    term = 1.0 + 0j if complex_mode else 1.0
    terms = [term]
    small = 0
    for n in range(max_terms):
        ratio = x / (n + 1)
        for a in numerators:
            ratio *= a + n
        for b in denominators:
            ratio /= b + n
        term = term * ratio
        terms.append(term)
        if term == 0:
            return SeriesValue(_fsum(terms), n + 2, 0.0)
        partial = abs(sum(terms[-64:])) if len(terms) < 64 else abs(_fsum(terms))
        if abs(term) < tol * partial:
            small += 1
        else:
            small = 0
        if small >= 3 and abs(ratio) < 1:
            nxt = abs(_next_ratio(numerators, denominators, x, n + 1))
            if nxt < 1:
                value = _fsum(terms)
                scale = abs(value) if value != 0 else 1.0
                tail = abs(term) * nxt / (1.0 - nxt) / scale
                if tail <= tol:
                    return SeriesValue(value, n + 2, tail)
    raise NonConvergent(f"series did not converge within {max_terms} terms")


def _next_ratio(numerators, denominators, x, n):
    ratio = x / (n + 1)
    for a in numerators:
        ratio *= a + n
    for b in denominators:
        ratio /= b + n
    return ratio


def _hyp0f1_array(b: float, x: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """0F1(; b; x) for a real array ``x`` (same stopping rule as hyp_pfq)."""
    if _is_nonpositive_integer(b):
        raise DenominatorPole(f"denominator parameter {b} is a nonpositive integer")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    comp = np.zeros_like(x)
    small = 0
    for n in range(MAX_SERIES_TERMS):
        ratio = x / ((n + 1) * (b + n))
        term = term * ratio
        # Kahan-Babuska summation
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        if np.all(np.abs(term) <= tol * np.abs(total + comp)):
            small += 1
        else:
            small = 0
        if small >= 3 and np.all(np.abs(ratio) < 1):
            return total + comp
    raise NonConvergent("0F1 series did not converge")


def bessel_i(order: float, x: float, tol: float = DEFAULT_TOL) -> float:
    """Modified Bessel function I_order(x) for x >= 0 via its 0F1 series."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 1.0 if order == 0 else 0.0
    s = hyp_pfq([], [order + 1.0], x * x / 4.0, tol)
    return (x / 2.0) ** order / math.gamma(order + 1.0) * s.value


def bessel_j(order: float, x: float, tol: float = DEFAULT_TOL) -> float:
    """Bessel function J_order(x), 0 <= x <= 30, via the alternating 0F1 series."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > BESSEL_J_MAX_ARG:
        raise NotSupported(f"bessel_j is validated for x <= {BESSEL_J_MAX_ARG}, got {x}")
    if x == 0:
        return 1.0 if order == 0 else 0.0
    s = hyp_pfq([], [order + 1.0], -x * x / 4.0, tol)
    return (x / 2.0) ** order / math.gamma(order + 1.0) * s.value


def bessel_j_array(order: float, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`bessel_j`."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    if np.any(x > BESSEL_J_MAX_ARG):
        raise NotSupported(f"bessel_j is validated for x <= {BESSEL_J_MAX_ARG}")
    series = _hyp0f1_array(order + 1.0, -x * x / 4.0, tol)
    with np.errstate(divide="ignore"):
        pref = np.where(x > 0, (x / 2.0) ** order, 1.0 if order == 0 else 0.0)
    return pref / math.gamma(order + 1.0) * series


def _macdonald_log_integrand(order, x):
    c = x * x / 4.0

    def f(t):
        return np.exp(-t - c / t - (order + 1.0) * np.log(t))

    return f


def macdonald_k(order: float, x: float, cfg: QuadConfig = quad.DEFAULT_CONFIG) -> QuadResult:
    """Macdonald function K_order(x) from its integral over (0, inf).

    K(x) = (1/2) (x/2)**order * int_0^inf exp(-t - x**2/(4t)) t**(-order-1) dt
    """
    if not x > 0:
        raise ParameterOutOfDomain("macdonald_k needs x > 0")
    res = quad.integrate_semi_infinite(
        _macdonald_log_integrand(order, x), cfg, scale=max(x / 2.0, 1e-3)
    )
    pref = 0.5 * (x / 2.0) ** order
    return QuadResult(pref * res.value, pref * res.error_estimate, res.evaluations)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


_CHUNK_NODES = 2_000_000  # cap on (components x abscissae) per batch


def _in_chunks(rule, z: np.ndarray, nodes_per_component: int):
    """Apply ``rule(z_chunk) -> (value, error, evaluations)`` over slices of z."""
    size = max(1, _CHUNK_NODES // max(nodes_per_component, 1))
    if z.size <= size:
        return rule(z)
    parts = [rule(z[i:i + size]) for i in range(0, z.size, size)]
    return (
        np.concatenate([q[0] for q in parts]),
        np.concatenate([q[1] for q in parts]),
        max(q[2] for q in parts),
    )


def _macdonald_small(nu: float, x: np.ndarray, cfg: QuadConfig):
    """K_nu(x) for 0 < x < 2 by composite Gauss-Legendre in u."""
    nodes = int(15 * (math.log(1600.0 / x.min()) + 10))
    return _in_chunks(lambda xc: _macdonald_small_batch(nu, xc, cfg), x, nodes)


def _macdonald_small_batch(nu: float, x: np.ndarray, cfg: QuadConfig):
    big = 800.0
    upper = np.log(2.0 * big / x)
    for _ in range(3):
        upper = np.log(2.0 * (big + nu * upper) / x)

    def rule(width):
        panels = int(math.ceil(upper.max() / width))
        y = (np.arange(panels)[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)).ravel() / panels
        w = np.tile(_GL_WEIGHTS / (2.0 * panels), panels)
        u = upper[:, None] * y[None, :]
        # cosh(nu u) e^{-x cosh u} in a form that cannot overflow
        log_a = nu * u - x[:, None] * np.cosh(u)
        f = 0.5 * (np.exp(log_a) + np.exp(-2.0 * nu * u + log_a))
        return upper * (f @ w), u.shape[1]

    coarse, n1 = rule(1.0)
    fine, n2 = rule(0.5)
    err = np.abs(fine - coarse)
    if np.any(err > np.maximum(cfg.rel_tol * np.abs(fine), cfg.abs_tol)):
        raise QuadratureNoConvergence("Macdonald small-argument rule did not converge")
    return fine, err, n1 + n2


def macdonald_k_array(order: float, x, cfg: QuadConfig = quad.DEFAULT_CONFIG) -> QuadResult:
    """Batched K_nu(x) on the exp-sinh engine.

    For x < 2 uses K_nu(x) = int_0^U exp(-x cosh u) cosh(nu u) du on
    Gauss-Legendre panels, with U past the point where the integrand
    underflows; otherwise the large-argument form
    K_nu(x) = sqrt(pi/(2x)) e^{-x} / Gamma(|nu|+1/2)
              * int_0^inf e^{-s} s^{|nu|-1/2} (1 + s/(2x))^{|nu|-1/2} ds.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise ParameterOutOfDomain("macdonald_k needs x > 0")
    nu = abs(float(order))
    value = np.zeros_like(x)
    error = np.zeros_like(x)
    evals = 0
    small = x < 2.0
    if np.any(small):
        v, e, n = _macdonald_small(nu, x[small], cfg)
        value[small], error[small] = v, e
        evals += n
    if np.any(~small):
        xl = x[~small]
        tx = (2.0 * xl)[:, None]

        def f_large(s):
            return np.exp(-s + (nu - 0.5) * (np.log(s) + np.log1p(s / tx)))

        res = quad.integrate_exp_sinh(f_large, cfg, scale=1.0, n_components=xl.size)
        factor = np.exp(0.5 * np.log(np.pi / (2.0 * xl)) - xl - math.lgamma(nu + 0.5))
        value[~small] = factor * res.value
        error[~small] = factor * res.error_estimate
        evals += res.evaluations
    return QuadResult(value, error, evals)


def laguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by three-term recurrence.

    Works elementwise on numpy arrays.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return float(prev) if scalar else prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return float(cur) if scalar else cur


def kampe_de_feriet_1011(
    d1: float,
    b1: float,
    t: complex,
    u: complex,
    tol: float = DEFAULT_TOL,
) -> SeriesValue:
    """Kampé de Fériet F^{1:0;0}_{1:0;1}(1:-;-; d1:-;b1; t, u).

    Double series sum_{r,s} (1)_{r+s}/(d1)_{r+s} t^r u^s / (r! s! (b1)_s),
    summed over anti-diagonals r + s = N.
    """
    value, diagonals, tail = _kdf_core(d1, b1, complex(t), np.array([complex(u)]), tol)
    return SeriesValue(complex(value[0]), diagonals, tail)


def kdf_array(d1: float, b1: float, t: complex, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`kampe_de_feriet_1011` over an array of ``u``."""
    u = np.asarray(u)
    value, _, _ = _kdf_core(d1, b1, complex(t), u.astype(complex).ravel(), tol)
    return value.reshape(u.shape)


def _kdf_core(d1, b1, t, u, tol):
    for p in (d1, b1):
        if _is_nonpositive_integer(p):
            raise DenominatorPole(f"parameter {p} is a nonpositive integer")
    a_terms = [1.0 + 0j]  # t^r / r!
    b_terms = [np.ones_like(u)]  # u^s / (s! (b1)_s)
    coeff = 1.0  # (1)_N / (d1)_N
    total = np.ones_like(u)
    peak = np.ones(u.shape)
    small = 0
    prev_mag = 1.0
    for n in range(1, MAX_ANTIDIAGONALS + 1):
        a_terms.append(a_terms[-1] * t / n)
        b_terms.append(b_terms[-1] * u / (n * (b1 + n - 1)))
        coeff *= n / (d1 + n - 1)
        diag = np.zeros_like(u)
        for s in range(n + 1):
            diag = diag + a_terms[n - s] * b_terms[s]
        diag = coeff * diag
        total = total + diag
        mag = float(np.max(np.abs(diag)))
        peak = np.maximum(peak, np.abs(diag))
        # near a zero of the sum the attainable accuracy is set by the
        # largest term, not by the (cancelled) partial sum
        ref = np.maximum(np.abs(total), 1e-3 * peak)
        if np.all(np.abs(diag) <= tol * np.where(ref > 0, ref, 1.0)):
            small += 1
        else:
            small = 0
        ratio = mag / prev_mag if prev_mag > 0 else 0.0
        prev_mag = mag
        if small >= 3 and ratio < 1:
            scale = float(np.min(np.where(ref > 0, ref, 1.0)))
            tail = mag * ratio / (1.0 - ratio) / scale
            if tail <= tol:
                return total, n + 1, tail
    raise NonConvergent(f"double series did not converge within {MAX_ANTIDIAGONALS} anti-diagonals")


_G2012_WEAK_P = 0.1


def _g2012_check(alpha, lam):
    if not alpha - lam > 0:
        raise ParameterOutOfDomain(f"G^20_12 representation needs alpha - lam > 0, got {alpha - lam}")


def meijer_g2012(
    alpha: float,
    beta: float,
    lam: float,
    z: float,
    cfg: QuadConfig = quad.DEFAULT_CONFIG,
) -> QuadResult:
    """Meijer G^{20}_{12}(z | alpha; beta, lam) for z > 0.

    z^beta e^{-z} / Gamma(alpha-lam) * int_0^inf e^{-sz} s^{alpha-lam-1} (1+s)^{beta-alpha} ds
    """
    if not z > 0:
        raise ParameterOutOfDomain("meijer_g2012 needs z > 0")
    res = meijer_g2012_array(alpha, beta, lam, [z], cfg)
    return QuadResult(float(res.value[0]), float(res.error_estimate[0]), res.evaluations)


def _g2012_log_rule(p: float, q: float, z: np.ndarray, cfg: QuadConfig):
    """Chunked :func:`_g2012_log_batch`."""
    nodes = int(15 * (8 * _g2012_upper(p, q) - min(math.log(z.min()), 0.0) + 38) / 2)
    return _in_chunks(lambda zc: _g2012_log_batch(p, q, zc, cfg), z, nodes)


def _g2012_upper(p: float, q: float) -> float:
    return math.log(50.0 + 2.0 * max(p + q, 0.0))


def _gl_panels(lo: float, hi: float, width: float):
    panels = max(int(math.ceil((hi - lo) / width)), 1)
    h = (hi - lo) / panels
    y = lo + h * (np.arange(panels)[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)).ravel()
    return y, np.tile(_GL_WEIGHTS * (h / 2.0), panels)


def _g2012_log_batch(p: float, q: float, z: np.ndarray, cfg: QuadConfig):
    """int_0^inf e^{-u} u^{p-1} (u+z)^q du in y = log u.

    Gauss-Legendre panels cover [min(log z, 0) - 36, log U]: narrow ones on
    u > 1 where e^{-u} varies fast in y, wide ones below.  Under the lower
    end the integrand is z^q e^{p y} to double precision and is added in
    closed form.  The substitution keeps a weak endpoint singularity
    (p near 0) harmless.
    """
    log_z = np.log(z)
    hi = _g2012_upper(p, q)
    lo = np.minimum(log_z, 0.0) - 36.0

    def integrand(y):
        return np.exp(-np.exp(y) + p * y + q * np.logaddexp(y, log_z[:, None]))

    def rule(width):
        # u > 1: shared nodes
        y_up, w_up = _gl_panels(0.0, hi, width / 4.0)
        upper = integrand(y_up[None, :]) @ w_up
        # u < 1: panels stepping down from 0, as many as each z needs
        counts = np.ceil(-lo / width).astype(int)
        panels = int(counts.max())
        y = -width * (np.arange(panels)[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)).ravel()
        w = np.tile(_GL_WEIGHTS * (width / 2.0), panels)
        mask = np.repeat(np.arange(panels), _GL_NODES.size)[None, :] < counts[:, None]
        lower = np.where(mask, integrand(y[None, :]), 0.0) @ w
        tail = np.exp(q * log_z - p * width * counts) / p
        return upper + lower + tail, (panels + int(math.ceil(4 * hi / width))) * _GL_NODES.size

    coarse, n1 = rule(2.0)
    fine, n2 = rule(1.0)
    err = np.abs(fine - coarse)
    if np.any(err > np.maximum(cfg.rel_tol * np.abs(fine), cfg.abs_tol)):
        raise QuadratureNoConvergence("log-variable G^{20}_{12} rule did not converge")
    return fine, err, int(n1 + n2)


def meijer_g2012_array(alpha, beta, lam, z, cfg: QuadConfig = quad.DEFAULT_CONFIG) -> QuadResult:
    """Batched :func:`meijer_g2012` (exp-sinh engine).

    Components whose prefactor z^beta e^{-z} underflows are returned as 0
    without integration.
    """
    _g2012_check(alpha, lam)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(z > 0)):
        raise ParameterOutOfDomain("meijer_g2012 needs z > 0")
    p = alpha - lam
    q = beta - alpha
    log_pref = beta * np.log(z) - z - math.lgamma(p)
    live = log_pref > -745.0
    value = np.zeros_like(z)
    err = np.zeros_like(z)
    evaluations = 0
    if np.any(live):
        zl = z[live]
        # exp-sinh in s loses accuracy when s^{p-1} is nearly non-integrable
        near = (zl < 1.0) | (p < _G2012_WEAK_P)
        vals = np.zeros_like(zl)
        errs = np.zeros_like(zl)
        if np.any(near):
            v, e, n = _g2012_log_rule(p, q, zl[near], cfg)
            # the log-variable form carries z^lam instead of z^beta
            shift = np.exp((lam - beta) * np.log(zl[near]))
            vals[near], errs[near] = v * shift, e * shift
            evaluations += n
        if np.any(~near):
            zf = zl[~near]
            zc = zf[:, None]

            def f(s):
                return np.exp(-s * zc + (p - 1.0) * np.log(s) + q * np.log1p(s))

            res = quad.integrate_exp_sinh(f, cfg, scale=1.0 / zf)
            vals[~near], errs[~near] = res.value, res.error_estimate
            evaluations += res.evaluations
        pref = np.exp(log_pref[live])
        value[live] = pref * vals
        err[live] = pref * errs
    return QuadResult(value, err, evaluations)


def _whittaker_w(kappa: float, mu: float, z: float, cfg: QuadConfig = quad.DEFAULT_CONFIG) -> float:
    """Whittaker W_{kappa,mu}(z), z > 0, from its Laplace-type integral.

    Only used to cross-check :func:`meijer_g2012`.
    """
    a = mu - kappa + 0.5
    if not a > 0:
        raise ParameterOutOfDomain("integral representation needs mu - kappa > -1/2")
    c = mu + kappa - 0.5

    def f(s):
        return np.exp(-s * z + (a - 1.0) * np.log(s) + c * np.log1p(s))

    res = quad.integrate_semi_infinite(
        f, cfg, singularity=(1.0 - a) if a < 1 else None, scale=min(1.0, 1.0 / z)
    )
    return math.exp((mu + 0.5) * math.log(z) - z / 2.0 - math.lgamma(a)) * res.value
