"""Nonlinear coherent states built on the sequence x_n = (n+sigma)^2 (n+2gamma-1)/n.

The states are |z> = N(|z|^2)^{-1/2} sum_n c_n(z) |psi_n> with
c_n(z) = sqrt(n!/(2gamma)_n) conj(z)^n / (sigma+1)_n and
N = 2F3(1, 1; 2gamma, sigma+1, sigma+1; |z|^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import NonConvergent, ParameterOutOfDomain
from .specfun import DEFAULT_TOL, SeriesValue, hyp_pfq, log_pochhammer


class DomainClass(str, Enum):
    NORMALIZABLE_ONLY = "NormalizableOnly"
    MEASURE_ADMISSIBLE = "MeasureAdmissible"
    INVALID = "Invalid"


def _is_negative_integer(x: float) -> bool:
    return x < 0 and x == math.floor(x)


@dataclass(frozen=True)
class Params:
    gamma: float
    sigma: float
    domain_class: DomainClass

    @property
    def in_s1(self) -> bool:
        return self.gamma > 0 and -1 < self.sigma <= 0

    @property
    def in_s2(self) -> bool:
        return 0 < self.gamma <= 0.5 and self.sigma > -1

    @property
    def warning(self) -> Optional[str]:
        """Set for sigma < -1: the coefficients alternate in sign there."""
        if self.domain_class is not DomainClass.INVALID and self.sigma < -1:
            return (
                f"sigma={self.sigma} < -1: coefficients 1/(sigma+1)_n change sign; "
                "no resolution of the identity is claimed"
            )
        return None


def classify(gamma: float, sigma: float) -> Params:
    """Attach a domain class to (gamma, sigma)."""
    gamma = float(gamma)
    sigma = float(sigma)
    if not (math.isfinite(gamma) and math.isfinite(sigma)):
        cls = DomainClass.INVALID
    elif gamma <= 0 or _is_negative_integer(sigma):
        cls = DomainClass.INVALID
    elif (sigma > -1 and sigma <= 0) or (gamma <= 0.5 and sigma > -1):
        cls = DomainClass.MEASURE_ADMISSIBLE
    else:
        cls = DomainClass.NORMALIZABLE_ONLY
    return Params(gamma, sigma, cls)


def require_valid(p: Params) -> Params:
    if p.domain_class is DomainClass.INVALID:
        raise ParameterOutOfDomain(
            f"(gamma, sigma) = ({p.gamma}, {p.sigma}) is invalid: need gamma > 0 "
            "and sigma not a negative integer"
        )
    return p


@dataclass(frozen=True)
class StateSpec:
    params: Params
    z: complex

    def __post_init__(self):
        require_valid(self.params)
        object.__setattr__(self, "z", complex(self.z))


def sequence_term(p: Params, n: int) -> float:
    """x_n; zero at n = 0."""
    require_valid(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0.0
    return (n + p.sigma) ** 2 * (n + 2 * p.gamma - 1) / n


def log_generalized_factorial(p: Params, n: int) -> float:
    """log of x_n! = (sigma+1)_n^2 (2gamma)_n / n!."""
    require_valid(p)
    ls, _ = log_pochhammer(p.sigma + 1.0, n)
    lg, _ = log_pochhammer(2.0 * p.gamma, n)
    return 2.0 * ls + lg - math.lgamma(n + 1.0)


def generalized_factorial(p: Params, n: int) -> float:
    """x_n! = x_1 x_2 ... x_n, evaluated in closed form (log-space past n = 30)."""
    require_valid(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > 30:
        return math.exp(log_generalized_factorial(p, n))
    s = 1.0
    g = 1.0
    for k in range(n):
        s *= p.sigma + 1 + k
        g *= (2 * p.gamma + k) / (k + 1)
    return s * s * g


def normalization(p: Params, zz: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """N(|z|^2) = 2F3(1, 1; 2gamma, sigma+1, sigma+1; zz)."""
    require_valid(p)
    if zz < 0:
        raise ValueError("zz = |z|^2 must be nonnegative")
    return hyp_pfq([1.0, 1.0], [2 * p.gamma, p.sigma + 1, p.sigma + 1], float(zz), tol)


def _log_abs_coefficient(p: Params, r: float, n: int):
    """log|c_n| for |z| = r together with the sign of 1/(sigma+1)_n."""
    ls, sign = log_pochhammer(p.sigma + 1.0, n)
    lg, _ = log_pochhammer(2.0 * p.gamma, n)
    log_r = math.log(r) if r > 0 else -math.inf
    mag = 0.5 * (math.lgamma(n + 1.0) - lg) - ls + (n * log_r if n else 0.0)
    return mag, sign


def coefficient(p: Params, z: complex, n: int) -> complex:
    """Unnormalised expansion coefficient c_n(z)."""
    require_valid(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    z = complex(z)
    if n == 0:
        return 1.0 + 0j
    if z == 0:
        return 0j
    mag, sign = _log_abs_coefficient(p, abs(z), n)
    return sign * math.exp(mag) * cmath.exp(-1j * n * cmath.phase(z))


def overlap(a: StateSpec, b: StateSpec, tol: float = DEFAULT_TOL) -> complex:
    """<a|b> = (N_a N_b)^{-1/2} 2F3(1, 1; 2gamma, sigma+1, sigma+1; z_a conj(z_b))."""
    if a.params != b.params:
        raise ValueError("overlap needs states with identical parameters")
    p = a.params
    na = normalization(p, abs(a.z) ** 2, tol).value
    nb = normalization(p, abs(b.z) ** 2, tol).value
    arg = a.z * b.z.conjugate()
    cross = hyp_pfq([1.0, 1.0], [2 * p.gamma, p.sigma + 1, p.sigma + 1], arg, tol).value
    return complex(cross) / math.sqrt(na * nb)


@dataclass(frozen=True)
class PhotonDistribution:
    probabilities: np.ndarray
    tail: float  # probability mass beyond n_max


def photon_distribution(s: StateSpec, n_max: int, tol: float = DEFAULT_TOL) -> PhotonDistribution:
    """P_n = |c_n(z)|^2 / N(|z|^2) for n = 0..n_max plus the remaining tail mass."""
    p = s.params
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    r = abs(s.z)
    norm = normalization(p, r * r, tol)
    log_norm = math.log(norm.value)
    probs = np.zeros(n_max + 1)
    probs[0] = math.exp(-log_norm)
    if r > 0:
        for n in range(1, n_max + 1):
            mag, _ = _log_abs_coefficient(p, r, n)
            probs[n] = math.exp(2.0 * mag - log_norm)
    tail = 0.0 if r == 0 else _tail_mass(p, r, n_max, log_norm, tol)
    return PhotonDistribution(probs, tail)


def _tail_mass(p: Params, r: float, n_max: int, log_norm: float, tol: float) -> float:
    terms = []
    n = n_max + 1
    prev = math.inf
    while n < n_max + 100_000:
        mag, _ = _log_abs_coefficient(p, r, n)
        term = math.exp(2.0 * mag - log_norm)
        terms.append(term)
        total = math.fsum(terms)
        if term <= tol * max(total, tol) and term < prev:
            return total
        prev = term
        n += 1
    raise NonConvergent("photon-number tail did not converge")
