"""Coherent-state wavefunctions of the pseudoharmonic oscillator and the
associated Bargmann-type transform, at the coupling 2gamma = mu.

With KdF(t, u) the Kampe de Feriet function F^{1:0;0}_{1:0;1}(1; sigma+1; mu; t, u)
the states read

    <xi|z> = sqrt(2 beta^mu / Gamma(mu)) N^{-1/2} xi^{mu-1/2} e^{-beta xi^2/2} KdF(conj z, -beta conj(z) xi^2)

and the transform of phi in L^2(0, inf) is

    B[phi](z) = sqrt(2 beta^mu / Gamma(mu)) int_0^inf xi^{mu-1/2} e^{-beta xi^2/2} KdF(z, -beta z xi^2) phi(xi) dxi,

which sends psi_n to sqrt(n!/(mu)_n) z^n / (sigma+1)_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import measure, nlcs
from .errors import InvalidGrid, NotSupported, ParameterOutOfDomain
from .pho import OscillatorConfig, eigenfunction
from .quad import QuadConfig, integrate_finite
from .specfun import (
    BESSEL_J_MAX_ARG,
    DEFAULT_TOL,
    bessel_i,
    bessel_j_array,
    hyp_pfq,
    kdf_array,
    laguerre,
    pochhammer,
)

# |z| range over which the KdF-based quadratures are validated
MAX_ABS_Z = 3.0
TAIL_THRESHOLD = 1e-12


@dataclass(frozen=True)
class BargmannSpec:
    osc: OscillatorConfig
    sigma: float

    def __post_init__(self):
        if not -1.0 < self.sigma <= 0.0:
            raise ParameterOutOfDomain(f"sigma must lie in (-1, 0], got {self.sigma}")
        if not self.osc.mu > 1.5:
            raise ParameterOutOfDomain("mu must exceed 3/2")

    @classmethod
    def from_mu(cls, mu: float, beta: float, sigma: float) -> "BargmannSpec":
        return cls(OscillatorConfig.from_mu(mu, beta), sigma)

    @property
    def mu(self) -> float:
        return self.osc.mu

    @property
    def beta(self) -> float:
        return self.osc.beta

    @property
    def params(self) -> nlcs.Params:
        """(gamma, sigma) = (mu/2, sigma), always measure-admissible."""
        return nlcs.classify(self.mu / 2.0, self.sigma)

    @property
    def log_prefactor(self) -> float:
        """log sqrt(2 beta^mu / Gamma(mu))."""
        return 0.5 * (math.log(2.0) + self.mu * math.log(self.beta) - math.lgamma(self.mu))


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on a strictly increasing grid in (0, inf)."""

    xi_values: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi_values, dtype=float)
        f = np.asarray(self.samples, dtype=complex)
        if xi.ndim != 1 or xi.size < 3:
            raise InvalidGrid("need at least 3 grid points")
        if f.shape != xi.shape:
            raise InvalidGrid("samples and grid differ in length")
        if not xi[0] > 0:
            raise InvalidGrid("grid must start above 0")
        if np.any(~(np.diff(xi) > 0)):
            raise InvalidGrid("grid must be strictly increasing")
        object.__setattr__(self, "xi_values", xi)
        object.__setattr__(self, "samples", f)

    @classmethod
    def from_function(cls, f: Callable, xi) -> "GridFunction":
        xi = np.asarray(xi, dtype=float)
        return cls(xi, np.asarray(f(xi)))

    @classmethod
    def uniform(cls, f: Callable, xi_min: float, xi_max: float, steps: int) -> "GridFunction":
        return cls.from_function(f, np.linspace(xi_min, xi_max, steps))

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights on the grid."""
        h = np.diff(self.xi_values)
        w = np.zeros_like(self.xi_values)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        return w

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, values))

    def check_tail(self):
        peak = np.max(np.abs(self.samples))
        if peak > 0 and abs(self.samples[-1]) >= TAIL_THRESHOLD * max(peak, 1.0):
            raise InvalidGrid(
                f"function is not negligible at the grid end (|phi| = {abs(self.samples[-1]):.3e})"
            )


# -- wavefunctions -------------------------------------------------------------


def _envelope(spec: BargmannSpec, xi):
    return np.exp(spec.log_prefactor + (spec.mu - 0.5) * np.log(xi) - 0.5 * spec.beta * xi * xi)


def wavefunction(spec: BargmannSpec, z: complex, xi, tol: float = DEFAULT_TOL):
    """<xi|z, mu/2, sigma> in closed form (Kampe de Feriet function)."""
    z = complex(z)
    scalar = np.ndim(xi) == 0
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(~(xi > 0)):
        raise ParameterOutOfDomain("xi must be positive")
    zb = z.conjugate()
    norm = nlcs.normalization(spec.params, abs(z) ** 2, tol).value
    kdf = kdf_array(spec.sigma + 1.0, spec.mu, zb, -spec.beta * zb * xi * xi, tol)
    out = _envelope(spec, xi) * kdf / math.sqrt(norm)
    return complex(out[0]) if scalar else out


def wavefunction_series(spec: BargmannSpec, z: complex, xi, n_terms: int = 60, tol: float = DEFAULT_TOL):
    """Truncated expansion N^{-1/2} sum_{n < n_terms} c_n(z) psi_n(xi)."""
    z = complex(z)
    scalar = np.ndim(xi) == 0
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    p = spec.params
    norm = nlcs.normalization(p, abs(z) ** 2, tol).value
    total = np.zeros(xi.shape, dtype=complex)
    for n in range(n_terms):
        total += nlcs.coefficient(p, z, n) * eigenfunction(spec.osc, n, xi)
    out = total / math.sqrt(norm)
    return complex(out[0]) if scalar else out


def _require_real_positive(z) -> float:
    z = complex(z)
    if z.imag != 0 or not z.real > 0:
        raise NotSupported("the Bessel form is restricted to real z > 0")
    return z.real


def wavefunction_sigma0(spec: BargmannSpec, z: float, xi, tol: float = DEFAULT_TOL):
    """sigma = 0 form: sqrt(2 beta) (I_{mu-1}(2z))^{-1/2} sqrt(xi) e^{-beta xi^2/2 + z} J_{mu-1}(2 xi sqrt(beta z)).

    Only real z > 0, where (conj(z)/|z|)^{mu-1} = 1.
    """
    if spec.sigma != 0.0:
        raise ParameterOutOfDomain("the Bessel form needs sigma = 0")
    x = _require_real_positive(z)
    scalar = np.ndim(xi) == 0
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    nu = spec.mu - 1.0
    j = bessel_j_array(nu, 2.0 * xi * math.sqrt(spec.beta * x), tol)
    i = bessel_i(nu, 2.0 * x, tol)
    out = math.sqrt(2.0 * spec.beta / i) * np.sqrt(xi) * np.exp(-0.5 * spec.beta * xi * xi + x) * j
    return float(out[0]) if scalar else out


# -- transform -----------------------------------------------------------------


def _kernel(spec: BargmannSpec, z: complex, xi, tol: float):
    """sqrt(2 beta^mu/Gamma(mu)) xi^{mu-1/2} e^{-beta xi^2/2} KdF(z, -beta z xi^2)."""
    return _envelope(spec, xi) * kdf_array(spec.sigma + 1.0, spec.mu, z, -spec.beta * z * xi * xi, tol)


def bargmann_transform(spec: BargmannSpec, phi: GridFunction, z: complex, tol: float = DEFAULT_TOL) -> complex:
    """B[phi](z) by the trapezoid rule on phi's own grid."""
    phi.check_tail()
    z = complex(z)
    return phi.integrate(_kernel(spec, z, phi.xi_values, tol) * phi.samples)


def bargmann_transform_sigma0(spec: BargmannSpec, phi: GridFunction, z: float, tol: float = DEFAULT_TOL) -> float:
    """sigma = 0 transform through the Bessel kernel, real z > 0.

    sqrt(2 beta Gamma(mu)) z^{(1-mu)/2} e^z int xi^{1/2} e^{-beta xi^2/2} J_{mu-1}(2 sqrt(beta z) xi) phi dxi
    """
    if spec.sigma != 0.0:
        raise ParameterOutOfDomain("the Bessel form needs sigma = 0")
    phi.check_tail()
    x = _require_real_positive(z)
    xi = phi.xi_values
    if 2.0 * math.sqrt(spec.beta * x) * xi[-1] > BESSEL_J_MAX_ARG:
        raise NotSupported("Bessel argument exceeds the validated range on this grid")
    j = bessel_j_array(spec.mu - 1.0, 2.0 * math.sqrt(spec.beta * x) * xi, tol)
    kern = np.sqrt(xi) * np.exp(-0.5 * spec.beta * xi * xi) * j
    pref = math.sqrt(2.0 * spec.beta * math.gamma(spec.mu)) * x ** ((1.0 - spec.mu) / 2.0) * math.exp(x)
    return pref * phi.integrate(kern * phi.samples).real


def basis_image_exact(spec: BargmannSpec, n: int, z: complex) -> complex:
    """sqrt(n!/(mu)_n) z^n / (sigma+1)_n."""
    b = math.sqrt(math.factorial(n) / pochhammer(spec.mu, n)) / pochhammer(spec.sigma + 1.0, n)
    return b * complex(z) ** n


def _xi_cutoff(beta: float, abs_z: float, degree: float) -> float:
    """xi past which e^{-beta xi^2} xi^degree e^{2 xi sqrt(beta |z|)} < 1e-20."""
    root = math.sqrt(abs_z)
    s = root + math.sqrt(abs_z + 46.0)
    for _ in range(20):
        s = root + math.sqrt(abs_z + 46.0 + degree * math.log(max(s, 1.0)))
    return s / math.sqrt(beta)


def _qcfg(tol: float) -> QuadConfig:
    return QuadConfig(rel_tol=min(max(tol, 1e-14), 0.5), abs_tol=1e-15)


def basis_image(spec: BargmannSpec, n: int, z: complex, tol: float = 1e-10) -> complex:
    """B[psi_n](z) with psi_n evaluated analytically at adaptive nodes."""
    z = complex(z)
    if abs(z) > MAX_ABS_Z:
        raise NotSupported(f"|z| > {MAX_ABS_Z} is outside the validated range")
    xi_max = _xi_cutoff(spec.beta, abs(z), 2 * spec.mu + 2 * n)

    def f(xi):
        xi = np.maximum(xi, 1e-300)
        return _kernel(spec, z, xi, DEFAULT_TOL) * eigenfunction(spec.osc, n, xi)

    return complex(integrate_finite(f, 0.0, xi_max, _qcfg(tol)).value)


def basis_image_bessel(spec: BargmannSpec, n: int, z: float, tol: float = 1e-10) -> float:
    """sigma = 0 counterpart of :func:`basis_image` through the Bessel kernel."""
    if spec.sigma != 0.0:
        raise ParameterOutOfDomain("the Bessel form needs sigma = 0")
    x = _require_real_positive(z)
    y = 2.0 * math.sqrt(spec.beta * x)
    xi_max = _xi_cutoff(spec.beta, 0.0, 2 * spec.mu + 2 * n)
    if y * xi_max > BESSEL_J_MAX_ARG:
        raise NotSupported("Bessel argument exceeds the validated range")

    def f(xi):
        xi = np.maximum(xi, 1e-300)
        j = bessel_j_array(spec.mu - 1.0, y * xi)
        return np.sqrt(xi) * np.exp(-0.5 * spec.beta * xi * xi) * j * eigenfunction(spec.osc, n, xi)

    pref = math.sqrt(2.0 * spec.beta * math.gamma(spec.mu)) * x ** ((1.0 - spec.mu) / 2.0) * math.exp(x)
    return pref * float(integrate_finite(f, 0.0, xi_max, _qcfg(tol)).value)


# -- corollary identities --------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    residual: float
    alt_rhs: Optional[complex] = None


def bessel_identity_check(spec: BargmannSpec, n: int, z: float, tol: float = 1e-12) -> IdentityCheck:
    """int_0^inf xi^mu e^{-beta xi^2} J_{mu-1}(2 sqrt(beta z) xi) L_n^{(mu-1)}(beta xi^2) dxi
    against z^{n+(mu-1)/2} e^{-z} / (n! 2 beta^{(mu+1)/2}).

    ``alt_rhs`` is the same integral from the Weber-type formula
    int x^{1/2+nu} e^{-a^2x^2} L_n^(nu)(a^2x^2) (xy)^{1/2} J_nu(xy) dx with
    y = 2 sqrt(beta z), a = sqrt(beta), nu = mu - 1.
    """
    if n < 0 or n > 8:
        raise ParameterOutOfDomain("identity checks are validated for 0 <= n <= 8")
    x = _require_real_positive(z)
    mu, beta = spec.mu, spec.beta
    nu = mu - 1.0
    y = 2.0 * math.sqrt(beta * x)
    xi_max = _xi_cutoff(beta, 0.0, mu + 2 * n)
    if y * xi_max > BESSEL_J_MAX_ARG:
        raise NotSupported("Bessel argument exceeds the validated range")

    def f(xi):
        xi = np.maximum(xi, 1e-300)
        u = beta * xi * xi
        return xi**mu * np.exp(-u) * bessel_j_array(nu, y * xi) * laguerre(n, nu, u)

    lhs = float(integrate_finite(f, 0.0, xi_max, _qcfg(tol)).value)
    rhs = x ** (n + nu / 2.0) * math.exp(-x) / (math.factorial(n) * 2.0 * beta ** ((mu + 1.0) / 2.0))
    a2 = beta
    weber = (
        y ** (2 * n + nu + 0.5)
        / (math.factorial(n) * 2.0 ** (2 * n + nu + 1.0))
        * math.exp(-y * y / (4.0 * a2))
        / a2 ** (nu + n + 1.0)
    )
    alt = weber / math.sqrt(y)
    return IdentityCheck(lhs, rhs, abs(lhs / rhs - 1.0), alt)


def kdf_identity_check(spec: BargmannSpec, n: int, z: complex, tol: float = 1e-12) -> IdentityCheck:
    """int_0^inf xi^{2mu-1} e^{-beta xi^2} KdF(z, -beta z xi^2) L_n^{(mu-1)}(beta xi^2) dxi
    against Gamma(mu)/(2 beta^mu) z^n/(sigma+1)_n."""
    if n < 0 or n > 8:
        raise ParameterOutOfDomain("identity checks are validated for 0 <= n <= 8")
    z = complex(z)
    if abs(z) > MAX_ABS_Z:
        raise NotSupported(f"|z| > {MAX_ABS_Z} is outside the validated range")
    mu, beta = spec.mu, spec.beta
    xi_max = _xi_cutoff(beta, abs(z), 2 * mu + 2 * n)

    def f(xi):
        xi = np.maximum(xi, 1e-300)
        u = beta * xi * xi
        kdf = kdf_array(spec.sigma + 1.0, mu, z, -u * z)
        return np.exp((2 * mu - 1) * np.log(xi) - u) * kdf * laguerre(n, mu - 1.0, u)

    lhs = complex(integrate_finite(f, 0.0, xi_max, _qcfg(tol)).value)
    rhs = math.gamma(mu) / (2.0 * beta**mu) * z**n / pochhammer(spec.sigma + 1.0, n)
    if rhs == 0:
        return IdentityCheck(lhs, rhs, abs(lhs))
    return IdentityCheck(lhs, rhs, abs(lhs / rhs - 1.0))


def reproducing_kernel(spec: BargmannSpec, z: complex, w: complex, tol: float = DEFAULT_TOL) -> complex:
    """K(z, conj w) = 2F3(1, 1; mu, sigma+1, sigma+1; z conj(w))."""
    arg = complex(z) * complex(w).conjugate()
    s1 = spec.sigma + 1.0
    return complex(hyp_pfq([1.0, 1.0], [spec.mu, s1, s1], arg, tol).value)


# -- norm through the transform ------------------------------------------------


@dataclass(frozen=True)
class NormResult:
    value: float
    coefficients: np.ndarray  # <psi_n|phi> on the grid
    grid_norm_sq: float


def norm_via_bargmann(spec: BargmannSpec, phi: GridFunction, n_max: int = 8, tol: float = 1e-9) -> NormResult:
    """<phi|phi> reconstructed from |B[phi]|^2 integrated against the measure.

    B[phi](z) = sum_n a_n b_n z^n with a_n = <psi_n|phi> and
    b_n = sqrt(n!/(mu)_n)/(sigma+1)_n.  The angular integral removes the
    cross terms, leaving sum_n |a_n|^2 b_n^2 M_n / 2 with M_n the numerical
    radial moments of the weight at gamma = mu/2.
    """
    phi.check_tail()
    xi = phi.xi_values
    a = np.array([phi.integrate(eigenfunction(spec.osc, n, xi) * phi.samples) for n in range(n_max + 1)])
    grid_norm = phi.integrate(np.abs(phi.samples) ** 2).real
    captured = float(np.sum(np.abs(a) ** 2))
    if grid_norm - captured > 1e-6 * max(grid_norm, 1e-300):
        raise NotSupported(
            f"phi has weight outside span(psi_0..psi_{n_max}) "
            f"({grid_norm - captured:.3e} of {grid_norm:.3e})"
        )
    moms = measure.moments(spec.params, n_max, tol)
    total = 0.0
    for n in range(n_max + 1):
        b2 = abs(basis_image_exact(spec, n, 1.0)) ** 2
        total += abs(a[n]) ** 2 * b2 * moms[n].value / 2.0
    return NormResult(total, a, grid_norm)
