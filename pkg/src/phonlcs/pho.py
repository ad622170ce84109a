"""Pseudoharmonic oscillator -d^2/dxi^2 + beta^2 xi^2 + alpha/xi^2 on (0, inf).

Spectrum 2 beta (2n + mu) with mu = 1 + sqrt(1 + 4 alpha)/2, eigenfunctions

    psi_n(xi) = (2 beta^mu n! / Gamma(mu+n))^{1/2} xi^{mu-1/2} e^{-beta xi^2/2} L_n^{(mu-1)}(beta xi^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quad
from .errors import InvalidGrid, ParameterOutOfDomain
from .quad import QuadConfig
from .specfun import laguerre


def mu_of_alpha(alpha: float) -> float:
    if not alpha > 0:
        raise ParameterOutOfDomain("alpha must be positive")
    return 1.0 + 0.5 * math.sqrt(1.0 + 4.0 * alpha)


def alpha_of_mu(mu: float) -> float:
    """Inverse of :func:`mu_of_alpha`: alpha = (mu - 1/2)(mu - 3/2)."""
    return (mu - 0.5) * (mu - 1.5)


@dataclass(frozen=True)
class OscillatorConfig:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterOutOfDomain(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ParameterOutOfDomain(f"beta must be positive, got {self.beta}")

    @property
    def mu(self) -> float:
        return mu_of_alpha(self.alpha)

    @classmethod
    def from_mu(cls, mu: float, beta: float = 1.0) -> "OscillatorConfig":
        if not mu > 1.5:
            raise ParameterOutOfDomain(f"mu must exceed 3/2, got {mu}")
        return cls(alpha_of_mu(mu), beta)

    @classmethod
    def from_molecular(cls, rho: float, kappa0: float) -> "OscillatorConfig":
        """alpha = rho kappa0^2, beta = sqrt(rho)/kappa0."""
        if not (rho > 0 and kappa0 > 0):
            raise ParameterOutOfDomain("rho and kappa0 must be positive")
        return cls(rho * kappa0**2, math.sqrt(rho) / kappa0)

    @classmethod
    def para_bose(cls, p: float) -> "OscillatorConfig":
        """alpha = (p-1)(p-3)/4, beta = 1 (needs p > 3)."""
        return cls((p - 1.0) * (p - 3.0) / 4.0, 1.0)


def molecular_potential(rho: float, kappa0: float, xi):
    """V(xi) = rho (xi/kappa0 - kappa0/xi)^2."""
    xi = np.asarray(xi, dtype=float)
    return rho * (xi / kappa0 - kappa0 / xi) ** 2


def eigenvalue(cfg: OscillatorConfig, n: int) -> float:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 2.0 * cfg.beta * (2 * n + cfg.mu)


def log_norm_constant(cfg: OscillatorConfig, n: int) -> float:
    """log of (2 beta^mu n!/Gamma(mu+n))^{1/2}."""
    mu = cfg.mu
    return 0.5 * (math.log(2.0) + mu * math.log(cfg.beta) + math.lgamma(n + 1.0) - math.lgamma(mu + n))


def eigenfunction(cfg: OscillatorConfig, n: int, xi):
    """psi_n(xi) for xi > 0 (scalar or array)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    scalar = np.ndim(xi) == 0
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0)):
        raise ParameterOutOfDomain("xi must be positive")
    mu, beta = cfg.mu, cfg.beta
    x = beta * xi * xi
    envelope = np.exp(log_norm_constant(cfg, n) + (mu - 0.5) * np.log(xi) - 0.5 * x)
    out = np.zeros_like(envelope)
    live = envelope > 0  # past the underflow point psi_n is exactly 0
    out[live] = envelope[live] * laguerre(n, mu - 1.0, x[live])
    return float(out) if scalar else out


def _check_uniform(xi: np.ndarray) -> float:
    if xi.ndim != 1 or xi.size < 3:
        raise InvalidGrid("need a one-dimensional grid with at least 3 points")
    steps = np.diff(xi)
    if np.any(~(steps > 0)):
        raise InvalidGrid("grid must be strictly increasing")
    h = float(steps.mean())
    if np.max(np.abs(steps - h)) > 1e-9 * max(h, abs(xi[-1])):
        raise InvalidGrid("grid must be uniform")
    if xi[0] < h * (1.0 - 1e-12):
        raise InvalidGrid("grid must start at least one step away from 0")
    return h


def uniform_grid(start: float, stop: float, steps: int) -> np.ndarray:
    """``steps`` equally spaced points on [start, stop]."""
    if steps < 3 or not stop > start:
        raise InvalidGrid("need stop > start and at least 3 points")
    return np.linspace(start, stop, steps)


def hamiltonian_residual(cfg: OscillatorConfig, n: int, xi) -> float:
    """||(H - lambda_n) psi_n|| / ||lambda_n psi_n|| on the grid interior.

    The second derivative is the three-point central difference, so the
    residual is O(h^2).
    """
    xi = np.asarray(xi, dtype=float)
    h = _check_uniform(xi)
    psi = eigenfunction(cfg, n, xi)
    inner = xi[1:-1]
    d2 = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (h * h)
    h_psi = -d2 + (cfg.beta**2 * inner**2 + cfg.alpha / inner**2) * psi[1:-1]
    lam = eigenvalue(cfg, n)
    return float(np.linalg.norm(h_psi - lam * psi[1:-1]) / np.linalg.norm(lam * psi[1:-1]))


def gram_matrix(cfg: OscillatorConfig, n_max: int, rel_tol: float = 1e-12) -> np.ndarray:
    """<psi_n|psi_m> for n, m <= n_max by exp-sinh quadrature over xi."""
    pairs = [(n, m) for n in range(n_max + 1) for m in range(n, n_max + 1)]
    rows = np.array([p[0] for p in pairs])
    cols = np.array([p[1] for p in pairs])
    qcfg = QuadConfig(rel_tol=rel_tol, abs_tol=1e-15)

    def f(xi):
        x = xi[0]
        psi = np.array([eigenfunction(cfg, n, x) for n in range(n_max + 1)])
        return psi[rows] * psi[cols]

    res = quad.integrate_exp_sinh(f, qcfg, scale=1.0 / math.sqrt(cfg.beta), n_components=len(pairs))
    out = np.zeros((n_max + 1, n_max + 1))
    out[rows, cols] = res.value
    out[cols, rows] = res.value
    return out
