"""Resolution-of-identity measure for the x_n^{gamma,sigma} coherent states.

The radial weight is

    m(r) = 2 / (Gamma(2gamma) Gamma(sigma+1)^2) * G^{30}_{13}(r | 0; 2gamma-1, sigma, sigma)
         = 2 / (Gamma(2gamma) Gamma(sigma+1)^2) * G^{30}_{13}(r | 1; 2gamma, sigma+1, sigma+1) / r

and its moments must equal 2 (2gamma)_n (sigma+1)_n^2 / n!.  The Meijer
function is evaluated through one of three positive representations:

* ``MacdonaldClosedForm`` when a lower parameter equals 1 (sigma = 0 or
  2gamma = 1): G^{20}_{02}(r | b, c) = 2 r^{(b+c)/2} K_{c-b}(2 sqrt r);
* ``Case1Integral`` (needs -1 < sigma < 0):
  int_0^inf t^{2gamma-1} e^{-t} G^{20}_{12}(r/t | 1; sigma+1, sigma+1) dt;
* ``Case2Integral`` (needs 0 < 2gamma < 1):
  2 r^{sigma+1} / Gamma(1-2gamma) int_1^inf t^{sigma} (t-1)^{-2gamma} K_0(2 sqrt(rt)) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from . import quad
from .errors import ParameterOutOfDomain
from .nlcs import DomainClass, Params, classify
from .quad import QuadConfig, QuadResult
from .specfun import macdonald_k_array, meijer_g2012_array, pochhammer

MAX_MOMENT = 12
# moments are integrated with this config; the weight inside is 10x tighter
MOMENT_CONFIG = QuadConfig(rel_tol=1e-9, abs_tol=1e-300)


class WeightPath(str, Enum):
    CASE1 = "Case1Integral"
    CASE2 = "Case2Integral"
    MACDONALD = "MacdonaldClosedForm"


def _path_ok(params: Params, path: WeightPath) -> bool:
    g2, s1 = 2.0 * params.gamma, params.sigma + 1.0
    if path is WeightPath.MACDONALD:
        return params.sigma == 0.0 or g2 == 1.0
    if path is WeightPath.CASE1:
        return 0.0 < s1 < 1.0 and g2 > 0
    return 0.0 < g2 < 1.0 and s1 > 0


def admissible_paths(params: Params) -> List[WeightPath]:
    return [p for p in WeightPath if _path_ok(params, p)]


def default_path(params: Params) -> WeightPath:
    """Closed form when available, else Case 1 before Case 2."""
    for path in (WeightPath.MACDONALD, WeightPath.CASE1, WeightPath.CASE2):
        if _path_ok(params, path):
            return path
    raise ParameterOutOfDomain(
        f"no positive representation of the weight for (gamma, sigma) = "
        f"({params.gamma}, {params.sigma}); need (gamma, sigma) in S1 u S2"
    )


def _require_admissible(params: Params):
    if params.domain_class is not DomainClass.MEASURE_ADMISSIBLE:
        raise ParameterOutOfDomain(
            f"(gamma, sigma) = ({params.gamma}, {params.sigma}) is "
            f"{params.domain_class.value}, not in S1 u S2"
        )


@dataclass(frozen=True)
class WeightEvaluator:
    """Evaluates G^{30}_{13} and the weight along one fixed path."""

    params: Params
    path: Optional[WeightPath] = None
    quad_cfg: QuadConfig = field(default_factory=lambda: QuadConfig(rel_tol=1e-11, abs_tol=1e-300))

    def __post_init__(self):
        _require_admissible(self.params)
        path = default_path(self.params) if self.path is None else WeightPath(self.path)
        if not _path_ok(self.params, path):
            raise ParameterOutOfDomain(
                f"path {path.value} does not apply to (gamma, sigma) = "
                f"({self.params.gamma}, {self.params.sigma})"
            )
        object.__setattr__(self, "path", path)

    @property
    def prefactor(self) -> float:
        p = self.params
        return 2.0 / (math.gamma(2 * p.gamma) * math.gamma(p.sigma + 1.0) ** 2)

    def g3013(self, r) -> QuadResult:
        """G^{30}_{13}(r | 1; 2gamma, sigma+1, sigma+1) for an array of r > 0."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(~(r > 0)):
            raise ParameterOutOfDomain("r must be positive")
        if self.path is WeightPath.MACDONALD:
            return self._macdonald(r)
        if self.path is WeightPath.CASE1:
            return self._case1(r)
        return self._case2(r)

    def weight(self, r) -> QuadResult:
        """m(r) for an array of r > 0."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        g = self.g3013(r)
        c = self.prefactor / r
        return QuadResult(c * g.value, c * g.error_estimate, g.evaluations)

    # -- the three representations ----------------------------------------

    def _macdonald(self, r):
        lower = [2.0 * self.params.gamma, self.params.sigma + 1.0, self.params.sigma + 1.0]
        lower.remove(1.0)
        b, c = lower
        x = 2.0 * np.sqrt(r)
        k = macdonald_k_array(c - b, x, self.quad_cfg)
        log_pref = math.log(2.0) + 0.5 * (b + c) * np.log(r)
        return QuadResult(_scaled(log_pref, k.value), _scaled(log_pref, k.error_estimate), k.evaluations)

    def _case1(self, r):
        a = 2.0 * self.params.gamma
        b = c = self.params.sigma + 1.0
        inner_cfg = self.quad_cfg.tightened(10.0)
        rr = r[:, None]

        def integrand(t):
            log_w = (a - 1.0) * np.log(t) - t
            x = rr / t
            out = np.zeros_like(t)
            live = log_w + b * np.log(x) - x > -745.0 - 50.0
            if np.any(live):
                g = meijer_g2012_array(1.0, b, c, x[live], inner_cfg)
                out[live] = np.exp(log_w[live]) * g.value
            return out

        # for r < 1 the integrand behaves like t^{a-b-1} on r << t << 1: the
        # mass sits near t ~ 1 when a > b and near t ~ r when a < b
        kappa = min(max(0.5 - (a - b), 0.0), 1.0)
        scale = np.where(r >= 1.0, np.sqrt(r), r**kappa)
        return quad.integrate_exp_sinh(integrand, self.quad_cfg, scale=scale)

    def _case2(self, r):
        sigma = self.params.sigma
        b = 2.0 * self.params.gamma
        inner_cfg = self.quad_cfg.tightened(10.0)
        rr = r[:, None]
        # the integral grows like r^{-(sigma-2gamma+1)} as r -> 0; factor it out
        log_norm = max(sigma - b + 1.0, 0.0) * np.log(np.minimum(r, 1.0))
        ln = log_norm[:, None]

        def integrand(w):
            y = 2.0 * np.sqrt(rr * (1.0 + w))
            log_w = sigma * np.log1p(w) - b * np.log(w) + ln
            out = np.zeros_like(w)
            live = log_w - y > -745.0 - 50.0
            if np.any(live):
                k = macdonald_k_array(0.0, y[live], inner_cfg)
                out[live] = np.exp(log_w[live]) * k.value
            return out

        # for r < 1 the integrand behaves like w^{sigma-2gamma} on 1 << w << 1/r
        kappa = min(max(1.5 + sigma - b, 0.0), 1.0)
        scale = np.where(r >= 1.0, 1.0 / np.sqrt(r), r**-kappa)
        res = quad.integrate_exp_sinh(integrand, self.quad_cfg, scale=scale)
        log_pref = math.log(2.0 / math.gamma(1.0 - b)) + (sigma + 1.0) * np.log(r) - log_norm
        return QuadResult(_scaled(log_pref, res.value), _scaled(log_pref, res.error_estimate), res.evaluations)


def _scaled(log_factor, values):
    """exp(log_factor) * values without inf * 0 where values underflowed."""
    with np.errstate(divide="ignore"):
        return np.where(values > 0, np.exp(log_factor + np.log(np.abs(values))), 0.0)


def _rel_cfg(tol: float) -> QuadConfig:
    return QuadConfig(rel_tol=min(max(tol, 1e-15), 0.5), abs_tol=1e-300)


def meijer_g3013(params: Params, r: float, tol: float = 1e-11, path: Optional[WeightPath] = None) -> QuadResult:
    """G^{30}_{13}(r | 1; 2gamma, sigma+1, sigma+1) at a single r > 0."""
    ev = WeightEvaluator(params, path, _rel_cfg(tol))
    res = ev.g3013([r])
    return QuadResult(float(res.value[0]), float(res.error_estimate[0]), res.evaluations)


def weight(params: Params, r: float, tol: float = 1e-11, path: Optional[WeightPath] = None) -> float:
    """The radial weight m(r) > 0."""
    ev = WeightEvaluator(params, path, _rel_cfg(tol))
    return float(ev.weight([r]).value[0])


def moment_target(params: Params, n: int) -> float:
    """2 (2gamma)_n (sigma+1)_n^2 / n!."""
    return 2.0 * pochhammer(2 * params.gamma, n) * pochhammer(params.sigma + 1, n) ** 2 / math.factorial(n)


@dataclass(frozen=True)
class MomentResult:
    n: int
    value: float
    error_estimate: float
    evaluations: int
    target: float

    @property
    def rel_deviation(self) -> float:
        return self.value / self.target - 1.0


def moments(params: Params, n_max: int, tol: float = 1e-9, path: Optional[WeightPath] = None) -> List[MomentResult]:
    """int_0^inf r^n m(r) dr for n = 0..n_max, sharing one set of weight evaluations."""
    _require_admissible(params)
    if not 0 <= n_max <= MAX_MOMENT:
        raise ParameterOutOfDomain(f"moments are supported for n <= {MAX_MOMENT}")
    ev = WeightEvaluator(params, path, _rel_cfg(tol / 10.0))
    powers = np.arange(n_max + 1, dtype=float)[:, None]

    def integrand(r):
        m = ev.weight(r[0]).value
        return _scaled(powers * np.log(r[0])[None, :], m[None, :])

    res = quad.integrate_exp_sinh(integrand, _rel_cfg(tol), scale=1.0, n_components=n_max + 1)
    return [
        MomentResult(n, float(res.value[n]), float(res.error_estimate[n]), res.evaluations, moment_target(params, n))
        for n in range(n_max + 1)
    ]


def moment(params: Params, n: int, tol: float = 1e-9, path: Optional[WeightPath] = None) -> MomentResult:
    """int_0^inf r^n m(r) dr with its target value."""
    if not 0 <= n <= MAX_MOMENT:
        raise ParameterOutOfDomain(f"moments are supported for n <= {MAX_MOMENT}")
    _require_admissible(params)
    ev = WeightEvaluator(params, path, _rel_cfg(tol / 10.0))

    def integrand(r):
        return _scaled(n * np.log(r), ev.weight(r[0]).value[None, :])

    res = quad.integrate_exp_sinh(integrand, _rel_cfg(tol), scale=1.0)
    return MomentResult(n, float(res.value[0]), float(res.error_estimate[0]), res.evaluations, moment_target(params, n))


def _angular_average(k: int) -> float:
    """(1/2pi) int_0^{2pi} e^{i k theta} d theta for integer k."""
    return 1.0 if k == 0 else 0.0


def identity_resolution_check(params: Params, n_max: int, tol: float = 1e-9) -> np.ndarray:
    """Matrix O_nk of the operator int |z><z| d(theta) in the |psi_n> basis.

    Off-diagonal entries carry the angular average of e^{i(k-n)theta}, which
    vanishes identically; diagonal entries are n! M_n / (2 (2gamma)_n (sigma+1)_n^2)
    with M_n the numerical moment.
    """
    ms = moments(params, n_max, tol)
    out = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for k in range(n_max + 1):
            ang = _angular_average(k - n)
            if ang == 0.0:
                continue
            out[n, k] = ang * ms[n].value / ms[n].target
    return out


@dataclass(frozen=True)
class TableRow:
    assignment: str
    f_star: str
    g_star: str
    condition: str
    satisfied: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    gamma: float
    sigma: float
    rows: List[TableRow]
    in_s1: bool
    in_s2: bool
    domain_class: DomainClass

    @property
    def admissible(self) -> bool:
        return self.in_s1 or self.in_s2


def admissibility_table(params: Params) -> AdmissibilityReport:
    """Evaluate the four (f*, g*) splittings against (gamma, sigma)."""
    g, s = params.gamma, params.sigma
    cond_s1 = g > 0 and -1 < s <= 0
    cond_s2 = 0 < g <= 0.5 and s > -1
    rows = [
        TableRow("a=b=sigma+1, c=2gamma", "G(n+sigma+1)^2/n!", "G(n+2gamma)", "0<gamma, -1<sigma<=0", cond_s1),
        TableRow("a=2gamma, b=c=sigma+1", "G(n+2gamma)G(n+sigma+1)/n!", "G(n+sigma+1)", "0<gamma, -1<sigma<=0", cond_s1),
        TableRow("a=2gamma, b=c=sigma+1", "G(n+2gamma)/n!", "G(n+sigma+1)^2", "0<gamma<=1/2, -1<sigma", cond_s2),
        TableRow("a=c=sigma+1, b=2gamma", "G(n+sigma+1)/n!", "G(n+2gamma)G(n+sigma+1)", "0<gamma, -1<sigma<=0", cond_s1),
    ]
    return AdmissibilityReport(g, s, rows, cond_s1, cond_s2, classify(g, s).domain_class)
