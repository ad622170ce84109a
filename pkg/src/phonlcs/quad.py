"""Adaptive numerical integration on finite and semi-infinite intervals.

Two engines live here:

* a globally adaptive Gauss-Legendre panel scheme (``integrate_finite``,
  ``integrate_semi_infinite``).  Each panel is integrated whole and as two
  halves; the difference of the two is the panel's error estimate, so every
  reported error bounds the observed interval-halving discrepancy.  The
  semi-infinite variant integrates ``(0, L)`` on panels and then appends
  dyadic tail pieces ``[L, 2L]`` in the variable ``u = ln t`` until the
  newest piece is negligible.

* a vectorised double-exponential (exp-sinh) rule, ``integrate_exp_sinh``,
  for batches of related integrals on ``(0, inf)``.  Nested integrals (a
  Meijer-G function inside a moment integral) are evaluated with it because
  it shares one abscissa set across thousands of components.

Integrands are vectorised: they receive a numpy array of abscissae and
return an array of the same leading shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BudgetExceeded, QuadratureNoConvergence

Integrand = Callable[[np.ndarray], np.ndarray]

_GL_ORDER = 10
_GL_X, _GL_W = leggauss(_GL_ORDER)
_MAX_TAIL_PIECES = 1000
_HALF_PI = 0.5 * math.pi


DEFAULT_MAX_EVALUATIONS = 1_000_000
_max_evaluations_override: Optional[int] = None


def set_default_max_evaluations(n: Optional[int]):
    """Override the budget of configs created afterwards (``None`` resets it)."""
    global _max_evaluations_override
    if n is not None and n < 100:
        raise ValueError("max_evaluations must be at least 100")
    _max_evaluations_override = n


def default_max_evaluations() -> int:
    if _max_evaluations_override is not None:
        return _max_evaluations_override
    return DEFAULT_MAX_EVALUATIONS


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and budget for one integration call.

    ``max_evaluations`` counts abscissae (per component for vectorised
    integrands).  ``split_points`` are forced panel boundaries.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_evaluations: int = field(default_factory=default_max_evaluations)
    split_points: tuple = ()

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError(f"abs_tol must lie in (0, 1), got {self.abs_tol}")
        if self.max_evaluations < 100:
            raise ValueError("max_evaluations must be at least 100")
        if any(not (p > 0 and math.isfinite(p)) for p in self.split_points):
            raise ValueError("split_points must be positive and finite")
        object.__setattr__(self, "split_points", tuple(sorted(self.split_points)))

    def tightened(self, factor: float = 10.0) -> "QuadConfig":
        """Copy with both tolerances divided by ``factor`` (floored at 1e-15)."""
        return replace(
            self,
            rel_tol=max(self.rel_tol / factor, 1e-15),
            abs_tol=max(self.abs_tol / factor, 1e-300),
            split_points=(),
        )


DEFAULT_CONFIG = QuadConfig(max_evaluations=DEFAULT_MAX_EVALUATIONS)


@dataclass(frozen=True)
class QuadResult:
    value: object
    error_estimate: object
    evaluations: int

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# variable maps used by panels: u -> (t, dt/du)


def _linear(u):
    return u, np.ones_like(u)


def _exponential(u):
    t = np.exp(u)
    return t, t


def _power_map(origin: float, power: float, sign: float):
    def mapping(u):
        up = u ** (power - 1.0)
        return origin + sign * up * u, power * up

    return mapping


class _Panel:
    __slots__ = ("mapping", "lo", "hi", "whole", "halves", "err")

    def __init__(self, mapping, lo, hi, whole=None):
        self.mapping = mapping
        self.lo = lo
        self.hi = hi
        self.whole = whole
        self.halves = None
        self.err = None


def _gauss_sums(f: Integrand, segments):
    """Gauss-Legendre sums over ``segments`` with one integrand call."""
    us, jacs = [], []
    for mapping, lo, hi in segments:
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        t, jac = mapping(mid + half * _GL_X)
        us.append(t)
        jacs.append(jac * half)
    t_all = np.concatenate(us)
    y = np.asarray(f(t_all))
    if y.shape[0] != t_all.shape[0]:
        raise ValueError("integrand must return one value per abscissa")
    if not np.all(np.isfinite(y)):
        bad = t_all[~np.isfinite(y).reshape(len(t_all), -1).all(axis=1)]
        raise QuadratureNoConvergence(
            f"integrand is not finite at t = {bad[:3].tolist()}"
        )
    out = []
    for i, jac in enumerate(jacs):
        block = y[i * _GL_ORDER:(i + 1) * _GL_ORDER]
        wj = _GL_W * jac
        out.append(np.tensordot(wj, block, axes=(0, 0)))
    return out, len(t_all)


def _evaluate_panels(f: Integrand, panels):
    segs = []
    for p in panels:
        mid = 0.5 * (p.lo + p.hi)
        if p.whole is None:
            segs.append((p.mapping, p.lo, p.hi))
        segs.append((p.mapping, p.lo, mid))
        segs.append((p.mapping, mid, p.hi))
    sums, count = _gauss_sums(f, segs)
    k = 0
    for p in panels:
        if p.whole is None:
            p.whole = sums[k]
            k += 1
        left, right = sums[k], sums[k + 1]
        k += 2
        p.halves = (left, right)
        p.err = np.abs(p.whole - (left + right))
    return count


def _split(panel: _Panel):
    mid = 0.5 * (panel.lo + panel.hi)
    if not (panel.lo < mid < panel.hi) or (panel.hi - panel.lo) <= 1e-15 * max(
        abs(panel.lo), abs(panel.hi)
    ):
        raise QuadratureNoConvergence(
            f"panel [{panel.lo}, {panel.hi}] cannot be subdivided further"
        )
    left, right = panel.halves
    return [
        _Panel(panel.mapping, panel.lo, mid, left),
        _Panel(panel.mapping, mid, panel.hi, right),
    ]


def _value(p: _Panel):
    return p.halves[0] + p.halves[1]


def _adaptive(f, panels, cfg: QuadConfig, tail_extender=None):
    """Globally adaptive refinement of ``panels``.

    ``tail_extender(panels, total, tol)`` may return a new panel to append
    (used by the semi-infinite driver); refinement stops only once it
    returns ``None`` and the summed panel error is within tolerance.
    """
    evaluations = _evaluate_panels(f, panels)
    while True:
        total = sum(_value(p) for p in panels)
        err = sum(p.err for p in panels)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        if tail_extender is not None:
            extra = tail_extender(panels, total, tol)
            if extra is not None:
                evaluations += _evaluate_panels(f, [extra])
                panels.append(extra)
                _check_budget(evaluations, cfg)
                continue
        if np.all(err <= 0.9 * tol):
            return total, err, evaluations
        scaled = np.array([np.max(p.err / tol) for p in panels])
        cutoff = 0.25 * scaled.max()
        fresh = []
        kept = []
        for p, s in zip(panels, scaled):
            if s >= cutoff:
                fresh.extend(_split(p))
            else:
                kept.append(p)
        evaluations += _evaluate_panels(f, fresh)
        _check_budget(evaluations, cfg)
        panels[:] = kept + fresh
        panels.sort(key=_panel_order)


def _panel_order(p: _Panel):
    # panels of one map share an order; maps are ordered head -> tail
    return (getattr(p.mapping, "rank", 0), p.lo)


def _check_budget(evaluations: int, cfg: QuadConfig):
    if evaluations > cfg.max_evaluations:
        raise BudgetExceeded(
            f"quadrature budget of {cfg.max_evaluations} evaluations exhausted"
        )


def _result(total, err, evaluations):
    if np.ndim(total) == 0:
        total = total.item() if hasattr(total, "item") else total
        err = float(err)
    return QuadResult(total, err, evaluations)


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    cfg: QuadConfig = DEFAULT_CONFIG,
    *,
    singularity: Optional[float] = None,
    singular_end: str = "a",
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    ``singularity=p`` declares an endpoint behaviour ``|t - end|**(-p)`` with
    ``0 <= p < 1`` at ``singular_end`` (``"a"`` or ``"b"``); the panel
    adjacent to that end is integrated in ``u = |t - end|**(1 - p)``.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    cuts = [a] + [s for s in cfg.split_points if a < s < b] + [b]
    panels = [_Panel(_linear, lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:])]
    if singularity is not None:
        if not 0.0 <= singularity < 1.0:
            raise ValueError("singularity exponent must lie in [0, 1)")
        power = 1.0 / (1.0 - singularity)
        if singular_end == "a":
            first = panels[0]
            width = (first.hi - a) ** (1.0 / power)
            panels[0] = _Panel(_power_map(a, power, 1.0), 0.0, width)
        elif singular_end == "b":
            last = panels[-1]
            width = (b - last.lo) ** (1.0 / power)
            panels[-1] = _Panel(_power_map(b, power, -1.0), 0.0, width)
        else:
            raise ValueError("singular_end must be 'a' or 'b'")
    total, err, n = _adaptive(f, panels, cfg)
    return _result(total, err, n)


def integrate_semi_infinite(
    f: Integrand,
    cfg: QuadConfig = DEFAULT_CONFIG,
    *,
    singularity: Optional[float] = None,
    scale: float = 1.0,
) -> QuadResult:
    """Integrate ``f`` over ``(0, inf)``.

    ``(0, L)`` with ``L = max(scale, split points)`` is covered by adaptive
    panels; beyond it, pieces ``[L, 2L], [2L, 4L], ...`` are integrated in
    ``u = ln t`` and appended until the newest piece is below a tenth of the
    tolerance and no longer growing.  ``singularity=p`` declares
    ``f ~ t**(-p)`` at the origin.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    L = max([scale, *cfg.split_points])
    cuts = [0.0] + [s for s in cfg.split_points if s < L] + [L]
    head = [_Panel(_linear, lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:])]
    if singularity is not None:
        if not 0.0 <= singularity < 1.0:
            raise ValueError("singularity exponent must lie in [0, 1)")
        power = 1.0 / (1.0 - singularity)
        head[0] = _Panel(_power_map(0.0, power, 1.0), 0.0, head[0].hi ** (1.0 / power))
    tail_map = _TailMap()
    log_l = math.log(L)
    panels = head + [_Panel(tail_map, log_l, log_l + math.log(2.0))]
    pieces = [panels[-1]]

    def extend(current, total, tol):
        last = pieces[-1]
        vals = [np.abs(_value(p)) for p in pieces[-2:]]
        growing = len(vals) == 2 and np.any(vals[1] > vals[0])
        if np.all(vals[-1] < tol / 10.0) and not growing:
            return None
        if len(pieces) >= _MAX_TAIL_PIECES:
            raise QuadratureNoConvergence("integrand tail does not decay")
        piece = _Panel(tail_map, last.hi, last.hi + math.log(2.0))
        pieces.append(piece)
        return piece

    total, err, n = _adaptive(f, panels, cfg, tail_extender=extend)
    err = err + np.abs(_value(pieces[-1]))
    return _result(total, err, n)


class _TailMap:
    rank = 1

    def __call__(self, u):
        return _exponential(u)


# ---------------------------------------------------------------------------
# double-exponential rule for vectorised families of integrals on (0, inf)

_DE_H0 = 0.5
_DE_MAX_LEVEL = 9
_DE_CHUNK = 8
_DE_T_MIN = 1e-300
_DE_T_MAX = 1e300


def _de_nodes(v):
    s = _HALF_PI * np.sinh(v)
    return np.exp(s), _HALF_PI * np.cosh(v) * np.exp(s)


def integrate_exp_sinh(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadConfig = DEFAULT_CONFIG,
    *,
    scale=1.0,
    n_components: Optional[int] = None,
    min_level: int = 3,
) -> QuadResult:
    """Integrate a family of functions over ``(0, inf)`` with exp-sinh.

    ``f`` receives abscissae of shape ``(k, m)`` (component ``i`` uses the
    substitution ``t = scale[i] * exp(pi/2 sinh v)``) and returns values of
    the same shape.  The trapezoid step in ``v`` is halved until successive
    estimates agree to the tolerance for every component; the range of ``v``
    is truncated on the coarsest level once contributions have decayed.

    Returns a ``QuadResult`` whose value and error are arrays of length
    ``k``.  ``evaluations`` counts abscissae per component.
    """
    scale = np.atleast_1d(np.asarray(scale, dtype=float))
    k = n_components if n_components is not None else scale.shape[0]
    if scale.shape[0] == 1 and k > 1:
        scale = np.full(k, scale[0])
    if np.any(~(scale > 0)):
        raise ValueError("scale must be positive")

    def contributions(v):
        v = np.asarray(v, dtype=float)
        x, w = _de_nodes(v)
        t = scale[:, None] * x[None, :]
        # abscissae outside the float range carry negligible mass; drop them
        inside = (t > _DE_T_MIN) & (t < _DE_T_MAX)
        y = np.asarray(f(np.clip(t, _DE_T_MIN, _DE_T_MAX)))
        c = np.where(inside, y * (w[None, :] * scale[:, None]), 0.0)
        if not np.all(np.isfinite(c)):
            raise QuadratureNoConvergence("integrand is not finite on the exp-sinh grid")
        return c

    evaluations = 1
    centre = contributions([0.0])[:, 0]
    total = centre.copy()
    limits = []
    for direction in (1, -1):
        j = 0
        last = np.abs(centre)
        small_run = 0
        while True:
            v = direction * _DE_H0 * np.arange(j + 1, j + 1 + _DE_CHUNK)
            log_x = _HALF_PI * np.sinh(v)
            keep = (log_x > math.log(_DE_T_MIN)) & (log_x < math.log(_DE_T_MAX))
            if not keep.any():
                limits.append(j)
                break
            v = v[keep]
            c = contributions(v)
            evaluations += len(v)
            stop_at = None
            for idx in range(c.shape[1]):
                col = c[:, idx]
                total = total + col
                tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
                mag = np.abs(col)
                if np.all(mag <= 1e-3 * tol) and np.all(mag <= last):
                    small_run += 1
                else:
                    small_run = 0
                last = mag
                if small_run >= 3:
                    stop_at = j + idx + 1
                    break
            if stop_at is not None:
                limits.append(stop_at)
                break
            if not keep.all():
                limits.append(j + len(v))
                break
            j += _DE_CHUNK
            if j * _DE_H0 > 8.0:
                raise QuadratureNoConvergence("exp-sinh truncation did not settle")
    # drop contributions summed beyond the truncation point: recompute cleanly
    k_hi, k_lo = limits
    base = np.arange(-k_lo, k_hi + 1) * _DE_H0
    estimate = _DE_H0 * contributions(base).sum(axis=1)
    evaluations += len(base)
    v_lo, v_hi = base[0], base[-1]
    h = _DE_H0
    err = np.full(k, np.inf)
    for level in range(1, _DE_MAX_LEVEL + 1):
        h *= 0.5
        v = v_lo + h + 2 * h * np.arange(int(round((v_hi - v_lo) / (2 * h))))
        fresh = contributions(v).sum(axis=1)
        evaluations += len(v)
        refined = 0.5 * estimate + h * fresh
        err = np.abs(refined - estimate)
        estimate = refined
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(estimate))
        if evaluations > cfg.max_evaluations:
            raise BudgetExceeded("exp-sinh budget exhausted")
        if level >= min_level and np.all(err <= tol):
            return QuadResult(estimate, err, evaluations)
    raise QuadratureNoConvergence(
        f"exp-sinh did not converge: max relative error "
        f"{float(np.max(err / np.maximum(np.abs(estimate), 1e-300))):.3e}"
    )
