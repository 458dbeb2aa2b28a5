"""Derivatives and integrals of functions supported on a middle-xi set.

Two representations are supported:

``ConjugateFunction``
    ``f(x) = g(S(x))`` for an ordinary function ``g``.  Differentiation and
    integration reduce to ordinary calculus of ``g`` in ``u = S(x)``.
``GridFunction``
    values at the endpoints of a depth-k pre-fractal, optionally backed by a
    sampler so it can be re-sampled at larger depths.  Derivatives use
    difference quotients against staircase increments; integrals use upper and
    lower Darboux-type sums with staircase weights.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .cantor_set import PreFractal, build_prefractal, contains, locate
from .mass_staircase import (
    StaircaseEvaluator,
    Subdivision,
    staircase,
    staircase_at_endpoints,
)

DEPTH_BUDGET = 24
GRID_TOLERANCE = 1e-3
MIN_LADDER_DEPTH = 4


class NonIntegrable(ArithmeticError):
    """Upper and lower sums failed to meet within the depth budget."""


class EnvelopeKind(enum.Enum):
    SUP = "sup"
    INF = "inf"


@dataclass(frozen=True)
class Envelope:
    kind: EnvelopeKind
    values: np.ndarray


def characteristic(pf: PreFractal, x):
    return contains(pf, x)


@dataclass(frozen=True)
class ConjugateFunction:
    """``f(x) = g(S(x))`` on the set, zero off it."""

    g: Callable
    evaluator: StaircaseEvaluator
    support: PreFractal
    derivative: Callable | None = None
    antiderivative: Callable | None = None

    def __post_init__(self):
        if self.derivative is None:
            return
        s1 = self.evaluator.s1
        probe = np.linspace(0.02 * s1, 0.98 * s1, 17)
        h = 1e-5 * max(s1, 1.0)
        fd = (np.asarray(self.g(probe + h)) - np.asarray(self.g(probe - h))) / (2 * h)
        exact = np.asarray(self.derivative(probe))
        if np.any(np.abs(fd - exact) > 1e-6 * np.maximum(1.0, np.abs(exact))):
            raise ValueError("supplied derivative disagrees with finite differences of g")

    def conjugate_value(self, x):
        """``g(S(x))`` without the support mask."""
        return self.g(staircase(self.evaluator, x))

    def __call__(self, x):
        return self.conjugate_value(x) * characteristic(self.support, x)


@dataclass(frozen=True)
class GridFunction:
    """Values at the sorted endpoints of ``support``."""

    support: PreFractal
    values: np.ndarray = field(repr=False)
    sampler: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (2 * len(self.support),):
            raise ValueError(f"expected {2 * len(self.support)} values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, support: PreFractal, func: Callable) -> "GridFunction":
        return cls(support, np.asarray(func(support.endpoints), dtype=float), func)

    @property
    def points(self) -> np.ndarray:
        return self.support.endpoints

    def at_depth(self, depth: int) -> "GridFunction":
        if depth == self.support.depth:
            return self
        if self.sampler is None:
            raise ValueError("grid function has no sampler to re-sample at another depth")
        return GridFunction.sample(build_prefractal(self.support.params.with_depth(depth)), self.sampler)


def f_derivative(f, x, ev: StaircaseEvaluator | None = None):
    """Local fractal derivative at ``x`` (scalar or array).

    Conjugate path: ``g'(S(x)) * chi(x)``.  Grid path: quotient over the
    endpoints of the depth-k interval holding ``x``; zero off the set and NaN
    where the staircase increment is below the evaluator tolerance.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(f, ConjugateFunction):
        if f.derivative is None:
            raise ValueError("conjugate function has no analytic derivative")
        out = np.asarray(f.derivative(staircase(f.evaluator, x))) * characteristic(f.support, x)
        return float(out) if out.ndim == 0 else out
    if ev is None:
        raise ValueError("grid derivative needs a staircase evaluator")
    idx = locate(f.support, x)
    safe = np.maximum(idx, 0)
    s_ends = staircase_at_endpoints(ev, f.support.depth)
    ds = s_ends[2 * safe + 1] - s_ends[2 * safe]
    df = f.values[2 * safe + 1] - f.values[2 * safe]
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = np.where(ds < ev.tolerance, np.nan, df / ds)
    out = np.where(idx < 0, 0.0, quotient)
    return float(out) if out.ndim == 0 else out


def _range_extreme(arr: np.ndarray, start: np.ndarray, stop: np.ndarray, op) -> np.ndarray:
    """``op`` over ``arr[start:stop]`` for each non-empty range (sparse table)."""
    length = stop - start
    table = [arr]
    span = 1
    while 2 * span <= length.max():
        prev = table[-1]
        table.append(op(prev[:-span], prev[span:]))
        span *= 2
    level = np.floor(np.log2(np.maximum(length, 1))).astype(int)
    out = np.empty(len(start))
    for lv in np.unique(level):
        sel = level == lv
        row = table[lv]
        out[sel] = op(row[start[sel]], row[stop[sel] - 2**lv])
    return out


def envelopes(f: GridFunction, q: Subdivision) -> tuple[Envelope, Envelope]:
    """Sup and inf of ``f`` over each cell of ``q`` (0 where the cell misses the set).

    A cell sees both endpoint values of every depth-k interval it meets.
    """
    pf = f.support
    lo, hi = q.cells
    start = np.searchsorted(pf.rights, lo, side="left")
    stop = np.searchsorted(pf.lefts, hi, side="right")
    hit = start < stop
    pairs = f.values.reshape(-1, 2)
    upper = np.zeros(len(lo))
    lower = np.zeros(len(lo))
    if hit.any():
        upper[hit] = _range_extreme(pairs.max(axis=1), start[hit], stop[hit], np.maximum)
        lower[hit] = _range_extreme(pairs.min(axis=1), start[hit], stop[hit], np.minimum)
    return Envelope(EnvelopeKind.SUP, upper), Envelope(EnvelopeKind.INF, lower)


def darboux_sums(f: GridFunction, q: Subdivision, ev: StaircaseEvaluator, s_points=None) -> tuple[float, float]:
    """``(upper, lower)`` sums with weights ``S(y_j) - S(y_{j-1})``."""
    s = np.asarray(staircase(ev, q.points) if s_points is None else s_points)
    weights = np.diff(s)
    sup, inf = envelopes(f, q)
    return float(np.sum(sup.values * weights)), float(np.sum(inf.values * weights))


def upper_sum(f: GridFunction, q: Subdivision, ev: StaircaseEvaluator) -> float:
    return darboux_sums(f, q, ev)[0]


def lower_sum(f: GridFunction, q: Subdivision, ev: StaircaseEvaluator) -> float:
    return darboux_sums(f, q, ev)[1]


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    upper: float
    lower: float
    depth: int


def _grid_subdivision(gf: GridFunction, ev: StaircaseEvaluator, v: float, w: float):
    pts = gf.points
    s_pts = staircase_at_endpoints(ev, gf.support.depth)
    inner = (pts > v) & (pts < w)
    q = np.concatenate([[v], pts[inner], [w]])
    s = np.concatenate([[staircase(ev, v)], s_pts[inner], [staircase(ev, w)]])
    return Subdivision(q), s


def integrate_grid(
    f: GridFunction,
    ev: StaircaseEvaluator,
    v: float = 0.0,
    w: float = 1.0,
    tolerance: float = GRID_TOLERANCE,
    depth_budget: int = DEPTH_BUDGET,
) -> IntegralEstimate:
    """Darboux integral over ``[v, w]``.

    A grid without a sampler is integrated at its own depth only.  With a
    sampler the depth climbs the ladder 4, 8, 16, ... (capped at
    ``depth_budget``, never below the grid's own depth) and stops once the
    sums meet and the midpoint agrees with the previous rung; endpoint values
    of a coarse grid cannot see oscillation inside an interval.
    """
    if f.sampler is None:
        ladder = [f.support.depth]
    else:
        ladder, step = [], MIN_LADDER_DEPTH
        while True:
            depth = max(step, f.support.depth)
            if not ladder or depth > ladder[-1]:
                ladder.append(depth)
            if step >= depth_budget:
                break
            step = min(2 * step, depth_budget)
    previous = None
    for depth in ladder:
        gf = f.at_depth(depth)
        q, s = _grid_subdivision(gf, ev, v, w)
        upper, lower = darboux_sums(gf, q, ev, s)
        mid = 0.5 * (upper + lower)
        settled = f.sampler is None or (previous is not None and abs(mid - previous) < tolerance)
        if upper - lower < tolerance and settled:
            return IntegralEstimate(mid, upper, lower, depth)
        previous = mid
    raise NonIntegrable(f"upper - lower = {upper - lower:.3g} at depth {depth} exceeds {tolerance:g}")


def f_integral(f, v: float = 0.0, w: float = 1.0, ev: StaircaseEvaluator | None = None, **kwargs) -> float:
    """Fractal integral of ``f`` over ``[v, w]``.

    For a conjugate function this is ``G(S(w)) - G(S(v))`` with ``G`` the
    antiderivative of ``g`` (ordinary quadrature of ``g`` when no
    antiderivative is supplied).
    """
    if not v < w:
        raise ValueError(f"need v < w, got [{v}, {w}]")
    if isinstance(f, ConjugateFunction):
        a, b = staircase(f.evaluator, v), staircase(f.evaluator, w)
        if f.antiderivative is not None:
            return float(f.antiderivative(b) - f.antiderivative(a))
        value, _ = integrate.quad(f.g, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        return float(value)
    if ev is None:
        raise ValueError("grid integral needs a staircase evaluator")
    return integrate_grid(f, ev, v, w, **kwargs).value


def ftc_residual(f: ConjugateFunction, v: float = 0.0, w: float = 1.0, grid: bool = False) -> float:
    """``|integral of D f over [v, w] - (f(w) - f(v))|``.

    The derivative is integrated independently of ``g``: by quadrature of
    ``g'`` in the conjugate variable, or on the grid with ``grid=True``.
    """
    if f.derivative is None:
        raise ValueError("fundamental theorem check needs an analytic derivative")
    ev = f.evaluator
    if grid:
        dfunc = lambda x: f.derivative(staircase(ev, x))  # noqa: E731
        gf = GridFunction.sample(build_prefractal(f.support.params.with_depth(1)), dfunc)
        lhs = integrate_grid(gf, ev, v, w).value
    else:
        a, b = staircase(ev, v), staircase(ev, w)
        lhs, _ = integrate.quad(f.derivative, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
    return abs(lhs - (f.conjugate_value(w) - f.conjugate_value(v)))
