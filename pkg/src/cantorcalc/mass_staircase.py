"""Subdivision sums, mass function and the integral staircase function.

The staircase ``S(x)`` is the cumulative fractal mass of ``[0, x]``.  For a
middle-xi set every depth-k interval carries mass ``2**-k * S(1)``, so ``S``
is ``S(1)`` times the natural Cantor-Lebesgue function ``F``.  ``F`` is
evaluated by descending the construction tree; ``S(1)`` depends only on the
chosen :class:`Convention`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .cantor_set import (
    MIN_LENGTH,
    CantorParams,
    DegenerateConstructionError,
    PreFractal,
    build_prefractal,
    flag,
    hausdorff_dimension,
)

RATIO_THRESHOLD = 1e-3
TREND_DEPTHS = 5
#: Rounding in ``u / S(1)`` must not push a plateau value past its left end.
PLATEAU_SLACK = 0.5 + 1e-12


class Convention(enum.Enum):
    """Normalisation of the total mass ``S(1)``."""

    INVERSE_GAMMA = "inverse-gamma"  # S(1) = 1 / Gamma(1 + zeta)
    GAMMA_SCALED = "gamma-scaled"  # S(1) = Gamma(1 + zeta)
    UNIT = "unit"  # S(1) = 1


class Trend(enum.Enum):
    CONVERGED = "converged"
    GROWING = "growing-unbounded"
    VANISHING = "vanishing-to-zero"
    INCONCLUSIVE = "inconclusive"


class ResolutionError(ValueError):
    """Requested mesh is finer than the pre-fractal can resolve."""


def _check_zeta(zeta: float) -> None:
    if not 0 < zeta <= 1:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta!r}")


@dataclass(frozen=True)
class Subdivision:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) < 2:
            raise ValueError("a subdivision needs at least two points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("subdivision points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, v: float, w: float, n: int) -> "Subdivision":
        return cls(np.linspace(v, w, n + 1))

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.points)))

    @property
    def cells(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points[:-1], self.points[1:]


@dataclass(frozen=True)
class MassEstimate:
    zeta: float
    delta: float
    value: float
    depth_used: int
    trend: Trend | None = None
    ratios: tuple = ()


def rho_sum(pf: PreFractal, q: Subdivision, zeta: float) -> float:
    """Sum of ``(dy)**zeta / Gamma(zeta + 1)`` over cells whose interior meets the set.

    A cell that only touches the set at an endpoint carries no mass, which is
    what makes a gap cell free in the infimum.
    """
    _check_zeta(zeta)
    lo, hi = q.cells
    hits = flag(pf, lo, hi, interior=True)
    return float(np.sum((hi - lo) ** zeta * hits) / math.gamma(zeta + 1))


def _aligned_sum(pf: PreFractal, level: int, v: float, w: float, zeta: float) -> float:
    # Cells are depth-`level` construction intervals clipped to [v, w]; gap
    # cells between them carry flag 0 whatever their refinement, so they are
    # left out of the sum.
    coarse = pf.coarsen(level)
    start = np.searchsorted(coarse.rights, v, side="left")
    stop = np.searchsorted(coarse.lefts, w, side="right")
    if start >= stop:
        return 0.0
    lo = np.maximum(coarse.lefts[start:stop], v)
    hi = np.minimum(coarse.rights[start:stop], w)
    # clipped intervals of the set itself always meet the set
    hits = 1 if level == pf.depth else flag(pf, lo, hi)
    return float(np.sum((hi - lo) ** zeta * hits) / math.gamma(zeta + 1))


def coarse_mass(pf: PreFractal, v: float, w: float, zeta: float, delta: float) -> MassEstimate:
    """Smallest subdivision sum with mesh at most ``delta``.

    The search runs over subdivisions built from construction endpoints of
    every level whose intervals fit inside ``delta`` (gaps refined uniformly,
    contributing nothing).  The result bounds the true infimum from above.
    """
    _check_zeta(zeta)
    if not v < w:
        raise ValueError(f"need v < w, got [{v}, {w}]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    lengths = pf.params.level_lengths()
    if lengths[-1] > delta * (1 + 1e-9):
        raise ResolutionError(
            f"delta={delta:g} is below the depth-{pf.depth} resolution {float(lengths[-1]):g}"
        )
    levels = [j for j in range(pf.depth + 1) if lengths[j] <= delta * (1 + 1e-9)]
    sums = [_aligned_sum(pf, j, v, w, zeta) for j in levels]
    best = int(np.argmin(sums))
    return MassEstimate(zeta, delta, sums[best], levels[best])


def classify_ratios(values) -> tuple[Trend, tuple]:
    """Geometric-ratio test over consecutive depths."""
    values = np.asarray(values, dtype=float)
    if np.all(values == 0):
        return Trend.CONVERGED, ()
    if np.any(values == 0):
        return Trend.VANISHING, ()
    ratios = values[1:] / values[:-1]
    up = ratios > 1 + RATIO_THRESHOLD
    down = ratios < 1 - RATIO_THRESHOLD
    if up.any() and down.any():
        return Trend.INCONCLUSIVE, tuple(map(float, ratios))
    mean = (values[-1] / values[0]) ** (1 / (len(values) - 1))
    if mean > 1 + RATIO_THRESHOLD:
        return Trend.GROWING, tuple(map(float, ratios))
    if mean < 1 - RATIO_THRESHOLD:
        return Trend.VANISHING, tuple(map(float, ratios))
    return Trend.CONVERGED, tuple(map(float, ratios))


def _start_depth(params: CantorParams, v: float, w: float) -> int:
    lengths = [float(x) for x in params.level_lengths(40 + TREND_DEPTHS)]
    k0 = next((k for k in range(6, 41) if lengths[k] <= (w - v) / 8), 40)
    # keep the finest depth above double-precision spacing
    while k0 > 0 and lengths[k0 + TREND_DEPTHS - 1] < MIN_LENGTH:
        k0 -= 1
    return k0


def mass(params: CantorParams, v: float, w: float, zeta: float, depths=None) -> MassEstimate:
    """Mass function of ``C ∩ [v, w]`` via coarse masses at successive depths.

    ``params.depth`` is ignored; ``depths`` (default: five consecutive depths
    chosen from the width of ``[v, w]``) drives the schedule.
    """
    _check_zeta(zeta)
    if depths is None:
        k0 = _start_depth(params, v, w)
        depths = range(k0, k0 + TREND_DEPTHS)
    depths = list(depths)
    finest = build_prefractal(params.with_depth(max(depths)))
    lengths = [float(x) for x in params.level_lengths(max(depths))]
    values = [coarse_mass(finest.coarsen(k), v, w, zeta, lengths[k]).value for k in depths]
    trend, ratios = classify_ratios(values)
    return MassEstimate(zeta, lengths[depths[-1]], values[-1], depths[-1], trend, ratios)


def varsigma_dimension(params: CantorParams, v: float = 0.0, w: float = 1.0, tol: float = 1e-3) -> float:
    """Critical order where the mass function switches from infinite to zero."""
    lo, hi = 1e-3, 1.0
    trend_lo = mass(params, v, w, lo).trend
    trend_hi = mass(params, v, w, hi).trend
    if Trend.INCONCLUSIVE in (trend_lo, trend_hi):
        raise ArithmeticError("trend classification inconclusive at the bracket ends")
    if trend_hi is not Trend.VANISHING:
        return hi
    if trend_lo is not Trend.GROWING:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        trend = mass(params, v, w, mid).trend
        if trend is Trend.CONVERGED:
            return mid
        if trend is Trend.INCONCLUSIVE:
            raise ArithmeticError(f"trend classification inconclusive at zeta={mid}")
        if trend is Trend.GROWING:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def total_mass(zeta: float, convention: Convention) -> float:
    if convention is Convention.INVERSE_GAMMA:
        return 1.0 / math.gamma(1 + zeta)
    if convention is Convention.GAMMA_SCALED:
        return math.gamma(1 + zeta)
    return 1.0


@dataclass(frozen=True)
class StaircaseEvaluator:
    """Evaluates ``S(x)`` for the limit set described by ``params``.

    ``zeta`` only enters through the total mass; the shape of the staircase is
    fixed by the geometry.  ``params.depth`` is irrelevant here.
    """

    params: CantorParams
    zeta: float | None = None
    convention: Convention = Convention.INVERSE_GAMMA
    tolerance: float = 1e-10
    _lengths: np.ndarray = field(init=False, repr=False, compare=False)
    _scalar_lengths: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.zeta is None:
            object.__setattr__(self, "zeta", hausdorff_dimension(float(self.params.xi)))
        _check_zeta(self.zeta)
        if isinstance(self.convention, str):
            object.__setattr__(self, "convention", Convention(self.convention))
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        levels = math.ceil(math.log2(1 / self.tolerance)) + 1
        try:
            lengths = self.params.level_lengths(levels)
        except DegenerateConstructionError as exc:
            raise ValueError(f"staircase undefined: {exc}") from None
        object.__setattr__(self, "_lengths", np.array([float(v) for v in lengths]))
        object.__setattr__(self, "_scalar_lengths", tuple(float(v) for v in lengths))

    @property
    def s1(self) -> float:
        return total_mass(self.zeta, self.convention)

    @property
    def levels(self) -> int:
        return len(self._lengths) - 1

    def unit(self, x):
        """Cantor-Lebesgue function ``F = S / S(1)`` on ``[0, 1]``."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        if x.ndim == 0:
            return np.float64(self._unit_scalar(float(x)))
        value = np.zeros_like(x)
        offset = np.zeros_like(x)
        active = np.ones(x.shape, dtype=bool)
        weight = 1.0
        for j in range(1, self.levels + 1):
            parent, length = self._lengths[j - 1], self._lengths[j]
            weight *= 0.5
            rel = x - offset
            right = active & (rel >= parent - length)
            gap = active & ~right & (rel > length)
            value += weight * (right | gap)
            offset += np.where(right, parent - length, 0.0)
            active &= ~gap
        rel = np.clip((x - offset) / self._lengths[-1], 0.0, 1.0)
        value += np.where(active, weight * rel, 0.0)
        return value

    def _unit_scalar(self, x: float) -> float:
        lengths = self._scalar_lengths
        value, offset, weight = 0.0, 0.0, 1.0
        for j in range(1, len(lengths)):
            parent, length = lengths[j - 1], lengths[j]
            weight *= 0.5
            rel = x - offset
            if rel >= parent - length:
                value += weight
                offset += parent - length
            elif rel > length:
                return value + weight
        return value + weight * min(max((x - offset) / lengths[-1], 0.0), 1.0)

    def _inverse_scalar(self, y: float) -> float:
        lengths = self._scalar_lengths
        offset = 0.0
        for j in range(1, len(lengths)):
            if y > PLATEAU_SLACK:
                offset += lengths[j - 1] - lengths[j]
                y = 2 * y - 1
            else:
                y = 2 * y
        return offset + y * lengths[-1]

    def __call__(self, x):
        return staircase(self, x)


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def staircase(ev: StaircaseEvaluator, x):
    """``S(x)`` for ``x`` in ``[0, 1]`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("staircase is defined on [0, 1]; use staircase_extended")
    return _out(ev.s1 * ev.unit(x))


def staircase_inverse(ev: StaircaseEvaluator, u):
    """Smallest ``x`` with ``S(x) >= u`` for ``u`` in ``[0, S(1)]``."""
    u = np.asarray(u, dtype=float)
    s1 = ev.s1
    if np.any((u < 0) | (u > s1 * (1 + 1e-15))):
        raise ValueError(f"u must lie in [0, S(1)={s1}]")
    y = np.clip(u / s1, 0.0, 1.0)
    if y.ndim == 0:
        return ev._inverse_scalar(float(y))
    offset = np.zeros_like(y)
    lengths = ev._lengths
    for j in range(1, ev.levels + 1):
        right = y > PLATEAU_SLACK
        offset += np.where(right, lengths[j - 1] - lengths[j], 0.0)
        y = np.where(right, 2 * y - 1, 2 * y)
    return _out(offset + y * lengths[-1])


def staircase_extended(ev: StaircaseEvaluator, x):
    """Extension to the real line with ``S(x + n) = S(x) + n S(1)``, odd."""
    x = np.asarray(x, dtype=float)
    n = np.floor(x)
    return _out(ev.s1 * (ev.unit(x - n) + n))


def staircase_inverse_extended(ev: StaircaseEvaluator, u):
    """Generalised inverse of :func:`staircase_extended` on the real line."""
    u = np.asarray(u, dtype=float)
    s1 = ev.s1
    n = np.floor(u / s1)
    rem = np.clip(u - n * s1, 0.0, s1)
    return _out(np.asarray(staircase_inverse(ev, rem)) + n)


def staircase_at_endpoints(ev: StaircaseEvaluator, depth: int) -> np.ndarray:
    """Exact ``S`` at the sorted depth-k endpoints: the mass left of each."""
    n = 2**depth
    idx = np.arange(n, dtype=float)
    out = np.column_stack([idx, idx + 1]).ravel() / n
    return ev.s1 * out

