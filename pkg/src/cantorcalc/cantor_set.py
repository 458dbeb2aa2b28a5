"""Finite-depth middle-xi Cantor sets.

A :class:`PreFractal` is the union of the ``2**depth`` closed intervals that
survive ``depth`` removal steps on ``[0, 1]``.  Two removal rules exist:

* ``Mode.PROPORTIONAL`` removes the middle fraction ``xi`` of every surviving
  interval, so each depth-k piece has length ``((1 - xi) / 2) ** k``.
* ``Mode.LITERAL`` removes an open interval of absolute length ``xi ** k`` at
  step ``k``.  It agrees with the proportional rule only for ``xi = 1/3``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

Real = Union[float, Fraction]

#: Beyond this depth interval lengths fall below double-precision spacing.
MAX_DEPTH = 52
#: Largest interval count materialised in memory (2**26 endpoints pairs).
MAX_INTERVALS = 2**26
#: Shortest interval kept distinct from its neighbours in double precision.
MIN_LENGTH = 1e-14
TOUCH_SLACK = 4 * np.finfo(float).eps


class Mode(enum.Enum):
    PROPORTIONAL = "proportional"
    LITERAL = "literal"


class DegenerateConstructionError(ValueError):
    """The literal removal length swallows a surviving interval."""


@dataclass(frozen=True)
class CantorParams:
    xi: Real
    mode: Mode = Mode.PROPORTIONAL
    depth: int = 0

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 < self.xi < 1:
            raise ValueError(f"xi must lie in (0, 1), got {self.xi!r}")
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValueError(f"depth must be a non-negative integer, got {self.depth!r}")
        if self.depth > MAX_DEPTH:
            raise ValueError(f"depth {self.depth} exceeds the double-precision cap {MAX_DEPTH}")

    @property
    def scale(self) -> Real:
        """Similarity ratio ``(1 - xi) / 2`` of the proportional construction."""
        return (1 - self.xi) / 2

    def with_depth(self, depth: int) -> "CantorParams":
        return CantorParams(self.xi, self.mode, depth)

    def level_lengths(self, depth: int | None = None) -> list:
        """Lengths of a single surviving interval at levels ``0..depth``.

        Raises :class:`DegenerateConstructionError` when the literal rule
        removes at least a whole interval.
        """
        depth = self.depth if depth is None else depth
        xi = self.xi
        lengths = [Fraction(1) if isinstance(xi, Fraction) else 1.0]
        for k in range(1, depth + 1):
            parent = lengths[-1]
            if self.mode is Mode.PROPORTIONAL:
                lengths.append(parent * self.scale)
            else:
                gap = xi**k
                if gap >= parent:
                    raise DegenerateConstructionError(
                        f"literal construction with xi={xi} removes length {gap} "
                        f"from intervals of length {parent} at step {k}"
                    )
                lengths.append((parent - gap) / 2)
        return lengths


@dataclass(frozen=True)
class PreFractal:
    """Sorted disjoint closed intervals ``[lefts[i], rights[i]]``."""

    params: CantorParams
    lefts: np.ndarray = field(repr=False)
    rights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.lefts.setflags(write=False)
        self.rights.setflags(write=False)

    @property
    def depth(self) -> int:
        return self.params.depth

    def __len__(self) -> int:
        return len(self.lefts)

    @property
    def intervals(self) -> np.ndarray:
        """``(n, 2)`` array of interval endpoints."""
        return np.column_stack([self.lefts, self.rights])

    @property
    def endpoints(self) -> np.ndarray:
        """All ``2 * n`` endpoints, sorted."""
        return np.column_stack([self.lefts, self.rights]).ravel()

    @property
    def resolution(self) -> float:
        """Length of one depth-k interval: the membership resolution."""
        return float(self.rights[0] - self.lefts[0])

    def coarsen(self, depth: int) -> "PreFractal":
        """The ancestor pre-fractal at a shallower ``depth``."""
        if not 0 <= depth <= self.depth:
            raise ValueError(f"cannot coarsen depth {self.depth} to {depth}")
        if depth == self.depth:
            return self
        step = 2 ** (self.depth - depth)
        return PreFractal(
            self.params.with_depth(depth),
            self.lefts[::step].copy(),
            self.rights[step - 1 :: step].copy(),
        )


def build_prefractal(params: CantorParams) -> PreFractal:
    """Construct the depth-k interval list.

    Right endpoints are obtained by reflecting left endpoints through 1/2,
    which keeps the list exactly symmetric and pins the last endpoint to 1.
    """
    if 2**params.depth > MAX_INTERVALS:
        raise ValueError(
            f"depth {params.depth} needs 2**{params.depth} intervals; "
            f"at most {MAX_INTERVALS} are materialised"
        )
    lengths = [float(v) for v in params.level_lengths()]
    if lengths[-1] < MIN_LENGTH:
        raise ValueError(
            f"depth-{params.depth} intervals of length {lengths[-1]:.3g} fall below "
            "double-precision resolution"
        )
    lefts = np.zeros(1)
    for k in range(1, params.depth + 1):
        shift = lengths[k - 1] - lengths[k]
        lefts = np.column_stack([lefts, lefts + shift]).ravel()
    rights = 1.0 - lefts[::-1]
    return PreFractal(params, lefts, rights)


def build_prefractal_exact(params: CantorParams) -> list[tuple[Fraction, Fraction]]:
    """Exact rational interval list for rational ``xi``."""
    xi = Fraction(params.xi).limit_denominator(10**12) if isinstance(params.xi, float) else params.xi
    exact = CantorParams(Fraction(xi), params.mode, params.depth)
    lengths = exact.level_lengths()
    lefts = [Fraction(0)]
    for k in range(1, exact.depth + 1):
        shift = lengths[k - 1] - lengths[k]
        lefts = [x for l in lefts for x in (l, l + shift)]
    return [(l, l + lengths[-1]) for l in lefts]


def flag(pf: PreFractal, lo, hi=None, interior: bool = False):
    """1 where ``[lo, hi]`` meets the pre-fractal, else 0.

    Accepts scalars or arrays.  An inverted interval (``hi < lo``) is read as
    the single point ``lo``.  With ``interior=True`` only the open interval
    ``(lo, hi)`` counts, so a cell touching the set at an endpoint gets 0.
    """
    lo_arr = np.asarray(lo, dtype=float)
    hi_arr = lo_arr if hi is None else np.asarray(hi, dtype=float)
    hi_arr = np.where(hi_arr < lo_arr, lo_arr, hi_arr)
    if interior:
        # a few ulps of slack so that 1/3 and 2/3 touch [1/3, 2/3] only at its ends
        lo_arr, hi_arr = lo_arr + TOUCH_SLACK, hi_arr - TOUCH_SLACK
    idx = np.searchsorted(pf.rights, lo_arr, side="right" if interior else "left")
    inside = idx < len(pf)
    first_left = pf.lefts[np.minimum(idx, len(pf) - 1)]
    hit = inside & ((first_left < hi_arr) if interior else (first_left <= hi_arr))
    out = hit.astype(int)
    return int(out) if out.ndim == 0 else out


def contains(pf: PreFractal, x):
    """Characteristic function of the pre-fractal (1 on the set, 0 off it)."""
    return flag(pf, x)


def locate(pf: PreFractal, x) -> np.ndarray:
    """Index of the interval containing each ``x``, or -1 in a gap."""
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(pf.rights, x, side="left")
    safe = np.minimum(idx, len(pf) - 1)
    ok = (idx < len(pf)) & (pf.lefts[safe] <= x)
    return np.where(ok, safe, -1)


def hausdorff_dimension(xi: float) -> float:
    """``log 2 / (log 2 - log(1 - xi))``."""
    if not 0 < xi < 1:
        raise ValueError(f"xi must lie in (0, 1), got {xi!r}")
    return math.log(2) / (math.log(2) - math.log1p(-float(xi)))


def xi_for_dimension(dim: float) -> float:
    """Inverse of :func:`hausdorff_dimension`; returns 0 for ``dim == 1``."""
    if not 0 < dim <= 1:
        raise ValueError(f"dimension must lie in (0, 1], got {dim!r}")
    return -math.expm1(math.log(2) * (1 - 1 / dim))


def lebesgue_measure(pf: PreFractal) -> float:
    return float(np.sum(pf.rights - pf.lefts))


def write_intervals_csv(path, sets) -> None:
    """Write ``depth,index,left,right`` rows for each pre-fractal in ``sets``."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["depth", "index", "left", "right"])
        for pf in sets:
            for i, (l, r) in enumerate(zip(pf.lefts, pf.rights)):
                writer.writerow([pf.depth, i, f"{l:.17g}", f"{r:.17g}"])
