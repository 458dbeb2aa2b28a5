"""Diffusion on middle-xi Cantor sets.

Space is a middle-xi set of dimension ``zeta``; time is either ordinary
(``beta == 1``) or a middle-xi set of dimension ``beta``.  In the staircase
coordinates ``u = S_zeta(x)`` and ``tau = S_beta(t)`` the propagator is an
ordinary Gaussian heat kernel,

    W(x, t) = (4 pi c tau)**-0.5 * exp(-u**2 / (4 c tau)),

normalised against ``dS``.  The regime follows from comparing the orders:
super-diffusion for ``zeta < beta``, normal for equality, sub-diffusion for
``zeta > beta``.  The mean squared displacement in ``x`` then grows like
``t**(beta / zeta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from .cantor_set import CantorParams, xi_for_dimension
from .mass_staircase import (
    Convention,
    StaircaseEvaluator,
    staircase_extended,
    staircase_inverse_extended,
    total_mass,
)

EQUALITY_TOL = 1e-12
#: Prefactor of the closed-form second moments as printed alongside the
#: propagators; the Gaussian kernel itself has second moment 2 c tau.
STATED_MSD_PREFACTOR = 4.0
X_MOMENT_POINTS = 100_001


class Regime(enum.Enum):
    SUPER = "super"
    NORMAL = "normal"
    SUB = "sub"


def classify(zeta: float, beta: float) -> Regime:
    for name, val in (("zeta", zeta), ("beta", beta)):
        if not 0 < val <= 1:
            raise ValueError(f"{name} must lie in (0, 1], got {val!r}")
    if abs(zeta - beta) <= EQUALITY_TOL:
        return Regime.NORMAL
    return Regime.SUPER if zeta < beta else Regime.SUB


class QuadratureError(ArithmeticError):
    pass


class StaircaseMap:
    """Odd, periodically extended staircase of order ``order`` on the real line.

    The underlying set is the middle-xi set whose Hausdorff dimension equals
    ``order``; order 1 degenerates to the identity scaled by ``S(1)``.
    """

    def __init__(self, order: float, convention: Convention = Convention.INVERSE_GAMMA):
        self.order = order
        if order == 1:
            self.evaluator = None
            self.xi = 0.0
            self.s1 = total_mass(1.0, convention)
        else:
            self.xi = xi_for_dimension(order)
            self.evaluator = StaircaseEvaluator(CantorParams(self.xi), order, convention)
            self.s1 = self.evaluator.s1

    def __call__(self, x):
        if self.evaluator is None:
            return self.s1 * np.asarray(x, dtype=float) if np.ndim(x) else self.s1 * float(x)
        return staircase_extended(self.evaluator, x)

    def inverse(self, u):
        if self.evaluator is None:
            return np.asarray(u, dtype=float) / self.s1 if np.ndim(u) else float(u) / self.s1
        return staircase_inverse_extended(self.evaluator, u)


@dataclass(frozen=True)
class DiffusionParams:
    """``coefficient`` is K (super), G (normal) or L (sub) depending on regime.

    ``beta`` defaults to 1 (ordinary time) for super-diffusion and to ``zeta``
    for normal diffusion; sub-diffusion needs it explicitly.
    """

    regime: Regime
    zeta: float
    beta: float | None = None
    coefficient: float = 1.0
    convention: Convention = Convention.INVERSE_GAMMA
    space: StaircaseMap = field(init=False, repr=False, compare=False)
    clock_map: StaircaseMap = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        regime = Regime(self.regime) if isinstance(self.regime, str) else self.regime
        object.__setattr__(self, "regime", regime)
        if isinstance(self.convention, str):
            object.__setattr__(self, "convention", Convention(self.convention))
        beta = self.beta
        if beta is None:
            if regime is Regime.SUB:
                raise ValueError("sub-diffusion needs an explicit time order beta")
            beta = self.zeta if regime is Regime.NORMAL else 1.0
        object.__setattr__(self, "beta", float(beta))
        if not self.coefficient > 0:
            raise ValueError("diffusion coefficient must be positive")
        found = classify(self.zeta, self.beta)
        if found is not regime:
            raise ValueError(
                f"orders zeta={self.zeta}, beta={self.beta} describe {found.value}-diffusion, "
                f"not {regime.value}"
            )
        object.__setattr__(self, "space", StaircaseMap(self.zeta, self.convention))
        object.__setattr__(self, "clock_map", StaircaseMap(self.beta, self.convention))

    @property
    def physical_time(self) -> bool:
        return self.beta == 1

    @property
    def bound_exponent(self) -> float:
        """Exponent of the upper-bound law ``<x^2> ~ t**(beta/zeta)``."""
        return self.beta / self.zeta

    def clock(self, t):
        """Operational time ``tau``: ``t`` itself or the time staircase."""
        if self.physical_time:
            return t
        return self.clock_map(t)


def _check_time(t) -> None:
    if np.any(np.asarray(t) <= 0):
        raise ValueError("propagators are evaluated for t > 0 only")


def propagator(params: DiffusionParams, x, t, bound: bool = False):
    """Density ``W(x, t)`` with respect to ``dS``.

    With ``bound=True`` the staircases are replaced by their power-law upper
    bounds (``S(x) -> |x|**zeta``, ``S(t) -> t**beta``), giving the
    non-Gaussian x-coordinate forms.
    """
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if bound:
        tau = t if params.physical_time else t**params.beta
        u2 = np.abs(x) ** (2 * params.zeta)
    else:
        tau = np.asarray(params.clock(t), dtype=float)
        u2 = np.asarray(params.space(x), dtype=float) ** 2
    out = _kernel(u2, tau, params.coefficient)
    return float(out) if out.ndim == 0 else out


def _kernel(u2, tau, c):
    return np.exp(-u2 / (4 * c * tau)) / np.sqrt(4 * np.pi * c * tau)


def _density_in_u(params: DiffusionParams, t: float):
    """``W`` as a function of the standardised coordinate ``v = u / scale``.

    Each evaluation maps ``u`` back to a position and forward again, so the
    quadrature exercises the staircase pair rather than a bare Gaussian.
    """
    tau = float(params.clock(t))
    scale = math.sqrt(2 * params.coefficient * tau)
    inv, fwd = params.space.inverse, params.space

    def density(v):
        u = fwd(inv(v * scale))
        return float(_kernel(u * u, tau, params.coefficient)) * scale

    return density, scale, tau


def _quad(func, what: str) -> float:
    value, err = integrate.quad(func, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400)
    if not np.isfinite(value) or err > 1e-8 * max(1.0, abs(value)):
        raise QuadratureError(f"{what}: quadrature did not converge (estimate {value}, error {err})")
    return float(value)


def normalization_check(params: DiffusionParams, t: float) -> float:
    """``integral of W dS`` over the extended line, by quadrature in ``u = S(x)``."""
    _check_time(t)
    density, _, _ = _density_in_u(params, t)
    return _quad(density, "normalisation")


@dataclass(frozen=True)
class MsdReport:
    t: float
    tau: float
    msd_S: float
    msd_S_stated: float
    msd_x: float
    msd_x_bound: float
    prefactor_ratio: float
    flags: tuple


def msd(params: DiffusionParams, t: float) -> MsdReport:
    """Second moments at time ``t``.

    ``msd_S`` and ``msd_x`` come from quadrature of the propagator and are the
    trusted values.  ``msd_S_stated`` (``4 c tau``) and ``msd_x_bound``
    (``4 c t**(beta/zeta)``) are the closed forms quoted with the propagators,
    carried for comparison.
    """
    _check_time(t)
    c = params.coefficient
    density, scale, tau = _density_in_u(params, t)
    inv = params.space.inverse
    m_s = _quad(lambda v: (v * scale) ** 2 * density(v), "<S(x)^2>")
    # inverse staircase jumps across every gap, so adaptive quadrature stalls;
    # a dense trapezoid rule over +-12 standard deviations is used instead
    v = np.linspace(-12.0, 12.0, X_MOMENT_POINTS)
    x = np.asarray(inv(v * scale))
    w = _kernel(np.asarray(params.space(x)) ** 2, tau, c) * scale
    m_x = float(integrate.trapezoid(x**2 * w, v))
    stated = STATED_MSD_PREFACTOR * c * tau
    bound = STATED_MSD_PREFACTOR * c * t**params.bound_exponent
    ratio = stated / m_s
    flags = []
    if abs(ratio - 1) > 1e-6:
        flags.append(
            f"stated <S(x)^2> = 4*c*tau = {stated:.6g} differs from the kernel's second "
            f"moment {m_s:.6g} (ratio {ratio:.6g})"
        )
    return MsdReport(float(t), tau, m_s, stated, m_x, bound, ratio, tuple(flags))


@dataclass(frozen=True)
class WalkConfig:
    """Monte Carlo settings.  Observation times default to ``n_times``
    log-spaced multiples of ``dt`` up to ``n_steps * dt``."""

    n_walkers: int = 10_000
    n_steps: int = 4096
    dt: float = 1.0 / 4096
    seed: int = 0
    n_times: int = 25
    times: tuple | None = None

    def __post_init__(self):
        if self.n_walkers < 1 or self.n_steps < 1:
            raise ValueError("need at least one walker and one step")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.times is not None:
            ts = np.asarray(self.times, dtype=float)
            if np.any(ts < self.dt * (1 - 1e-12)):
                raise ValueError(f"dt={self.dt:g} cannot resolve requested time {ts.min():g}")
            if np.any(ts > self.n_steps * self.dt * (1 + 1e-12)):
                raise ValueError("requested time beyond the simulated horizon")

    def observation_steps(self) -> np.ndarray:
        if self.times is not None:
            steps = np.rint(np.asarray(self.times, dtype=float) / self.dt).astype(int)
        else:
            steps = np.rint(np.geomspace(1, self.n_steps, self.n_times)).astype(int)
        return np.unique(np.clip(steps, 1, self.n_steps))


@dataclass(frozen=True)
class MsdSeries:
    times: np.ndarray
    msd_S: np.ndarray
    msd_x: np.ndarray
    fitted_exponent: float
    exponent_halfwidth: float
    bound_exponent: float


def fit_exponent(times, values) -> tuple[float, float]:
    """Least-squares slope on log-log axes and its 95% half-width."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < 3 or np.any(values <= 0):
        return math.nan, math.nan
    fit = stats.linregress(np.log(times), np.log(values))
    half = stats.t.ppf(0.975, len(times) - 2) * fit.stderr
    return float(fit.slope), float(half)


def walker_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trajectory ``index``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def simulate_walk(config: WalkConfig, params: DiffusionParams) -> MsdSeries:
    """Brownian motion in ``u = S(x)`` driven by the operational clock.

    Each step adds ``sqrt(2 c dtau) * N(0, 1)`` with ``dtau`` the clock
    increment over ``dt``; positions return to ``x`` through the generalised
    inverse staircase.  Trajectory ``i`` draws from ``walker_rng(seed, i)``.
    """
    steps = config.observation_steps()
    grid = np.arange(config.n_steps + 1) * config.dt
    tau = np.asarray(params.clock(grid), dtype=float)
    tau[0] = 0.0
    sigma = np.sqrt(2 * params.coefficient * np.diff(tau))
    u = np.empty((config.n_walkers, len(steps)))
    for i in range(config.n_walkers):
        z = walker_rng(config.seed, i).standard_normal(config.n_steps)
        path = np.cumsum(sigma * z)
        u[i] = path[steps - 1]
    x = np.asarray(params.space.inverse(u))
    times = steps * config.dt
    msd_s = np.mean(u**2, axis=0)
    msd_x = np.mean(x**2, axis=0)
    slope, half = fit_exponent(times, msd_x)
    return MsdSeries(times, msd_s, msd_x, slope, half, params.bound_exponent)
