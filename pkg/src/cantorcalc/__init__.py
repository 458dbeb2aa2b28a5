"""Fractal calculus on middle-xi Cantor sets and diffusion on them."""

__version__ = "0.1.0"

from .cantor_set import (  # noqa: F401
    CantorParams,
    Mode,
    PreFractal,
    build_prefractal,
    flag,
    hausdorff_dimension,
    lebesgue_measure,
)
from .diffusion import DiffusionParams, Regime, WalkConfig, classify, msd, propagator, simulate_walk  # noqa: F401
from .fractal_calculus import ConjugateFunction, GridFunction, f_derivative, f_integral  # noqa: F401
from .mass_staircase import (  # noqa: F401
    Convention,
    StaircaseEvaluator,
    staircase,
    staircase_inverse,
    varsigma_dimension,
)
