"""The two worked functions with fractal support.

``sine_on_triadic``: ``sin(2 pi Gamma(1 + zeta) S(x))`` on the triadic set,
order 0.63.  ``square_on_five_adic``: ``S(x)**2`` on the middle-1/5 set, order
0.86.  Both orders are the rounded values quoted with the examples; they fix
the total mass through the normalisation convention.
"""

from __future__ import annotations

import math
import numpy as np

from .cantor_set import CantorParams, build_prefractal
from .fractal_calculus import ConjugateFunction
from .mass_staircase import Convention, StaircaseEvaluator

TRIADIC_ORDER = 0.63
FIVE_ADIC_ORDER = 0.86
#: Reported value of the second example's integral.
FIVE_ADIC_INTEGRAL = 0.2846


def sine_on_triadic(
    convention: Convention = Convention.INVERSE_GAMMA, depth: int = 12, zeta: float = TRIADIC_ORDER
) -> ConjugateFunction:
    ev = StaircaseEvaluator(CantorParams(1 / 3), zeta, convention)
    k = 2 * math.pi * math.gamma(1 + zeta)
    return ConjugateFunction(
        g=lambda u: np.sin(k * np.asarray(u)),
        evaluator=ev,
        support=build_prefractal(CantorParams(1 / 3, depth=depth)),
        derivative=lambda u: k * np.cos(k * np.asarray(u)),
        antiderivative=lambda u: -np.cos(k * np.asarray(u)) / k,
    )


def square_on_five_adic(
    convention: Convention = Convention.INVERSE_GAMMA, depth: int = 12, zeta: float = FIVE_ADIC_ORDER
) -> ConjugateFunction:
    ev = StaircaseEvaluator(CantorParams(0.2), zeta, convention)
    return ConjugateFunction(
        g=lambda u: np.asarray(u) ** 2,
        evaluator=ev,
        support=build_prefractal(CantorParams(0.2, depth=depth)),
        derivative=lambda u: 2 * np.asarray(u),
        antiderivative=lambda u: np.asarray(u) ** 3 / 3,
    )


EXAMPLES = {"ex1": sine_on_triadic, "ex2": square_on_five_adic}
