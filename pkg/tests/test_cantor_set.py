import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cantorcalc.cantor_set import (
    CantorParams,
    DegenerateConstructionError,
    Mode,
    build_prefractal,
    build_prefractal_exact,
    contains,
    flag,
    hausdorff_dimension,
    lebesgue_measure,
    locate,
    write_intervals_csv,
    xi_for_dimension,
)

xis = st.floats(min_value=0.01, max_value=0.95)


def test_first_step_triadic():
    pf = build_prefractal(CantorParams(1 / 3, depth=1))
    np.testing.assert_allclose(pf.intervals, [[0, 1 / 3], [2 / 3, 1]], atol=1e-15)


@pytest.mark.parametrize("mode", list(Mode))
def test_depth_zero_is_unit_interval(mode):
    pf = build_prefractal(CantorParams(0.5, mode, 0))
    assert pf.intervals.tolist() == [[0.0, 1.0]]


def test_literal_second_step_follows_length_rule():
    # step 1 removes 1/5, step 2 removes (1/5)^2 from each half
    pf = build_prefractal(CantorParams(0.2, Mode.LITERAL, 2))
    first = (1 - 0.2 - 2 * 0.2**2) / 4
    assert pf.rights[0] == pytest.approx(first, abs=1e-15)
    np.testing.assert_allclose(pf.intervals, [[0, 0.18], [0.22, 0.4], [0.6, 0.78], [0.82, 1]], atol=1e-15)
    assert lebesgue_measure(pf) == pytest.approx(0.72, abs=1e-15)


def test_literal_degenerate_raises():
    with pytest.raises(DegenerateConstructionError):
        build_prefractal(CantorParams(0.6, Mode.LITERAL, 3))


@pytest.mark.parametrize("bad", [0, 1, -0.1, 1.5])
def test_invalid_xi(bad):
    with pytest.raises(ValueError):
        CantorParams(bad)


def test_invalid_depth():
    with pytest.raises(ValueError):
        CantorParams(0.3, depth=-1)
    with pytest.raises(ValueError):
        CantorParams(0.3, depth=60)


def test_flag_examples():
    pf = build_prefractal(CantorParams(1 / 3, depth=1))
    assert flag(pf, 0.4, 0.6) == 0
    assert flag(pf, 0.3, 0.5) == 1
    assert flag(pf, 0.0, 1.0) == 1
    np.testing.assert_array_equal(flag(pf, [0.4, 0.3], [0.6, 0.5]), [0, 1])


def test_flag_interior():
    pf = build_prefractal(CantorParams(1 / 3, depth=1))
    assert flag(pf, 1 / 3, 2 / 3) == 1
    assert flag(pf, 1 / 3, 2 / 3, interior=True) == 0
    assert flag(pf, 0.3, 0.5, interior=True) == 1


def test_contains_and_locate():
    pf = build_prefractal(CantorParams(1 / 3, depth=2))
    assert contains(pf, 1 / 9) and contains(pf, 0.0)
    assert not contains(pf, 0.5)
    assert locate(pf, 0.5) == -1
    assert locate(pf, 0.99) == 3


@pytest.mark.parametrize(
    "xi, expected",
    [(1 / 3, 0.6309297535714574), (1 / 5, 0.7564707973660301), (0.5, 0.5)],
)
def test_hausdorff_values(xi, expected):
    assert hausdorff_dimension(xi) == pytest.approx(expected, abs=1e-12)


def test_hausdorff_limits():
    assert 1 - 1e-6 < hausdorff_dimension(1e-8) < 1
    assert hausdorff_dimension(0.999) < 0.1


@given(xis, xis)
def test_dimension_decreases_with_xi(a, b):
    if a < b:
        assert hausdorff_dimension(a) > hausdorff_dimension(b)


@given(st.floats(min_value=0.05, max_value=0.99))
def test_xi_for_dimension_inverts(d):
    assert hausdorff_dimension(xi_for_dimension(d)) == pytest.approx(d, rel=1e-10)


@pytest.mark.parametrize("xi, k, expected", [(0.5, 2, 0.25), (1 / 3, 4, (2 / 3) ** 4)])
def test_measure_examples(xi, k, expected):
    assert lebesgue_measure(build_prefractal(CantorParams(xi, depth=k))) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(xis, st.integers(min_value=0, max_value=12))
def test_structure(xi, k):
    assume(((1 - xi) / 2) ** k > 1e-13)
    pf = build_prefractal(CantorParams(xi, depth=k))
    assert len(pf) == 2**k
    ends = pf.endpoints
    assert np.all(np.diff(ends) > 0)
    assert ends[0] == 0 and ends[-1] == 1
    # symmetry about 1/2
    np.testing.assert_allclose(pf.lefts, 1 - pf.rights[::-1], atol=1e-14)
    assert lebesgue_measure(pf) == pytest.approx((1 - xi) ** k, rel=1e-10)
    if k:
        # nesting: each child interval sits inside its parent
        parent = build_prefractal(CantorParams(xi, depth=k - 1))
        assert np.all(pf.lefts >= np.repeat(parent.lefts, 2) - 1e-15)
        assert np.all(pf.rights <= np.repeat(parent.rights, 2) + 1e-15)
        coarse = pf.coarsen(k - 1)
        np.testing.assert_allclose(coarse.intervals, parent.intervals, atol=1e-14)


def test_modes_coincide_for_triadic_only():
    a = build_prefractal(CantorParams(1 / 3, Mode.PROPORTIONAL, 5))
    b = build_prefractal(CantorParams(1 / 3, Mode.LITERAL, 5))
    np.testing.assert_allclose(a.intervals, b.intervals, atol=1e-14)
    c = build_prefractal(CantorParams(0.2, Mode.PROPORTIONAL, 2))
    d = build_prefractal(CantorParams(0.2, Mode.LITERAL, 2))
    assert not np.allclose(c.intervals, d.intervals)


@pytest.mark.parametrize("mode", list(Mode))
def test_matches_exact_rationals(mode):
    xi = Fraction(1, 5)
    exact = build_prefractal_exact(CantorParams(xi, mode, 6))
    pf = build_prefractal(CantorParams(float(xi), mode, 6))
    want = np.array([[float(a), float(b)] for a, b in exact])
    np.testing.assert_allclose(pf.intervals, want, atol=1e-15)


def test_interval_csv(tmp_path):
    sets = [build_prefractal(CantorParams(1 / 3, depth=k)) for k in range(3)]
    path = tmp_path / "i.csv"
    write_intervals_csv(path, sets)
    lines = path.read_text().splitlines()
    assert lines[0] == "depth,index,left,right"
    assert len(lines) == 1 + 1 + 2 + 4
    assert math.isclose(float(lines[-1].split(",")[3]), 1.0)
