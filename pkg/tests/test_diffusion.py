import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from cantorcalc.cantor_set import hausdorff_dimension
from cantorcalc.diffusion import (
    DiffusionParams,
    Regime,
    StaircaseMap,
    WalkConfig,
    classify,
    fit_exponent,
    msd,
    normalization_check,
    propagator,
    simulate_walk,
    walker_rng,
)
from cantorcalc.mass_staircase import Convention

D3 = hausdorff_dimension(1 / 3)
orders = st.floats(min_value=1e-3, max_value=1.0)


@pytest.mark.parametrize(
    "zeta, beta, regime",
    [(0.86, 0.9, Regime.SUPER), (0.86, 0.86, Regime.NORMAL), (0.86, 0.6, Regime.SUB), (0.5, 0.5 + 1e-13, Regime.NORMAL)],
)
def test_classify_examples(zeta, beta, regime):
    assert classify(zeta, beta) is regime


@pytest.mark.parametrize("bad", [(0.0, 0.5), (0.5, 1.2), (-1, 0.5)])
def test_classify_domain(bad):
    with pytest.raises(ValueError):
        classify(*bad)


@settings(max_examples=1000)
@given(orders, orders)
def test_classifier_matches_exponent(zeta, beta):
    regime = classify(zeta, beta)
    if abs(zeta - beta) > 1e-12:
        assert (regime is Regime.SUPER) == (beta / zeta > 1)
        assert (regime is Regime.SUB) == (beta / zeta < 1)


def test_params_defaults_and_validation():
    assert DiffusionParams(Regime.SUPER, D3).beta == 1.0
    assert DiffusionParams("normal", 0.7).beta == 0.7
    with pytest.raises(ValueError):
        DiffusionParams(Regime.SUB, 0.86)
    with pytest.raises(ValueError):
        DiffusionParams(Regime.SUB, 0.86, 0.9)
    with pytest.raises(ValueError):
        DiffusionParams(Regime.SUPER, D3, coefficient=0.0)


def test_super_propagator_examples():
    p = DiffusionParams(Regime.SUPER, D3, coefficient=1.0)
    for t in (0.1, 1.0, 3.0):
        assert propagator(p, 0.0, t) == pytest.approx(t**-0.5 / math.sqrt(4 * math.pi))
    x1 = p.space.inverse(1.0)
    assert p.space(x1) == pytest.approx(1.0, abs=1e-9)
    assert propagator(p, x1, 1.0) == pytest.approx(math.exp(-0.25) / math.sqrt(4 * math.pi), rel=1e-8)


def test_propagator_rejects_nonpositive_time():
    p = DiffusionParams(Regime.SUPER, D3)
    with pytest.raises(ValueError):
        propagator(p, 0.1, 0.0)
    with pytest.raises(ValueError):
        msd(p, -1.0)


def test_sub_with_equal_orders_is_normal():
    # sub-diffusion cannot be constructed with beta == zeta, so the
    # degenerate case is the normal clock of order zeta
    normal = DiffusionParams(Regime.NORMAL, 0.86, coefficient=0.7)
    sub_like = DiffusionParams(Regime.NORMAL, 0.86, 0.86, coefficient=0.7)
    x = np.linspace(-2, 2, 41)
    for t in (0.05, 0.5, 2.0):
        np.testing.assert_array_equal(propagator(normal, x, t), propagator(sub_like, x, t))
    # and a sub clock approaching zeta converges to it
    near = DiffusionParams(Regime.SUB, 0.86, 0.86 - 1e-9, coefficient=0.7)
    np.testing.assert_allclose(propagator(near, x, 0.5), propagator(normal, x, 0.5), rtol=1e-6)


def test_heat_kernel_degeneracy():
    p = DiffusionParams(Regime.NORMAL, 1.0, convention=Convention.UNIT, coefficient=0.3)
    x = np.linspace(-3, 3, 61)
    for t in (0.1, 1.0):
        heat = np.exp(-(x**2) / (4 * 0.3 * t)) / np.sqrt(4 * np.pi * 0.3 * t)
        np.testing.assert_allclose(propagator(p, x, t), heat, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-4, max_value=4), st.floats(min_value=0.01, max_value=5))
def test_symmetric_and_positive(x, t):
    p = DiffusionParams(Regime.SUB, 0.86, 0.6)
    a, b = propagator(p, x, t), propagator(p, -x, t)
    assert a > 0
    assert a == pytest.approx(b, rel=1e-8)


def test_semigroup_in_u():
    p = DiffusionParams(Regime.SUPER, D3, coefficient=0.5)
    inv = p.space.inverse
    t1, t2 = 0.3, 0.5

    def conv(u):
        return integrate.quad(lambda s: propagator(p, inv(s), t1) * propagator(p, inv(u - s), t2), -30, 30, limit=200)[0]

    for u in (0.0, 0.4, -1.1, 2.0):
        direct = propagator(p, inv(u), t1 + t2)
        assert conv(u) == pytest.approx(direct, abs=1e-4)


@pytest.mark.parametrize(
    "params, t",
    [
        (DiffusionParams(Regime.SUPER, D3, coefficient=1.0), 1.0),
        (DiffusionParams(Regime.NORMAL, 0.86, coefficient=2.0), 0.5),
        (DiffusionParams(Regime.SUB, 0.86, 0.6, coefficient=0.3), 2.0),
    ],
)
def test_normalization(params, t):
    assert normalization_check(params, t) == pytest.approx(1.0, abs=1e-6)


def test_msd_super_prefactor():
    r = msd(DiffusionParams(Regime.SUPER, D3, coefficient=1.0), 1.0)
    assert r.msd_S == pytest.approx(2.0, abs=1e-6)
    assert r.msd_S_stated == pytest.approx(4.0)
    assert r.prefactor_ratio == pytest.approx(2.0, abs=1e-6)
    assert r.flags


def test_msd_bound_laws():
    normal = DiffusionParams(Regime.NORMAL, 0.86)
    vals = [msd(normal, t).msd_x_bound / t for t in (1, 2, 4, 8)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)
    sub = DiffusionParams(Regime.SUB, 0.8, 0.4)
    assert msd(sub, 4.0).msd_x_bound / msd(sub, 1.0).msd_x_bound == pytest.approx(2.0)


def test_msd_x_is_finite_and_positive():
    r = msd(DiffusionParams(Regime.SUB, 0.86, 0.6), 0.5)
    assert 0 < r.msd_x < np.inf


def test_staircase_map_identity_for_order_one():
    m = StaircaseMap(1.0, Convention.UNIT)
    assert m(0.37) == 0.37 and m.inverse(-2.5) == -2.5


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(n_walkers=0)
    with pytest.raises(ValueError):
        WalkConfig(dt=0.0)
    with pytest.raises(ValueError):
        WalkConfig(dt=0.1, n_steps=10, times=(0.01,))
    with pytest.raises(ValueError):
        WalkConfig(dt=0.1, n_steps=10, times=(5.0,))
    steps = WalkConfig(n_steps=100, n_times=10).observation_steps()
    assert steps[0] == 1 and steps[-1] == 100 and np.all(np.diff(steps) > 0)


def test_walker_streams_independent_and_reproducible():
    a = walker_rng(3, 0).standard_normal(5)
    b = walker_rng(3, 0).standard_normal(5)
    c = walker_rng(3, 1).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_walk_deterministic_per_seed():
    p = DiffusionParams(Regime.SUPER, D3, coefficient=1e-3)
    cfg = WalkConfig(n_walkers=50, n_steps=256, dt=1 / 256, seed=11)
    s1 = simulate_walk(cfg, p)
    s2 = simulate_walk(cfg, p)
    np.testing.assert_array_equal(s1.msd_x, s2.msd_x)
    assert np.all(s1.msd_S >= 0) and np.all(s1.msd_x >= 0)
    other = simulate_walk(WalkConfig(n_walkers=50, n_steps=256, dt=1 / 256, seed=12), p)
    assert not np.array_equal(s1.msd_x, other.msd_x)


def test_single_walker_smoke():
    p = DiffusionParams(Regime.NORMAL, 0.86)
    s = simulate_walk(WalkConfig(n_walkers=1, n_steps=64, dt=1 / 64), p)
    assert np.all(np.isfinite(s.msd_x)) and np.all(np.isfinite(s.msd_S))


def test_walk_msd_s_tracks_kernel():
    # in u the walk is exact Brownian motion, so <u^2> = 2 c tau
    p = DiffusionParams(Regime.SUB, 0.86, 0.6, coefficient=1e-3)
    s = simulate_walk(WalkConfig(n_walkers=4000, n_steps=512, dt=1 / 512, seed=2), p)
    tau = np.asarray(p.clock(s.times))
    np.testing.assert_allclose(s.msd_S, 2e-3 * tau, rtol=0.1)


def test_fit_exponent_on_power_law():
    t = np.geomspace(0.01, 1, 20)
    slope, half = fit_exponent(t, 3 * t**1.7)
    assert slope == pytest.approx(1.7) and half < 1e-6
    assert math.isnan(fit_exponent(t[:2], t[:2])[0])
