import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from gram2x2.core import PartialProfile
from gram2x2.errors import DegenerateParameters, DomainError
from gram2x2.specfun import (
    exp_scaled_sinhc_sqrt,
    expint_ei,
    expint_ei_scaled,
    g_func,
    sinhc_sqrt,
)


def test_sinhc_sqrt_examples():
    assert sinhc_sqrt(0.0) == 1.0
    assert sinhc_sqrt(4.0) == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-15)
    assert sinhc_sqrt(4.0) == pytest.approx(1.8134302039235093, rel=1e-15)
    assert abs(sinhc_sqrt(-math.pi ** 2)) < 1e-16


def test_sinhc_sqrt_matches_series_near_zero():
    for z in np.linspace(-1.0, 1.0, 41):
        series = sum(z ** k / math.factorial(2 * k + 1) for k in range(30))
        assert sinhc_sqrt(z) == pytest.approx(series, rel=1e-15)


def test_sinhc_sqrt_matches_high_precision():
    mp.mp.dps = 40
    for z in np.logspace(0, 4, 50):
        ref = mp.sinh(mp.sqrt(z)) / mp.sqrt(z)
        assert sinhc_sqrt(z) == pytest.approx(float(ref), rel=1e-13)


def test_sinhc_sqrt_continuous_at_zero():
    assert abs(sinhc_sqrt(1e-12) - sinhc_sqrt(-1e-12)) <= 1e-12
    assert abs(sinhc_sqrt(0.25) - sinhc_sqrt(0.25 + 1e-15)) < 1e-14
    assert abs(sinhc_sqrt(-0.25) - sinhc_sqrt(-0.25 - 1e-15)) < 1e-14


def test_sinhc_sqrt_vectorized():
    z = np.array([-4.0, 0.0, 0.1, 4.0])
    out = sinhc_sqrt(z)
    assert out.shape == (4,)
    assert out[1] == 1.0


def test_exp_scaled_examples():
    assert exp_scaled_sinhc_sqrt(0.0, 0.0) == 1.0
    assert exp_scaled_sinhc_sqrt(700.0, 490000.0) == pytest.approx(1.0 / 1400.0, rel=1e-14)
    assert exp_scaled_sinhc_sqrt(10.0, 4.0) == pytest.approx(8.2335e-5, rel=1e-4)
    assert exp_scaled_sinhc_sqrt(10.0, 4.0) == pytest.approx(
        math.exp(-10.0) * 1.8134302039235093, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-1e4, 1e4))
def test_exp_scaled_matches_product(alpha, z):
    assert exp_scaled_sinhc_sqrt(alpha, z) == pytest.approx(
        math.exp(-alpha) * sinhc_sqrt(z), rel=1e-12, abs=1e-300)


def test_ei_matches_reference_fixture(ei_reference):
    assert len(ei_reference) >= 20
    for x, ref in ei_reference:
        assert expint_ei(x) == pytest.approx(ref, rel=1e-13), x


def test_ei_examples():
    assert expint_ei(-1.0) == pytest.approx(-0.21938393440, abs=1e-11)
    assert expint_ei(1.0) == pytest.approx(1.89511781636, abs=1e-11)


def test_ei_reflection_to_e1():
    xs = np.logspace(-6, 2, 25)
    ours = expint_ei(-xs)
    assert np.all(ours < 0)
    np.testing.assert_allclose(ours, -special.exp1(xs), rtol=1e-13)


def test_ei_vectorized_agrees_with_scalar():
    xs = np.array([-50.0, -2.0, -0.3, 0.3, 2.0, 45.0, 600.0])
    np.testing.assert_array_equal(expint_ei(xs), [expint_ei(x) for x in xs])


def test_ei_scaled_avoids_overflow():
    # exp(-800) * Ei(900) = exp(100) / 900 * (1 + O(1/900))
    val = expint_ei_scaled(900.0, -800.0)
    assert math.isfinite(val)
    assert val == pytest.approx(float(mp.exp(-800) * mp.ei(900)), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, math.inf, math.nan])
def test_ei_domain(x):
    with pytest.raises(DomainError):
        expint_ei(x)


def test_g_func_example():
    pp = PartialProfile(0.5, 1.5, 1.0)
    expected = expint_ei(1.0 / 3.0) - expint_ei(-1.0)
    assert g_func(1.0, pp) == pytest.approx(expected, rel=1e-14)
    # Ei(1/3) is negative (the root of Ei sits near 0.3725)
    assert g_func(1.0, pp) == pytest.approx(
        special.expi(1.0 / 3.0) - special.expi(-1.0), rel=1e-13)
    assert g_func(1.0, pp) == pytest.approx(0.0612918254, abs=1e-10)


def test_g_func_small_x_limit():
    pp = PartialProfile(0.5, 1.5, 1.0)
    c2, c1 = 1.0 - 1.0 / 1.5, 1.0 - 2.0
    assert g_func(1e-10, pp) == pytest.approx(math.log(abs(c2 / c1)), abs=1e-9)


def test_g_func_antisymmetric_in_phi1_phi2():
    # swapping phi1 and phi2 swaps the two Ei terms
    from gram2x2 import specfun

    a = g_func(0.7, PartialProfile(0.5, 1.5, 1.0))
    c2, c1 = 1.0 - 1.0 / 0.5, 1.0 - 1.0 / 1.5
    swapped = specfun.expint_ei(c2 * 0.7) - specfun.expint_ei(c1 * 0.7)
    assert swapped == pytest.approx(-a, rel=1e-14)


def test_g_func_degenerate():
    with pytest.raises(DegenerateParameters):
        g_func(1.0, PartialProfile(0.5, 1.5, 1.5))
    with pytest.raises(DegenerateParameters):
        g_func(1.0, PartialProfile(0.5, 1.5, 0.5 * (1 + 1e-12)))
    g_func(1.0, PartialProfile(0.5, 1.5, 1.5 * (1 + 1e-7)))
