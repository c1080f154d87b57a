import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airykit import airyfun
from airykit.airyfun import ai, ai_prime, airy, airy_scaled, airy_value, log_ai

from oracles import AI_0, AIP_0, AIRY, CONV_00


def test_values_at_zero():
    assert abs(ai(0.0) - AI_0) < 1e-14
    assert abs(ai(0.0) - 0.3550280538878172) < 1e-14
    assert abs(ai_prime(0.0) - AIP_0) < 1e-14
    assert abs(ai_prime(0.0) + 0.2588194037928068) < 1e-14


@pytest.mark.parametrize("x", sorted(AIRY))
def test_against_mpmath_table(x):
    a, d = airy(x)
    ra, rd = AIRY[x]
    # absolute 1e-12, and relative accuracy on the decaying side
    assert abs(a - ra) <= 1e-12 + 1e-12 * abs(ra)
    assert abs(d - rd) <= 1e-12 * max(1.0, abs(x)) + 1e-12 * abs(rd)
    if x > 0:
        assert abs(a / ra - 1) < 1e-12


def test_decay_bound():
    x = np.arange(1.0, 30.0, 0.25)
    assert np.all(np.abs(airy(x)[0]) <= np.exp(-2.0 / 3.0 * x ** 1.5))
    assert abs(ai(5.0)) <= math.exp(-2.0 / 3.0 * 5 ** 1.5)


def test_monotone_decay_beyond_one():
    a = airy(np.linspace(1, 40, 400))[0]
    assert np.all(np.diff(a) < 0)


@pytest.mark.parametrize("x", np.arange(-10.0, 10.01, 0.5))
def test_ode_residual(x):
    h = 1e-4
    d2 = (ai(x + h) - 2 * ai(x) + ai(x - h)) / h ** 2
    assert abs(d2 - x * ai(x)) <= 1e-6


def test_derivative_consistency():
    h = 1e-4
    assert abs((ai(1 + h) - ai(1 - h)) / (2 * h) - ai_prime(1.0)) <= 1e-6


@pytest.mark.parametrize("a", [-1.0, 0.0, 1.0])
@pytest.mark.parametrize("b", [-1.0, 0.0, 1.0])
def test_convolution_identity(a, b):
    from airykit.quadrature import gauss_legendre
    r = gauss_legendre(400, -40.0, 40.0)
    v = r.integrate(lambda x: airy(a + x)[0] * airy(b - x)[0])
    c = 2 ** (-1 / 3)
    assert abs(v - c * ai(c * (a + b))) <= 1e-8
    if a == b == 0:
        assert abs(v - CONV_00) <= 1e-8


def test_scaled_variant_large_x():
    a, d = airy_scaled(150.0)
    assert 0 < a < 1 and np.isfinite(d)
    assert abs(log_ai(150.0) - (math.log(a) - 2.0 / 3.0 * 150 ** 1.5)) < 1e-12
    assert ai(250.0) == 0.0


def test_domain_errors():
    with pytest.raises(ValueError):
        ai(float("nan"))
    with pytest.raises(ValueError):
        ai(-250.0)


def test_error_estimate_contract():
    for x in np.linspace(-30, 30, 61):
        assert airy_value(x).est_abs_err <= 1e-12


@pytest.mark.skipif(not airyfun.HAVE_CORE, reason="compiled core not built")
def test_backends_agree():
    x = np.linspace(-60, 60, 2001)
    a1, d1 = airy(x, backend="core")
    a2, d2 = airy(x, backend="numpy")
    assert np.max(np.abs(a1 - a2)) < 1e-14
    assert np.max(np.abs(d1 - d2) / np.maximum(1, np.abs(x))) < 1e-14


@settings(max_examples=60, deadline=None)
@given(st.floats(-25, 25))
def test_wronskian_with_scipy_bi(x):
    # Ai Bi' - Ai' Bi = 1/pi; Bi taken from scipy as an independent function
    import scipy.special as sp
    a, d = airy(x)
    _, _, bi, bip = sp.airy(x)
    w = a * bip - d * bi
    assert abs(w - 1 / math.pi) <= 1e-10 * max(1.0, abs(bi) * abs(x) + abs(bip))


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20))
def test_matches_scipy(x):
    import scipy.special as sp
    a, d = airy(x)
    ra, rd, _, _ = sp.airy(x)
    assert abs(a - ra) <= 1e-11 * max(1.0, abs(x))
    assert abs(d - rd) <= 1e-11 * max(1.0, abs(x)) ** 1.5
