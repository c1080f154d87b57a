import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airykit.airyfun import airy
from airykit.quadrature import (DomainMap, composite_rule, gauss_legendre, mapped_rule,
                                semi_infinite_rule)

from oracles import AI2_INT_0


def test_midpoint():
    r = gauss_legendre(1, 0.0, 2.0)
    assert np.allclose(r.nodes, [1.0]) and np.allclose(r.weights, [2.0])


def test_exactness_degree_three():
    r = gauss_legendre(2, 0.0, 1.0)
    assert abs(r.integrate(lambda x: x ** 2) - 1.0 / 3.0) <= 1e-15


def test_bad_arguments():
    with pytest.raises(ValueError):
        gauss_legendre(0, 0, 1)
    with pytest.raises(ValueError):
        gauss_legendre(3, 1, 1)
    with pytest.raises(ValueError):
        gauss_legendre(3, 0, math.inf)
    with pytest.raises(ValueError):
        semi_infinite_rule(0.0, 3)
    with pytest.raises(ValueError):
        DomainMap("bogus")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.floats(-50, 50), st.floats(0.01, 100))
def test_rule_invariants(n, a, w):
    b = a + w
    r = gauss_legendre(n, a, b)
    assert abs(r.weights.sum() - (b - a)) <= 1e-12 * max(1.0, b - a)
    assert np.all(np.diff(r.nodes) > 0)
    assert r.nodes[0] > a and r.nodes[-1] < b
    assert np.all(r.weights > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 79))
def test_polynomial_exactness(n, deg):
    if deg > 2 * n - 1:
        deg = 2 * n - 1
    r = gauss_legendre(n, -1.0, 1.0)
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert abs(r.integrate(lambda x: x ** deg) - exact) <= 1e-13


def test_integral_of_ai():
    r = semi_infinite_rule(0.0, 40)
    assert abs(r.integrate(lambda x: airy(x)[0]) - 1.0 / 3.0) <= 1e-10


def test_ai_squared_self_convergence():
    v = semi_infinite_rule(0.0, 80).integrate(lambda x: airy(x)[0] ** 2)
    ref = semi_infinite_rule(0.0, 800).integrate(lambda x: airy(x)[0] ** 2)
    assert abs(v - ref) <= 1e-10
    assert abs(v - AI2_INT_0) <= 1e-12


def test_window_shrinks_with_s():
    r0 = semi_infinite_rule(0.0, 20)
    r10 = semi_infinite_rule(10.0, 20)
    assert (r10.interval[1] - r10.interval[0]) < (r0.interval[1] - r0.interval[0])
    # the truncated Ai^2 tail is below 1e-14
    hi = r0.interval[1]
    assert airy(hi)[1] ** 2 - hi * airy(hi)[0] ** 2 < 1e-14


@pytest.mark.parametrize("kind", ["rational", "exponential"])
def test_map_kinds_agree(kind):
    a = semi_infinite_rule(0.0, 60, DomainMap("truncation")).integrate(lambda x: airy(x)[0])
    b = semi_infinite_rule(0.0, 60, DomainMap(kind)).integrate(lambda x: airy(x)[0])
    assert abs(a - b) <= 1e-9


def test_doubling_reduces_error():
    f = lambda x: np.exp(-x) * np.cos(3 * x)
    exact = (1 - math.exp(-4) * (math.cos(12) - 3 * math.sin(12))) / 10
    errs = [abs(gauss_legendre(n, 0, 4).integrate(f) - exact) for n in (4, 8, 16)]
    assert errs[1] <= errs[0] / 100 and errs[2] <= max(errs[1] / 100, 1e-12)


def test_mapped_rule_positive_weights():
    for kind in ("truncation", "rational", "exponential"):
        r = mapped_rule(30, -2.0, 5.0, kind)
        assert np.all(r.weights > 0) and np.all(np.isfinite(r.nodes))
        assert abs(r.integrate(lambda x: np.ones_like(x)) - 7.0) < 1e-12


def test_composite_rule():
    r = composite_rule(0.0, 3.0, 3, 10)
    assert len(r) == 30
    assert abs(r.integrate(np.sin) - (1 - math.cos(3))) < 1e-14


def test_concurrent_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("AIRYKIT_CACHE_DIR", str(tmp_path))
    out = {}

    def work(n):
        out[n] = gauss_legendre(n, 0, 1).weights.sum()

    ts = [threading.Thread(target=work, args=(n,)) for n in range(150, 170)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert all(abs(v - 1) < 1e-12 for v in out.values())
