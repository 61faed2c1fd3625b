from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higgs_verlinde.tseries import (
    NonUnitSeriesError,
    OrderMismatchError,
    TruncatedSeries,
    add,
    eval_at,
    invert,
    mul,
)


def S(terms, order=8):
    return TruncatedSeries.from_poly(terms, order)


def test_additive_inverse():
    assert add(S({0: 1}), S({0: -1})).is_zero()
    assert add(S({0: 1, 1: 1}), S({0: 1, 1: -1})) == S({0: 2})


def test_telescoping_product():
    n = 10
    geo = TruncatedSeries([1] * (n + 1), n)
    assert mul(TruncatedSeries([1, -1], n), geo) == TruncatedSeries.constant(1, n)


def test_products():
    assert mul(S({0: 1, 1: -1}), S({0: 1, 1: 1})) == S({0: 1, 2: -1})
    got = mul(S({0: 1, 3: -1}, 12), S({0: 1, 5: -1}, 12))
    assert got == S({0: 1, 3: -1, 5: -1, 8: 1}, 12)


def test_order_mismatch():
    with pytest.raises(OrderMismatchError):
        add(S({0: 1}, 3), S({0: 1}, 4))
    with pytest.raises(OrderMismatchError):
        mul(S({0: 1}, 3), S({0: 1}, 4))
    with pytest.raises(OrderMismatchError):
        S({0: 1}, 3) * S({0: 1}, 4)


def test_invert_examples():
    assert invert(S({0: 1, 2: -1}, 4)) == S({0: 1, 2: 1, 4: 1}, 4)
    assert invert(S({0: 1, 1: -1}, 3)) == TruncatedSeries([1, 1, 1, 1], 3)
    a = mul(S({0: 1, 1: -1}, 3), S({0: 1, 2: -1}, 3))
    assert invert(a) == TruncatedSeries([1, 1, 2, 2], 3)


def test_invert_non_unit():
    with pytest.raises(NonUnitSeriesError, match="non-unit series"):
        invert(S({1: 1}))


def test_eval_at():
    v, tail = eval_at(S({0: 1, 3: -1}), "0.1")
    assert abs(v - mpmath.mpf("0.999")) < 1e-15
    geo = TruncatedSeries([1] * 21, 20)
    v, tail = eval_at(geo, 0.5, growth_bound=2)
    assert abs(v - (2 - mpmath.mpf(2) ** -20)) < 1e-14
    assert tail == mpmath.mpf(2) ** -21 * 2
    two = S({0: 2}, 20) / S({0: 1, 2: -1}, 20)
    v, tail = eval_at(two, 0.1, growth_bound=2)
    assert abs(v - 2 / mpmath.mpf("0.99")) <= tail + 1e-15


def test_eval_guard():
    with pytest.raises(ValueError, match="outside convergence guard"):
        eval_at(S({0: 1}), 1)
    with pytest.raises(ValueError):
        eval_at(S({0: 1}), -0.1)


def test_json_round_trip():
    s = S({0: Fraction(1, 3), 2: -7, 5: Fraction(22, 7)})
    data = s.to_json()
    assert data[0] == "1/3" and data[2] == "-7/1"
    assert TruncatedSeries.from_json(data) == s


def test_pretty_and_shift():
    s = S({0: 1, 1: -2, 3: Fraction(1, 2)}, 4)
    assert s.pretty() == "1 - 2*t + 1/2*t^3"
    assert s.shift(2) == S({2: 1, 3: -2}, 4)
    assert S({}, 3).pretty() == "0"


def test_rejects_floats():
    with pytest.raises(TypeError):
        TruncatedSeries([0.5])


coeff = st.fractions(min_value=-20, max_value=20, max_denominator=12)
series = st.lists(coeff, min_size=6, max_size=6).map(lambda cs: TruncatedSeries(cs, 5))
units = series.filter(lambda s: s[0] != 0)


@settings(max_examples=60, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) - b == a


@settings(max_examples=60, deadline=None)
@given(units)
def test_invert_two_sided(a):
    one = TruncatedSeries.constant(1, 5)
    assert a * invert(a) == one
    assert invert(a) * a == one
    assert a ** -2 * a ** 2 == one


@settings(max_examples=30, deadline=None)
@given(series, series)
def test_eval_is_multiplicative(a, b):
    t0 = mpmath.mpf("0.2")
    va, _ = eval_at(a, t0)
    vb, _ = eval_at(b, t0)
    vab, _ = eval_at(a * b, t0)
    # terms dropped from a*b are t^6 and above with coefficients bounded by 6 * 20 * 20
    bound = 6 * 400 * t0 ** 6 / (1 - t0)
    assert abs(va * vb - vab) <= bound
