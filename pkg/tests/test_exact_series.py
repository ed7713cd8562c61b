import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mixedpowers.exact_series import (
    BigCoefficient,
    RationalPoly,
    _kronecker,
    _schoolbook,
    binomial,
    coeff_of_product,
    poly_mul,
    poly_pow,
)

from conftest import poly_coeffs_brute

P = RationalPoly


def test_mul_small_cases():
    assert poly_mul(P((1, 1)), P((1, 2))) == P((1, 3, 2))
    assert poly_mul(P((1, 1)), P(())).is_zero
    assert poly_mul(P((1, 2, 1)), P((1, 2)), truncate_at=2) == P((1, 4, 5))


def test_pow_small_cases():
    assert poly_pow(P((1, 1)), 0, 5) == P((1,))
    assert poly_pow(P((1, 1)), 4, 4) == P((1, 4, 6, 4, 1))
    assert poly_pow(P((1, -1)), 3, 1) == P((1, -3))


def test_coefficient_examples():
    assert coeff_of_product(2, [(P((1, 1)), 2), (P((1, 2)), 1)]).value == 5
    assert coeff_of_product(3, [(P((1, 1)), 4), (P((1, 2)), 2)]).value == 44
    assert coeff_of_product(1, [(P((1, 1)), 9), (P((1, -1)), 1), (P((1, -2)), 1)]).value == 6
    assert coeff_of_product(0, [(P((3, 1)), 2), (P((-2, 5)), 3)]).value == 9 * -8
    assert coeff_of_product(-1, [(P((1, 1)), 3)]).value == 0


def test_rational_coefficients():
    half = P((Fraction(1, 2), Fraction(1, 3)))
    # [z^1] (1/2 + z/3)^2 = 2 * 1/2 * 1/3
    assert coeff_of_product(1, [(half, 2)]).value == Fraction(1, 3)
    assert P.from_json(["1", "-3", "2/5"]).coeffs == (1, -3, Fraction(2, 5))
    assert P.from_json(["1", "-3", "2/5"]).to_json() == ["1", "-3", "2/5"]


def test_binomial():
    assert binomial(4, 2).value == 6
    assert binomial(7, -1).value == 0
    assert binomial(3, 5).value == 0
    assert binomial(100, 50).value == 100891344545564193334812497256


def test_big_coefficient_logs():
    b = BigCoefficient(-(10 ** 400))
    assert b.sign == -1
    assert float(b.log_abs) == pytest.approx(400 * math.log(10), rel=1e-15)
    assert b.to_json()["value"] == "-1" + "0" * 400
    with pytest.raises(ValueError):
        BigCoefficient(0).log_abs


def test_poly_helpers():
    f = P((0, 0, 3, 0, 5))
    assert f.valuation() == 2
    assert f.shift_down(2) == P((3, 0, 5))
    assert f.support_gcd() == 2
    assert f.derivative() == P((0, 6, 0, 20))
    assert f.degree == 4
    assert P((1, -1)).nonnegative is False


small_ints = st.lists(st.integers(-9, 9), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(small_ints, small_ints, st.integers(0, 12))
def test_kronecker_matches_schoolbook(a, b, trunc):
    def strip(v):
        v = list(v)
        while v and v[-1] == 0:
            v.pop()
        return v

    assert strip(_kronecker(a, b, trunc)) == strip(_schoolbook(a, b, trunc))
    assert strip(_kronecker(a, b)) == strip(_schoolbook(a, b))


@settings(max_examples=40, deadline=None)
@given(small_ints, st.integers(0, 7), st.integers(0, 15))
def test_pow_matches_repeated_mul(a, e, trunc):
    f = P(tuple(a))
    slow = P((1,))
    for _ in range(e):
        slow = poly_mul(slow, f, truncate_at=trunc)
    assert poly_pow(f, e, trunc) == slow


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 30), st.integers(-3, 33))
def test_binomial_matches_math_comb(k, t):
    expect = math.comb(k, t) if 0 <= t <= k else 0
    assert binomial(k, t).value == expect


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(small_ints, st.integers(0, 4)), min_size=1, max_size=3), st.integers(0, 10))
def test_coefficient_matches_brute(pairs, n0):
    polys = [(P(tuple(a)), e) for a, e in pairs]
    assert coeff_of_product(n0, polys).value == poly_coeffs_brute(polys, n0)[n0]


def test_large_product_uses_fast_path():
    # big enough to cross the packing threshold; checked against the binomial
    got = coeff_of_product(1500, [(P((1, 1)), 3000)])
    assert got.value == math.comb(3000, 1500)
