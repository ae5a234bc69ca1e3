import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from triplel.algebra import (ExactScalar, K, LaurentSeriesX, ONE, RatFnX, ScalarK, ZERO,
                             cyclotomic_coeffs, series_expand, spec_identity_test)
from conftest import fractions, nonzero_fractions

levels = st.sampled_from([1, 3, 4, 5, 7, 8, 9, 12])


@st.composite
def cyclotomic(draw, N=None):
    N = N or draw(levels)
    out = ZERO
    for k in range(draw(st.integers(1, 3))):
        out = out + ScalarK.root_of_unity(N, draw(st.integers(0, N - 1))) * draw(fractions)
    return out


@pytest.mark.parametrize("n,coeffs", [
    (1, (-1, 1)), (2, (1, 1)), (3, (1, 1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1)), (12, (1, 0, -1, 0, 1)),
])
def test_cyclotomic_polynomials(n, coeffs):
    assert cyclotomic_coeffs(n) == coeffs


@given(levels, st.integers(0, 40))
def test_root_of_unity_order(N, k):
    z = ScalarK.root_of_unity(N, k)
    assert z ** N == ONE
    assert z * ScalarK.root_of_unity(N, -k) == ONE


@given(st.data())
def test_field_axioms(data):
    N = data.draw(levels)
    a, b, c = (data.draw(cyclotomic(N)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inv() == ONE


@given(st.sampled_from([2, 3, 5, 7]), st.integers(-6, 6), st.integers(-6, 6))
def test_q_power_exponent_law(q, h1, h2):
    assert ScalarK.q_power(q, h1) * ScalarK.q_power(q, h2) == ScalarK.q_power(q, h1 + h2)
    assert ScalarK.q_power(q, 2) == K(q)


@given(st.data())
def test_galois_is_a_ring_map(data):
    N = data.draw(st.sampled_from([5, 7, 8, 9, 12]))
    k = data.draw(st.sampled_from([u for u in range(1, N) if math.gcd(u, N) == 1]))
    a, b = data.draw(cyclotomic(N)), data.draw(cyclotomic(N))
    assert (a * b).galois(k) == a.galois(k) * b.galois(k)
    assert (a + b).galois(k) == a.galois(k) + b.galois(k)


@given(st.data())
def test_embedding_matches_complex_arithmetic(data):
    N = data.draw(levels)
    a, b = data.draw(cyclotomic(N)), data.draw(cyclotomic(N))
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-9


@given(st.data())
def test_scalar_serialization_roundtrip(data):
    a = data.draw(cyclotomic()) + ScalarK.sqrt(data.draw(st.sampled_from([3, 5]))) * data.draw(fractions)
    assert ScalarK.parse(a.serialize()) == a


@given(nonzero_fractions, nonzero_fractions)
def test_ratfn_geometric_series(a, b):
    f = 1 / (1 - RatFnX.monomial(K(a), 1))
    s = series_expand(f * b, 8)
    for k in range(8):
        assert s.coefficient(k) == K(b * a ** k)


@given(nonzero_fractions, nonzero_fractions, st.integers(-3, 3))
def test_ratfn_field_operations(a, b, k):
    f = (1 - RatFnX.monomial(K(a), 1)) / (1 + RatFnX.monomial(K(b), 2)) * RatFnX.monomial(ONE, k)
    assert f * f.inv() == RatFnX.const(1)
    assert (f + f) - f == f
    assert RatFnX.parse(f.serialize()) == f


@given(nonzero_fractions, st.sampled_from([3, 5]))
def test_reflect_is_an_involution(a, q):
    f = 1 / (1 - RatFnX.monomial(K(a), 1))
    c = K(Fraction(1, q))
    assert f.reflect(c).reflect(c) == f


def test_laurent_series_product_and_comparison():
    s = LaurentSeriesX.from_dict({0: ONE, 1: K(2)}, 5)
    t = LaurentSeriesX.from_dict({-1: ONE}, 5)
    assert (s * t).as_dict() == {-1: ONE, 0: K(2)}
    assert s.equals_to_order(LaurentSeriesX.from_dict({0: ONE, 1: K(2), 7: ONE}, 9), 5)


def test_identity_tester_accepts_true_and_rejects_false_identities():
    def lhs(v):
        return (v["x"] + v["y"]) ** 2

    def rhs(v):
        return v["x"] ** 2 + 2 * v["x"] * v["y"] + v["y"] ** 2

    assert spec_identity_test(lhs, rhs, 20, ("x", "y"), random.Random(1))
    bad = spec_identity_test(lhs, lambda v: v["x"] ** 2 + v["y"] ** 2, 20, ("x", "y"), random.Random(1))
    assert not bad and bad.counterexample is not None


@pytest.mark.parametrize("k,exponent", [(0, 0), (4, 4), (-3, -3), (12, 12)])
def test_two_pi_i_bookkeeping(k, exponent):
    x = ExactScalar.two_pi_i(k) * ExactScalar(Fraction(7, 3))
    E, rest = x.split_two_pi_i()
    assert E == exponent and rest == ExactScalar(Fraction(7, 3))
    assert ExactScalar.parse(x.serialize()) == x


def test_exact_scalar_numerics():
    x = ExactScalar.two_pi_i(2)
    assert abs(x.to_complex() - (2j * 3.141592653589793) ** 2) < 1e-9
