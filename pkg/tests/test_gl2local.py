from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from triplel.algebra import K, RatFnX, ScalarK
from triplel.gl2local import (HeckePoly, SatakeGL2, gl1_gamma, gl2_gamma, iwasawa_gl2, mat, mdet, mmul, n_low,
                              n_up, rankin_gamma, satake_from_hecke, spherical_torus, torus, whittaker_section,
                              whittaker_section_fast, whittaker_spherical)
from conftest import nonzero_fractions, odd_primes

satakes = st.builds(lambda a, b, q: SatakeGL2(K(a), K(b), q), nonzero_fractions, nonzero_fractions, odd_primes)
small = st.builds(Fraction, st.integers(-20, 20), st.sampled_from([1, 3, 9, 5, 25, 7, 2]))
matrices = st.tuples(small, small, small, small).filter(lambda t: t[0] * t[3] - t[1] * t[2] != 0)


@given(satakes, st.integers(1, 10))
def test_hecke_recursion(S, n):
    lhs = spherical_torus(S, n + 1)
    rhs = (ScalarK.q_power(S.q, -1) * (S.alpha + S.beta) * spherical_torus(S, n)
           - K(Fraction(1, S.q)) * S.omega * spherical_torus(S, n - 1))
    assert lhs == rhs


@given(satakes)
def test_spherical_normalization(S):
    assert spherical_torus(S, 0) == K(1)
    assert spherical_torus(S, -1).is_zero()


@given(nonzero_fractions, odd_primes)
def test_gl1_gamma_functional_equation(c, q):
    g = gl1_gamma(K(c), q)
    assert g * gl1_gamma(K(1 / c), q).reflect(K(Fraction(1, q))) == RatFnX.const(1)


@given(satakes)
def test_gl2_gamma_functional_equation(S):
    dual = SatakeGL2(S.alpha.inv(), S.beta.inv(), S.q)
    assert gl2_gamma(S) * gl2_gamma(dual).reflect(K(Fraction(1, S.q))) == RatFnX.const(1)


@given(satakes, satakes)
def test_rankin_gamma_functional_equation(S1, S2):
    S2 = SatakeGL2(S2.alpha, S2.beta, S1.q)
    d1 = SatakeGL2(S1.alpha.inv(), S1.beta.inv(), S1.q)
    d2 = SatakeGL2(S2.alpha.inv(), S2.beta.inv(), S1.q)
    assert rankin_gamma(S1, S2) * rankin_gamma(d1, d2).reflect(K(Fraction(1, S1.q))) == RatFnX.const(1)


@given(matrices, odd_primes)
def test_iwasawa_reassembles(t, p):
    g = mat(*t)
    y, t1, t2, k = iwasawa_gl2(g, p)
    assert mmul(mmul(n_up(y), ((t1, Fraction(0)), (Fraction(0), t2))), k) == g
    assert all(x.denominator % p for row in k for x in row)
    assert mdet(k).numerator % p != 0


@given(satakes, st.integers(0, 4), st.sampled_from([-1, 0, 1, 2]))
def test_spherical_right_invariance_under_lower_unipotents(S, n, shift):
    # n^-(varpi^j o) with j >= 0 lies in GL2(o)
    g = n_low(Fraction(S.q) ** max(shift, 0))
    assert whittaker_spherical(S, n, g, S.q) == spherical_torus(S, n)


@pytest.mark.parametrize("n", [0, 1, 2])
@given(satake=st.builds(lambda a, b: SatakeGL2(K(a), K(b), 3), nonzero_fractions, nonzero_fractions),
       t=matrices)
def test_section_closed_form_matches_refinement(n, satake, t):
    g = mat(*t)
    assert whittaker_section(satake, n, g, 3) == whittaker_section_fast(satake, n, g, 3)


@pytest.mark.parametrize("a_p,p,k,trace,det", [
    (-2, 2, 2, -2, 2), (-1, 3, 2, -1, 3), (252, 2, 12, 252, 2048),
])
def test_hecke_polynomial(a_p, p, k, trace, det):
    P = satake_from_hecke(a_p, p, k)
    assert P == HeckePoly(p, Fraction(trace), Fraction(det), k)


def test_ramified_prime_rejected():
    with pytest.raises(ValueError):
        satake_from_hecke(1, 11, 2, level=11)


def test_torus_helpers():
    assert torus(Fraction(3)) == mat(3, 0, 0, 1)
