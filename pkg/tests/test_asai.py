import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from triplel.algebra import K, RatFnX, ScalarK
from triplel.asai import (ArchWeightData, TripleLocalDatum, arch_factor, asai_lfactor, asai_lfactor_companion,
                          critical_points, ks_check, random_satake, sym3_companion_check, sym3_factor_check)
from triplel.gl2local import HeckePoly, SatakeGL2
from conftest import nonzero_fractions, odd_primes


def split_datum(vals, q):
    a = iter(vals)
    return TripleLocalDatum("split", tuple(SatakeGL2(K(next(a)), K(next(a)), q) for _ in range(3)), q)


@given(st.lists(nonzero_fractions, min_size=6, max_size=6), odd_primes)
def test_split_factor_is_product_over_eight_characters(vals, q):
    D = split_datum(vals, q)
    want = RatFnX.const(1)
    for x, y, z in itertools.product(*[(S.alpha, S.beta) for S in D.satake]):
        want = want / (1 - RatFnX.monomial(x * y * z, 1))
    assert asai_lfactor(D) == want


@given(st.lists(st.integers(-9, 9).filter(bool), min_size=6, max_size=6), odd_primes)
def test_companion_path_matches_roots(vals, q):
    polys = [HeckePoly(q, Fraction(vals[2 * i] + vals[2 * i + 1]), Fraction(vals[2 * i] * vals[2 * i + 1]), 2)
             for i in range(3)]
    assert asai_lfactor_companion(polys) == asai_lfactor(split_datum(vals, q))


@given(nonzero_fractions, nonzero_fractions, odd_primes)
def test_inert_factor_from_frobenius_orbits(a, b, q):
    D = TripleLocalDatum("inert", (SatakeGL2(K(a), K(b), q ** 3),), q)
    # the cyclic slot permutation has two fixed basis vectors and two orbits of length three
    want = 1 / ((1 - RatFnX.monomial(K(a), 1)) * (1 - RatFnX.monomial(K(b), 1))
                * (1 - RatFnX.monomial(K(a * a * b), 3)) * (1 - RatFnX.monomial(K(a * b * b), 3)))
    assert asai_lfactor(D) == want


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_asai_factor_galois_equivariance(seed):
    rng = random.Random(seed)
    N = rng.choice([5, 7, 8, 9, 12])
    q = rng.choice([3, 5])
    units = [k for k in range(1, N) if math.gcd(k, N) == 1]
    sat = tuple(SatakeGL2(ScalarK.root_of_unity(N, rng.randrange(N)) * rng.randint(1, 5),
                          ScalarK.root_of_unity(N, rng.randrange(N)) * rng.randint(-5, -1), q) for _ in range(3))
    D = TripleLocalDatum("split", sat, q)
    for k in units:
        assert asai_lfactor(D.galois(k)) == asai_lfactor(D).galois(k)


@pytest.mark.parametrize("kappa,w,expected", [
    ((4, 4, 4), 0, {Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2)}),
    ((2, 2, 2), 0, {Fraction(1, 2)}),
    ((5, 3, 3), 1, set()),
    ((6, 5, 5), 0, {Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2)}),
    ((8, 8, 8), 2, {Fraction(k, 2) for k in range(-7, 7, 2)}),
    ((6, 2, 2), 0, set()),
])
def test_critical_points_table(kappa, w, expected):
    W = ArchWeightData((kappa,), w)
    assert critical_points(W) == expected == critical_points(W, "pole-based")


def test_parity_and_balance_validation():
    with pytest.raises(ValueError):
        ArchWeightData(((4, 4, 4),), 1)
    with pytest.raises(ValueError):
        arch_factor(ArchWeightData(((6, 2, 2),), 0))


@given(odd_primes, st.integers(0, 10 ** 6))
def test_ks_bound_for_unitary_data(q, seed):
    rng = random.Random(seed)
    u = [ScalarK.root_of_unity(8, rng.randrange(8)) for _ in range(3)]
    D = TripleLocalDatum("split", tuple(SatakeGL2(x, x.conj(), q) for x in u), q)
    assert ks_check(D)


def test_ks_bound_violation_detected():
    D = TripleLocalDatum("split", (SatakeGL2(K(9), K(Fraction(1, 9)), 3),) * 3, 3)
    assert not ks_check(D)


@given(st.builds(lambda a, b, c: (a, b, c), nonzero_fractions, nonzero_fractions, st.sampled_from([1, -1])),
       odd_primes)
def test_sym3_factorization(abc, q):
    a, b, chi = abc
    v = sym3_factor_check(SatakeGL2(K(a), K(b), q), K(chi), samples=4, rng=random.Random(0))
    assert v.passed


@given(st.integers(-12, 12), st.sampled_from([2, 3, 5, 7]), st.sampled_from([1, -1, 2]))
def test_sym3_companion(trace, p, chi):
    P = HeckePoly(p, Fraction(trace), Fraction(p), 2)
    assert sym3_companion_check(P, chi).passed


def test_random_satake_is_exact():
    S = random_satake(random.Random(3), 5)
    assert S.q == 5 and not S.alpha.is_zero()
