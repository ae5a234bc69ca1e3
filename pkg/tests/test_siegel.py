from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from triplel.algebra import K, ExactScalar, RatFnX
from triplel.localfield import ShellFunction
from triplel.siegel import (ENTRIES, GSpElement, NotInCell, PreconditionError, SchwartzSym3, arch_coeff_constant,
                            big_cell_decompose, coefficient_table, degenerate_whittaker, det, eis_fourier_assemble,
                            f_phi_eval, gsp_make, holomorphy_precheck, identity, is_positive_definite,
                            sym_from_six, table_from_json, table_to_json)
from triplel.zeta import build_phi

small = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 2, 3, 9]))
sym3 = st.lists(small, min_size=6, max_size=6).map(sym_from_six)
gl3 = st.lists(small, min_size=9, max_size=9).map(lambda v: (tuple(v[0:3]), tuple(v[3:6]), tuple(v[6:9]))) \
    .filter(lambda a: det(a) != 0)
similitudes = st.builds(Fraction, st.integers(1, 9), st.integers(1, 9)) | st.builds(Fraction, st.integers(-9, -1), st.just(1))


@st.composite
def gsp6(draw):
    g = gsp_make("J", n=3)
    for _ in range(draw(st.integers(1, 4))):
        kind = draw(st.sampled_from(["m", "n", "n-", "J"]))
        if kind == "m":
            g = g * gsp_make("m", (draw(gl3), draw(similitudes)))
        elif kind == "J":
            g = g * gsp_make("J", n=3)
        else:
            g = g * gsp_make(kind, draw(sym3))
    return g


@settings(max_examples=100)
@given(gsp6(), gsp6())
def test_symplectic_group_laws(g, h):
    assert (g * h).nu == g.nu * h.nu
    assert (g * g.inv()).matrix == identity(6)
    assert (g * h).inv() == h.inv() * g.inv()


@settings(max_examples=100)
@given(gsp6())
def test_big_cell_reassembles(g):
    try:
        cell = big_cell_decompose(g)
    except NotInCell:
        return
    assert cell.reassemble() == g


def test_levi_is_outside_big_cell():
    with pytest.raises(NotInCell):
        big_cell_decompose(gsp_make("m", (identity(3), 2)))


def test_non_symplectic_rejected():
    with pytest.raises(ValueError):
        GSpElement(identity(6)[:5] + ((Fraction(1),) * 6,))
    with pytest.raises(ValueError):
        gsp_make("n", ((1, 2, 0), (0, 1, 0), (0, 0, 1)))


@settings(max_examples=40)
@given(gsp6(), sym3, st.sampled_from([1, 2]))
def test_section_left_invariant_under_upper_unipotents(g, X, variant):
    Phi = build_phi(variant, 3)
    assert f_phi_eval(Phi, gsp_make("n", X) * g, K(2)) == f_phi_eval(Phi, g, K(2))


@pytest.mark.parametrize("variant,pattern", [
    # per entry (11, 12, 13, 22, 23, 33): exact unit shells and ball start of the Fourier transform
    (1, (((0,), None), ((1,), 2), ((), 1), ((), 1), ((0,), None), ((), 1))),
    (2, (((), 1), ((0,), None), ((0,), None), ((), 1), ((0,), None), ((), 1))),
])
@pytest.mark.parametrize("q", [3, 5])
def test_fourier_support_patterns(variant, pattern, q):
    assert build_phi(variant, q).fourier().support_patterns() == [pattern]


@pytest.mark.parametrize("q", [3, 5])
def test_precheck_on_test_functions(q):
    assert holomorphy_precheck(build_phi(1, q), 4)
    assert holomorphy_precheck(build_phi(2, q), 4)
    ball = ShellFunction.ball(q, 0)
    unit = SchwartzSym3.product({e: ball for e in ENTRIES})
    assert not holomorphy_precheck(unit, 4)


@pytest.mark.parametrize("ell,sign,ok", [(4, 1, True), (4, -1, False), (1, -1, False)])
def test_precheck_weight_and_parity(ell, sign, ok):
    assert bool(holomorphy_precheck(None, ell, 3, sign)) is ok


def test_spherical_degenerate_whittaker():
    assert degenerate_whittaker("spherical", identity(3), 3) == RatFnX.const(1)
    two = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    f = degenerate_whittaker("spherical", two, 3)
    assert len(f.den) == 2


@pytest.mark.parametrize("six", [(1, 0, 0, 1, 0, -1), (0, 0, 0, 0, 0, 0), (1, 2, 0, 1, 0, 1)])
def test_non_positive_definite_coefficients_vanish(six):
    B = sym_from_six(six)
    assert not is_positive_definite(B)
    assert eis_fourier_assemble(4, B, (3, build_phi(1, 3))).is_zero()


def test_assembled_coefficient_transcendental_part():
    val = eis_fourier_assemble(4, sym_from_six((2, -3, 0, 6, -2, 3)), (3, build_phi(1, 3)))
    E, rest = val.split_two_pi_i()
    # Gamma(7/2) contributes sqrt(pi), so (2 pi i)^12 (4 pi)^{-3/2} / Gamma(7/2) is rational times (2 pi i)^10
    assert E == 10 and rest.is_rational() and not rest.is_zero()


def test_assembler_rejects_unit_schwartz_function():
    ball = ShellFunction.ball(3, 0)
    with pytest.raises(PreconditionError):
        eis_fourier_assemble(4, identity(3), (3, SchwartzSym3.product({e: ball for e in ENTRIES})))


def test_arch_constant_weight_bound():
    with pytest.raises(ValueError):
        arch_coeff_constant(3, 3, identity(3))
    c = arch_coeff_constant(4, 3, identity(3))
    assert c.exp_trace == 3


def test_coefficient_table_roundtrip():
    rows = coefficient_table(4, [sym_from_six((2, 0, 3, 3, 2, 6))], (3, build_phi(1, 3)))
    back = table_from_json(table_to_json(rows))
    assert back[0]["value"] == ExactScalar.parse(rows[0]["value"])
