"""Local triple-product zeta integrals at a split unramified place.

Three evaluation paths are provided and kept independent:

* ``zeta_closed_form``: products of GL1/GL2 gamma factors;
* ``zeta_reduced_eval``: the reduced one-variable integral after the GL2 functional
  equation, summed exactly over valuation shells with geometric tails;
* ``zeta_oracle``: the SL2-coordinate integral of W1 (x) f2 (x) f3 (x) f_Phi evaluated
  stratum by stratum from explicit 6x6 matrices and their big-cell decompositions.

The good-place classifier and the non-vanishing selector work with the eight products
a1 a2 a3 (a_i in {alpha_i, beta_i}) of a split datum.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from .algebra import ONE, ZERO, K, LaurentSeriesX, RatFnX, ScalarK, series_expand
from .asai import TripleLocalDatum, random_satake
from .gl2local import (
    J1, SatakeGL2, SupportBoundError, gl1_gamma, gl2_gamma, m_sl2, mmul, n_low, n_up,
    section_eval_fn, torus, whittaker_phase,
)
from .localfield import (
    INF, PrecisionError, ShellFunction, indicator_units_hat, is_prime, q_pow, shell_fourier,
    shell_measure, unit_average, valuation,
)
from .siegel import GSpElement, SchwartzSym3, big_cell_decompose, det, f_phi_eval, gsp_make

__all__ = [
    "ETA", "WhittakerSpec", "ZetaInput", "build_phi", "zeta_input", "zeta_closed_form",
    "zeta_reduced_eval", "zeta_oracle", "OracleBudgetError", "iota", "symbolic_structure_check",
    "GoodPlaceVerdict", "good_place_classify", "brute_force_case", "NonvanishingChoice",
    "nonvanishing_select", "prop_product", "FudgeRelation", "prop_fudge_relation",
    "verification_report", "InternalConsistencyError", "lower_unipotent_invariance", "arrange",
    "report_json", "random_split_datum",
]

ETA = (
    (0, 0, 0, -1, 0, 0),
    (0, 1, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0),
    (1, 1, 1, 0, 0, 0),
    (0, 0, 0, -1, 1, 0),
    (0, 0, 0, -1, 0, 1),
)
_ETA = tuple(tuple(Fraction(x) for x in r) for r in ETA)


class OracleBudgetError(RuntimeError):
    pass


class InternalConsistencyError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WhittakerSpec:
    """'spherical' (W°, W°(1) = 1) or 'section' (W^(n) built from the section f^(n))."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("spherical", "section"):
            raise ValueError(f"unknown Whittaker kind {self.kind!r}")
        if self.kind == "section" and self.n < 1:
            raise ValueError("section-built Whittaker functions need n >= 1")

    @classmethod
    def spherical(cls) -> WhittakerSpec:
        return cls("spherical", 0)

    @classmethod
    def section(cls, n: int) -> WhittakerSpec:
        return cls("section", n)


@dataclass(frozen=True)
class ZetaInput:
    slots: tuple
    phi: SchwartzSym3
    datum: TripleLocalDatum
    eta: tuple = ETA

    def __post_init__(self):
        if len(self.slots) != 3:
            raise ValueError("three Whittaker slots are needed")
        if self.datum.kind != "split":
            raise ValueError("zeta integrals are implemented at split places")
        if tuple(map(tuple, self.eta)) != ETA:
            raise ValueError("the embedding element eta is fixed")
        if self.phi.q != self.datum.q:
            raise ValueError("Schwartz function and Satake data live over different residue fields")


def build_phi(variant, q: int) -> SchwartzSym3:
    """The product Schwartz functions used for the two explicit zeta integrals."""
    hat = indicator_units_hat(q)
    ball_m1 = ShellFunction.ball(q, -1)
    if variant in (1, "1", "lemma531"):
        entries = {(0, 0): hat, (1, 1): ball_m1, (2, 2): ball_m1,
                   (0, 1): ShellFunction.shell(q, -2), (0, 2): ball_m1, (1, 2): hat}
    elif variant in (2, "2", "lemma532"):
        entries = {(0, 0): ball_m1, (1, 1): ball_m1, (2, 2): ball_m1,
                   (0, 1): hat, (0, 2): hat, (1, 2): hat}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return SchwartzSym3.product(entries)


def _variant_id(variant) -> int:
    if variant in (1, "1", "lemma531"):
        return 1
    if variant in (2, "2", "lemma532"):
        return 2
    raise ValueError(f"unknown variant {variant!r}")


def zeta_input(variant, D: TripleLocalDatum) -> ZetaInput:
    v = _variant_id(variant)
    if v == 1:
        slots = (WhittakerSpec.spherical(), WhittakerSpec.section(2), WhittakerSpec.section(2))
    else:
        slots = (WhittakerSpec.section(1),) * 3
    return ZetaInput(slots, build_phi(v, D.q), D)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def zeta_closed_form(variant, D: TripleLocalDatum) -> RatFnX:
    v = _variant_id(variant)
    if D.kind != "split":
        raise ValueError("closed forms need a split datum")
    S1, S2, S3 = D.satake
    q = D.q
    a2, b2, a3, b3 = S2.alpha, S2.beta, S3.alpha, S3.beta
    measure = (1 + Fraction(1, q)) ** -2
    first = gl2_gamma(S1, b2 * b3, 1).inv()
    if v == 1:
        pre = (a2 * b3) ** 2 * (b2 * a3) ** -2 * q_pow(q, -6) * measure
        return first * gl2_gamma(S1, a2 * b3, 1).inv() * pre
    pre = K(q_pow(q, -3) * measure)
    b1 = S1.beta
    return first * gl1_gamma(b1 * b2 * a3, q, 1).inv() * gl1_gamma(b1 * b3 * a2, q, 1).inv() * pre


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _coset_classes(f: ShellFunction, p: int):
    """(measure, representative, value) for F split into o and the shells below 0.

    Requires f constant on o, so f is constant on every coset of o.
    """
    g = f.normalized()
    if g.is_zero():
        return []
    if g.n_max > 0:
        raise ValueError("this entry must be constant on cosets of o")
    out = []
    for l in range(g.n_min, 0):
        val = g(l)
        if not val.is_zero():
            out.append((shell_measure(p, l), Fraction(p) ** l, val))
    if not g.tail.is_zero():
        out.append((Fraction(1), Fraction(0), g.tail))
    return out


def _additive_total(f: ShellFunction) -> ScalarK:
    """int_F f(x) dx."""
    g = f.normalized()
    if g.is_zero():
        return ZERO
    total = g.tail * q_pow(g.q, -g.n_max)
    for n in range(g.n_min, g.n_max):
        total = total + g(n) * shell_measure(g.q, n)
    return total


def _check_prime(q: int):
    if not is_prime(q):
        raise ValueError("exact evaluation needs a prime residue field")
    if q == 2:
        raise ValueError("residue characteristic 2 is unsupported")


# ---------------------------------------------------------------------------
# reduced one-variable path
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Seq:
    """v -> f(v) c^v X^(sigma v) for a shell function f."""

    f: ShellFunction
    c: ScalarK
    sigma: int

    @property
    def lo(self) -> int:
        return self.f.n_min

    def value(self, v: int) -> tuple[int, ScalarK]:
        return self.sigma * v, self.f(v) * self.c ** v

    def gen(self, rho: ScalarK, weighted: bool = False) -> RatFnX:
        """sum_v (v if weighted) f(v) (c rho)^v X^(sigma v)."""
        terms = {}
        for v in range(self.f.n_min, self.f.n_max):
            coef = self.f(v) * (self.c * rho) ** v
            if weighted:
                coef = coef * v
            if not coef.is_zero():
                terms[self.sigma * v] = terms.get(self.sigma * v, ZERO) + coef
        out = RatFnX.from_laurent(terms)
        if self.f.tail.is_zero():
            return out
        T = self.f.n_max
        y = RatFnX.monomial(self.c * rho, self.sigma)
        if weighted:
            tail = y ** T * (T - (T - 1) * y) / (1 - y) ** 2
        else:
            tail = y ** T / (1 - y)
        return out + tail * self.f.tail


def _solve2(m, rhs):
    (a, b), (c, d) = m
    dt = a * d - b * c
    if dt.is_zero():
        return None
    return ((rhs[0] * d - b * rhs[1]) / dt, (a * rhs[1] - c * rhs[0]) / dt)


def _reduced_shell_sum(seqs, A, rhos, kmin: int, N: int) -> RatFnX:
    """sum_k A(k) h(k) with h the convolution of the three sequences."""
    repeated = rhos[0] == rhos[1]
    rho = rhos[0]

    def basis(k):
        if repeated:
            return (rho ** k, rho ** k * k)
        return (rhos[0] ** k, rhos[1] ** k)

    T = kmin + 1
    coeffs = None
    while True:
        if T > N:
            raise SupportBoundError(f"no exponential regime found below N={N}; increase N")
        sol = _solve2((basis(T), basis(T + 1)), (A(T), A(T + 1)))
        if sol is not None and all(
                sum((e * b for e, b in zip(sol, basis(k))), ZERO) == A(k) for k in range(T + 2, T + 6)):
            coeffs = sol
            break
        T += 1

    if repeated:
        G = [s.gen(rho) for s in seqs]
        H = [s.gen(rho, weighted=True) for s in seqs]
        main = G[0] * G[1] * G[2] * coeffs[0]
        main = main + (H[0] * G[1] * G[2] + G[0] * H[1] * G[2] + G[0] * G[1] * H[2]) * coeffs[1]
    else:
        main = RatFnX.const(0)
        for e, r in zip(coeffs, rhos):
            if not e.is_zero():
                main = main + seqs[0].gen(r) * seqs[1].gen(r) * seqs[2].gen(r) * e

    corr = {}
    s1, s2, s3 = seqs
    for k in range(kmin, T):
        d = A(k) - sum((e * b for e, b in zip(coeffs, basis(k))), ZERO)
        if d.is_zero():
            continue
        for v1 in range(s1.lo, k - s2.lo - s3.lo + 1):
            x1, c1 = s1.value(v1)
            if c1.is_zero():
                continue
            for v2 in range(s2.lo, k - v1 - s3.lo + 1):
                x2, c2 = s2.value(v2)
                if c2.is_zero():
                    continue
                x3, c3 = s3.value(k - v1 - v2)
                if c3.is_zero():
                    continue
                e = x1 + x2 + x3
                corr[e] = corr.get(e, ZERO) + d * c1 * c2 * c3
    return main + RatFnX.from_laurent(corr)


def zeta_reduced_eval(Z: ZetaInput, N: int = 40) -> RatFnX:
    """Reduced integral over x, a1, a2, a3 after the GL2 functional equation in the first slot."""
    W1, W2, W3 = Z.slots
    if W2 != W3 or W2.kind != "section":
        raise ValueError("slots 2 and 3 must carry the same section-built Whittaker function")
    n = W2.n
    Phi = Z.phi
    if not Phi.is_product:
        raise ValueError("the reduced path needs a product Schwartz function")
    if not Phi.factors_through(n):
        raise ValueError(f"Phi must factor through level {n}")
    D = Z.datum
    q = D.q
    _check_prime(q)
    S1, S2, S3 = D.satake
    phi11, phi12, phi13 = Phi.entry(0, 0), Phi.entry(0, 1), Phi.entry(0, 2)
    phi22, phi23, phi33 = Phi.entry(1, 1), Phi.entry(1, 2), Phi.entry(2, 2)
    hat23 = shell_fourier(phi23).normalized()
    const = q_pow(q, -4 * n) * (1 + Fraction(1, q)) ** -2
    const = shell_fourier(phi22)(INF) * shell_fourier(phi33)(INF) * const
    if const.is_zero():
        return RatFnX.const(0)
    pref = gl2_gamma(S1, S2.beta * S3.beta, 1).inv() * const
    seqs = (
        _Seq(hat23, (S1.omega * S2.beta * S3.beta).inv(), -1),
        _Seq(phi12.normalized(), S2.beta * S3.alpha, 1),
        _Seq(phi13.normalized(), S2.alpha * S3.beta, 1),
    )
    if any(s.f.is_zero() for s in seqs):
        return RatFnX.const(0)
    kmin = sum(s.lo for s in seqs)
    rhos = (S1.alpha * ScalarK.q_power(q, -1), S1.beta * ScalarK.q_power(q, -1))

    total = RatFnX.const(0)
    for meas, x, val in _coset_classes(phi11, q):
        cache = {}

        def A(k, x=x, cache=cache):
            if k not in cache:
                g = mmul(mmul(torus(Fraction(q) ** k), J1), n_up(x))
                lam, amp = whittaker_phase(W1.kind, S1, g, q, W1.n)
                cache[k] = amp * unit_average(q, valuation(lam, q)) if not amp.is_zero() else ZERO
            return cache[k]

        total = total + _reduced_shell_sum(seqs, A, rhos, kmin, N) * (val * meas)
    return pref * total


# ---------------------------------------------------------------------------
# oracle: explicit matrices, stratified integration
# ---------------------------------------------------------------------------

def iota(g1, g2, g3) -> tuple:
    """Block embedding of three 2x2 matrices into 6x6 matrices."""
    out = [[Fraction(0)] * 6 for _ in range(6)]
    for i, g in enumerate((g1, g2, g3)):
        (a, b), (c, d) = g
        out[i][i], out[i][3 + i], out[3 + i][i], out[3 + i][3 + i] = a, b, c, d
    return tuple(tuple(r) for r in out)


def _mul6(A, B):
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(6) if A[i][k] and B[k][j]), Fraction(0))
                       for j in range(6)) for i in range(6))


def symbolic_structure_check() -> bool:
    """Verify with sympy the coordinate facts the oracle relies on.

    * the big-cell coordinate x of eta * iota(t(a1) g1, t(a1) g2, t(a1) g3) does not involve a1;
    * x2, x3 enter only the diagonal entries 22, 33, each shifted by -x2, -x3;
    * J1 t(a1) m(a) n^-(x) J1 is upper triangular with diagonal free of x;
    * the similitude is a1 and the Levi determinant is -a1^2 a2 a3.
    """
    import sympy as sp

    a1, a2, a3, x1, y1, x2, x3 = sp.symbols("a1 a2 a3 x1 y1 x2 x3", nonzero=True)

    def M(a, b, c, d):
        return sp.Matrix([[a, b], [c, d]])

    t = M(a1, 0, 0, 1)
    j1 = M(0, 1, -1, 0)
    g1 = t * M(1, 0, x1, 1) * M(1, y1, 0, 1)
    g2 = t * M(a2, 0, 0, 1 / a2) * M(1, 0, x2, 1) * j1
    g3 = t * M(a3, 0, 0, 1 / a3) * M(1, 0, x3, 1) * j1
    big = sp.zeros(6, 6)
    for i, g in enumerate((g1, g2, g3)):
        big[i, i], big[i, 3 + i], big[3 + i, i], big[3 + i, 3 + i] = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    h = sp.Matrix(ETA) * big
    A, C, Dm = h[:3, :3], h[3:, :3], h[3:, 3:]
    x = sp.simplify(C.inv() * Dm)
    J3 = sp.Matrix(sp.BlockMatrix([[sp.zeros(3), sp.eye(3)], [-sp.eye(3), sp.zeros(3)]]))
    nu = sp.simplify((h * J3 * h.T)[0, 3])
    a = sp.simplify(-nu * C.inv().T)
    ok = all(sp.diff(e, a1) == 0 for e in x)
    expected = sp.Matrix([[y1, a2, a3], [a2, -a2 ** 2 * x1 - x2, -a2 * a3 * x1],
                          [a3, -a2 * a3 * x1, -a3 ** 2 * x1 - x3]])
    ok &= sp.simplify(x - expected) == sp.zeros(3)
    ok &= sp.simplify(nu - a1) == 0
    ok &= sp.simplify(a.det() + a1 ** 2 * a2 * a3) == 0
    f2arg = j1 * t * M(a2, 0, 0, 1 / a2) * M(1, 0, x2, 1) * j1
    ok &= sp.simplify(f2arg[1, 0]) == 0
    ok &= all(sp.diff(sp.simplify(f2arg[i, i]), x2) == 0 for i in range(2))
    del A
    return bool(ok)


_PROBES = ((Fraction(2, 3), Fraction(5, 7)), (Fraction(-3, 4), Fraction(11, 5)))


def _probe_data(q: int):
    return [TripleLocalDatum("split", tuple(SatakeGL2(a + i, b - i, q) for i in range(3)), q) for a, b in _PROBES]


@dataclass(frozen=True)
class _Stratum:
    weight: ScalarK          # measures, Schwartz values, x2/x3/y2/y3 factors
    e: int                   # X exponent
    vnu: int
    vdet: int
    g1: tuple                # representative of the first slot
    v1: int
    v2: int
    v3: int


@dataclass
class _OracleTable:
    q: int
    order: int
    strata: list = field(default_factory=list)
    y_factor: dict = field(default_factory=dict)


def _y_integral(S: SatakeGL2, n: int, P, p: int) -> ScalarK:
    """int_F f(P n^-(y)) dy / f(P) for P in the Borel."""
    base = section_eval_fn(S, n, P, p)
    top = 2 * n + 4
    acc = section_eval_fn(S, n, mmul(P, n_low(0)), p) * q_pow(p, -top)
    for v in range(-4, top):
        acc = acc + section_eval_fn(S, n, mmul(P, n_low(Fraction(p) ** v)), p) * shell_measure(p, v)
    return acc / base


def _f_arg(v1: int, va: int, p: int):
    return mmul(mmul(mmul(J1, torus(Fraction(p) ** v1)), m_sl2(Fraction(p) ** va)), J1)


def _x1_strata(l, j: int, p: int, T: int):
    """(fraction of the x1-shell v = j, representative) given y1 = p^l (l = INF for y1 = 0)."""
    if l == INF or j + l != 0:
        return [(Fraction(1), Fraction(p) ** j)]
    y1 = Fraction(p) ** l
    out = [(Fraction(p - 2, p - 1), Fraction(p) ** j)]
    for k in range(1, T):
        out.append((q_pow(p, -k), (Fraction(p) ** k - 1) / y1))
    out.append((q_pow(p, -T) * Fraction(p, p - 1), (Fraction(p) ** T - 1) / y1))
    return out


def _block(Phi: SchwartzSym3, W1: WhittakerSpec, n: int, p: int, y1: Fraction, x1: Fraction,
           weight: Fraction, K_: int, probes: tuple, entries) -> list:
    """All strata (v1, v2, v3) with X-exponent <= K_ for fixed first-slot coordinates."""
    phi11, phi12, phi13, phi23, int22, int33 = entries
    j = valuation(x1, p)
    v2lo, v3lo, s23lo = phi12.n_min, phi13.n_min, phi23.n_min
    pair_lo = max(v2lo + v3lo, s23lo - j)
    v1_hi = K_ - 2 * pair_lo
    lows = [0, j]
    if y1 != 0:
        lows.append(valuation(1 + x1 * y1, p))
    v1_lo = 2 * min(lows) - 2 * W1.n - 6
    out = []
    t1 = n_low(x1)
    t2 = n_up(y1)
    for v1 in range(v1_lo, v1_hi + 1):
        a1 = Fraction(p) ** v1
        g1 = mmul(mmul(torus(a1), t1), t2)
        phases = [whittaker_phase(W1.kind, S, g1, p, W1.n) for S in probes]
        if all(amp.is_zero() for _, amp in phases):
            continue  # outside the support of W1
        lam = next(lam for lam, amp in phases if not amp.is_zero())
        avg = unit_average(p, valuation(lam, p))
        if avg == 0:
            continue
        budget2 = K_ - v1
        v2 = v2lo
        while 2 * v2 + 2 * v3lo <= budget2:
            if v2 >= phi12.n_max and phi12.tail.is_zero():
                break
            if phi12(v2).is_zero():
                v2 += 1
                continue
            v3 = v3lo
            while 2 * v2 + 2 * v3 <= budget2:
                if v3 >= phi13.n_max and phi13.tail.is_zero():
                    break
                a2, a3 = Fraction(p) ** v2, Fraction(p) ** v3
                g2 = mmul(mmul(torus(a1), m_sl2(a2)), J1)
                g3 = mmul(mmul(torus(a1), m_sl2(a3)), J1)
                h = _mul6(_ETA, iota(g1, g2, g3))
                cell = big_cell_decompose(GSpElement(h))
                X = cell.x
                val = (phi11(valuation(X[0][0], p)) * phi12(valuation(X[0][1], p))
                       * phi13(valuation(X[0][2], p)) * phi23(valuation(X[1][2], p)))
                vnu = valuation(cell.nu, p)
                vdet = valuation(det(cell.a), p)
                e = 2 * vdet - 3 * vnu
                if e != v1 + 2 * v2 + 2 * v3:
                    raise InternalConsistencyError("unexpected X-exponent in the big-cell coordinates")
                if not val.is_zero():
                    out.append(_Stratum(val * weight * avg * int22 * int33, e, vnu, vdet, g1, v1, v2, v3))
                v3 += 1
            v2 += 1
    return out


def _block_value(block, D: TripleLocalDatum, n: int, W1: WhittakerSpec, y_cache: dict) -> dict:
    S1, S2, S3 = D.satake
    p = D.q
    om = D.omega
    w1cache, f2cache, f3cache = {}, {}, {}
    out = {}
    for st in block:
        if st.g1 not in w1cache:
            w1cache[st.g1] = whittaker_phase(W1.kind, S1, st.g1, p, W1.n)[1]
        amp = w1cache[st.g1]
        if amp.is_zero():
            continue
        key2, key3 = (st.v1, st.v2), (st.v1, st.v3)
        if key2 not in f2cache:
            P = _f_arg(st.v1, st.v2, p)
            f2cache[key2] = section_eval_fn(S2, n, P, p) * _cached_y(y_cache, S2, n, P, p)
        if key3 not in f3cache:
            P = _f_arg(st.v1, st.v3, p)
            f3cache[key3] = section_eval_fn(S3, n, P, p) * _cached_y(y_cache, S3, n, P, p)
        char = om ** (st.vdet - 2 * st.vnu) * q_pow(p, 3 * st.vnu - 2 * st.vdet)
        c = st.weight * amp * f2cache[key2] * f3cache[key3] * char
        out[st.e] = out.get(st.e, ZERO) + c
    return out


def _cached_y(cache, S, n, P, p):
    key = (n, P)
    if key not in cache:
        cache[key] = _y_integral(S, n, P, p)
    return cache[key]


def _dict_equal(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k, ZERO) == b.get(k, ZERO) for k in keys)


@lru_cache(maxsize=32)
def _oracle_strata(Phi: SchwartzSym3, W1: WhittakerSpec, n: int, K_: int, N: int, M: int, budget: int):
    q = Phi.q
    p = q
    phi11 = Phi.entry(0, 0).normalized()
    phi12 = Phi.entry(0, 1).normalized()
    phi13 = Phi.entry(0, 2).normalized()
    phi23 = Phi.entry(1, 2).normalized()
    int22 = _additive_total(Phi.entry(1, 1))
    int33 = _additive_total(Phi.entry(2, 2))
    entries = (phi11, phi12, phi13, phi23, int22, int33)
    if any(f.is_zero() for f in (phi11, phi12, phi13, phi23)) or int22.is_zero() or int33.is_zero():
        return []
    probes = _probe_data(q)
    probe = tuple(D.satake[0] for D in probes)
    y_cache: dict = {}

    def probe_values(block):
        return [_block_value(block, D, n, W1, y_cache) for D in probes]

    def stable(b1, b2):
        return all(_dict_equal(x, y) for x, y in zip(probe_values(b1), probe_values(b2)))

    strata = []
    for ymeas, y1, _ in _coset_classes(phi11, p):
        l = valuation(y1, p)
        base_w = ymeas  # phi11 itself is read off the decomposed X
        # constancy threshold as x1 -> 0
        J = max(0, 2 * W1.n, phi23.n_max - phi12.n_min - phi13.n_min) + 1
        if l != INF:
            J = max(J, 1 - l)
        while True:
            b1 = _block(Phi, W1, n, p, y1, Fraction(p) ** J, ONE, K_, probe, entries)
            b2 = _block(Phi, W1, n, p, y1, Fraction(p) ** (J + 1), ONE, K_, probe, entries)
            if stable(b1, b2):
                break
            J += 1
            if J > N:
                raise OracleBudgetError(f"x1 constancy threshold exceeds N={N}")
        # constancy threshold in v(1 + x1 y1)
        T = 2
        if l != INF:
            while True:
                xa = (Fraction(p) ** T - 1) / y1
                xb = (Fraction(p) ** (T + 1) - 1) / y1
                b1 = _block(Phi, W1, n, p, y1, xa, ONE, K_, probe, entries)
                b2 = _block(Phi, W1, n, p, y1, xb, ONE, K_, probe, entries)
                if stable(b1, b2):
                    break
                T += 1
                if T > M:
                    raise PrecisionError(f"unit precision M={M} too small; need M >= {T + 1}")
        strata.extend(_block(Phi, W1, n, p, y1, Fraction(p) ** J, base_w * q_pow(p, -J), K_, probe, entries))
        empty_run = 0
        j = J - 1
        while True:
            if j < -N:
                raise OracleBudgetError(f"x1 shells below -N={N} still contribute; increase N")
            found = False
            for frac, x1 in _x1_strata(l, j, p, T):
                blk = _block(Phi, W1, n, p, y1, x1, base_w * shell_measure(p, j) * frac, K_, probe, entries)
                if blk:
                    found = True
                    strata.extend(blk)
            if len(strata) > budget:
                raise OracleBudgetError(f"stratum budget {budget} exceeded (at least {len(strata)} strata)")
            empty_run = 0 if found else empty_run + 1
            if empty_run >= 3 and j < min(0, -l if l != INF else 0) - 2:
                break
            j -= 1
    strata.sort(key=lambda s: (s.e, s.v1, s.v2, s.v3, s.g1))
    return strata


def zeta_oracle(Z: ZetaInput, order: int = 10, N: int = 40, M: int | None = None,
                budget: int = 400000) -> LaurentSeriesX:
    """Stratified evaluation of the SL2-coordinate zeta integral, as an X-series through X^order."""
    W1, W2, W3 = Z.slots
    if W2 != W3 or W2.kind != "section":
        raise ValueError("slots 2 and 3 must carry the same section-built Whittaker function")
    n = W2.n
    Phi = Z.phi
    if not Phi.is_product:
        raise ValueError("the oracle needs a product Schwartz function")
    if not Phi.factors_through(n):
        raise ValueError(f"Phi must factor through level {n} for the y2, y3 reduction")
    q = Z.datum.q
    _check_prime(q)
    if M is None:
        M = max(4, 2 * n + 2)
    strata = _oracle_strata(Phi, W1, n, order, N, M, budget)
    coeffs = _block_value(strata, Z.datum, n, W1, {})
    meas = (1 + Fraction(1, q)) ** -2
    return LaurentSeriesX.from_dict({k: v * meas for k, v in coeffs.items()}, order)


def lower_unipotent_invariance(Phi: SchwartzSym3, n: int, samples: int = 20, rng=None,
                               omega=ONE) -> bool:
    """f_Phi(g n^-(y)) = f_Phi(g) for random big-cell g and y in Sym_3(varpi^{2n} o).

    g ranges over m(a, nu) J n(x) with x in Sym_3(varpi^{-n} o), including the border shells.
    """
    rng = rng or random.Random(0)
    p = Phi.q

    def rnd_sym(lo):
        vals = [Fraction(rng.randint(-p * p, p * p), 1) * Fraction(p) ** (lo + rng.randint(0, 3))
                for _ in range(6)]
        (a, b, c, d, e, f) = vals
        return ((a, b, c), (b, d, e), (c, e, f))

    for _ in range(samples):
        x = rnd_sym(-n)
        y = rnd_sym(2 * n)
        a = tuple(tuple(Fraction(rng.choice([1, -1, p, 1 + p])) if i == j else
                        Fraction(rng.randint(0, p)) if i < j else Fraction(0) for j in range(3)) for i in range(3))
        nu = Fraction(rng.choice([1, p, -1]))
        g = gsp_make("m", (a, nu)) * gsp_make("J", n=3) * gsp_make("n", x)
        if f_phi_eval(Phi, g * gsp_make("n-", y), omega) != f_phi_eval(Phi, g, omega):
            return False
    return True


# ---------------------------------------------------------------------------
# good places
# ---------------------------------------------------------------------------

_CHOICES = tuple((a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1))


def _param(S: SatakeGL2, bit: int) -> ScalarK:
    return S.alpha if bit == 0 else S.beta


def _product(D: TripleLocalDatum, choice) -> ScalarK:
    out = ONE
    for S, bit in zip(D.satake, choice):
        out = out * _param(S, bit)
    return out


def _target(q: int, half: int) -> ScalarK:
    return ScalarK.q_power(q, half)


def arrange(D: TripleLocalDatum, perm, swaps) -> TripleLocalDatum:
    """Slot r of the result is slot perm[r] of D, with its parameters exchanged if swaps[r]."""
    sat = []
    for r in range(3):
        S = D.satake[perm[r]]
        sat.append(S.swapped() if swaps[r] else S)
    return TripleLocalDatum("split", tuple(sat), D.q, D.w)


@dataclass(frozen=True)
class GoodPlaceVerdict:
    case: int
    witness: tuple | None = None      # (perm, swaps)
    arranged: TripleLocalDatum | None = None

    def to_dict(self) -> dict:
        out = {"case": self.case}
        if self.witness:
            out["perm"], out["swaps"] = list(self.witness[0]), list(self.witness[1])
        return out


def _edge_witness(edge_choice, slot: int):
    """Arrangement sending the edge (choice, choice with `slot` flipped) to (a1 b2 b3, b1 b2 b3)."""
    others = [i for i in range(3) if i != slot]
    perm = (slot, *others)
    swaps = (edge_choice[slot] == 1, *(edge_choice[i] == 0 for i in others))
    return perm, swaps


def _flip(choice, i):
    c = list(choice)
    c[i] ^= 1
    return tuple(c)


def _antipode(choice):
    return tuple(1 - c for c in choice)


def good_place_classify(D: TripleLocalDatum) -> GoodPlaceVerdict:
    if D.kind != "split":
        raise ValueError("good-place classification needs a split datum")
    q, w = D.q, D.w
    t = _target(q, -w)
    if D.omega == _target(q, -2 * w):
        raise ValueError("precondition: the central character value must differ from q^-w")
    prods = {c: _product(D, c) for c in _CHOICES}

    def case1(choice, slot):
        perm, swaps = _edge_witness(choice, slot)
        A = arrange(D, perm, swaps)
        S1, S2, S3 = A.satake
        val = (t - S1.alpha * S2.beta * S3.beta) * (t - S1.beta * S2.beta * S3.beta)
        if val.is_zero():
            raise InternalConsistencyError("witness arrangement does not certify case 1")
        return GoodPlaceVerdict(1, (perm, swaps), A)

    hits = [c for c in _CHOICES if prods[c] == t]
    if not hits:
        return case1((0, 1, 1), 0)
    bases = [hits[0]]
    seen = set()
    while bases:
        c = bases.pop(0)
        if c in seen:
            continue
        seen.add(c)
        anti = _antipode(c)
        if prods[anti] == t:
            raise InternalConsistencyError("both a product and its complement equal q^(-w/2)")
        nbrs = [_flip(anti, i) for i in range(3)]
        for i, nb in enumerate(nbrs):
            if prods[nb] != t:
                return case1(anti, i)
        bases.extend(nbrs)
    for S in D.satake:
        if not (S.alpha + S.beta).is_zero():
            raise InternalConsistencyError("case 2 reached without alpha_i + beta_i = 0")
    if D.omega ** 2 != _target(q, -4 * w):
        raise InternalConsistencyError("case 2 reached without omega^2 = q^(-2w)")
    return GoodPlaceVerdict(2)


def brute_force_case(D: TripleLocalDatum) -> int:
    """1 if some pair of products differing in one slot both avoid q^(-w/2), else 2."""
    t = _target(D.q, -D.w)
    prods = {c: _product(D, c) for c in _CHOICES}
    for c in _CHOICES:
        for i in range(3):
            if prods[c] != t and prods[_flip(c, i)] != t:
                return 1
    return 2


def prop_product(D: TripleLocalDatum, which: int, m) -> tuple[ScalarK, tuple]:
    """The four-factor products at s = m; which = 1 or 2."""
    S1, S2, S3 = D.satake
    t = _target(D.q, int(2 * Fraction(m)) - 1)
    a1, b1, a2, b2, a3, b3 = S1.alpha, S1.beta, S2.alpha, S2.beta, S3.alpha, S3.beta
    if which == 1:
        cs = (a1 * b2 * b3, b1 * b2 * b3, a1 * a2 * b3, b1 * a2 * b3)
    elif which == 2:
        cs = (a1 * b2 * b3, b1 * b2 * b3, b1 * a2 * b3, b1 * b2 * a3)
    else:
        raise ValueError("which must be 1 or 2")
    val = ONE
    for c in cs:
        val = val * (t - c)
    return val, cs


@dataclass(frozen=True)
class NonvanishingChoice:
    which: int
    gamma: str
    perm: tuple
    swaps: tuple
    arranged: TripleLocalDatum
    value: ScalarK


def _half(m) -> int:
    h = 2 * Fraction(m)
    if h.denominator != 1:
        raise ValueError("m must be a half-integer")
    return int(h)


def nonvanishing_select(D: TripleLocalDatum, m) -> NonvanishingChoice:
    """Pick the explicit zeta integral that is nonzero at s = m, following the case analysis."""
    verdict = good_place_classify(D)
    if verdict.case != 1:
        raise ValueError("precondition: case 1 of the good-place dichotomy")
    perm, swaps = verdict.witness
    A = verdict.arranged
    S1, S2, S3 = A.satake
    t = _target(A.q, _half(m) - 1)
    a1, b1, a2, b3 = S1.alpha, S1.beta, S2.alpha, S3.beta
    hit_a = a1 * a2 * b3 == t
    hit_b = b1 * a2 * b3 == t
    if hit_a and hit_b:
        # gamma = beta2 alpha3: the first product with slots 2 and 3 exchanged
        which, label, extra_perm, extra_swaps = 1, "beta2*alpha3", (0, 2, 1), (False, False, False)
    elif hit_a:
        which, label, extra_perm, extra_swaps = 2, "beta1", (0, 1, 2), (False, False, False)
    elif hit_b:
        which, label, extra_perm, extra_swaps = 2, "alpha1", (0, 1, 2), (True, False, False)
    else:
        which, label, extra_perm, extra_swaps = 1, "alpha2*beta3", (0, 1, 2), (False, False, False)
    B = arrange(A, extra_perm, extra_swaps)
    value, _ = prop_product(B, which, m)
    if value.is_zero():
        raise InternalConsistencyError("selected product vanishes")
    total_perm = tuple(perm[extra_perm[r]] for r in range(3))
    total_swaps = tuple(swaps[extra_perm[r]] ^ extra_swaps[r] for r in range(3))
    return NonvanishingChoice(which, label, total_perm, total_swaps, B, value)


@dataclass(frozen=True)
class FudgeRelation:
    unit: ScalarK
    zeta_value: ScalarK
    product: ScalarK
    constant: ScalarK
    character_monomial: ScalarK
    l_values: tuple
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "unit": self.unit.serialize(), "zeta_value": self.zeta_value.serialize(),
            "product": self.product.serialize(), "constant": self.constant.serialize(),
            "character_monomial": self.character_monomial.serialize(),
            "l_values": [x.serialize() for x in self.l_values], "verdict": self.verdict,
        }


def prop_fudge_relation(variant, D: TripleLocalDatum, m) -> FudgeRelation:
    """u with closed form at s = m equal to u times the four-factor product, plus its factorization.

    Each inverse gamma factor at s = m equals -c^{-1} (q^{m-1/2} - c) L(m + 1/2, c), so u is a
    q-power times a character monomial times four GL1 L-values.
    """
    v = _variant_id(variant)
    q = D.q
    half = _half(m)
    X = _target(q, -half)
    S1, S2, S3 = D.satake
    prod, cs = prop_product(D, v, m)
    if prod.is_zero():
        raise ZeroDivisionError("the four-factor product vanishes at this point")
    inv_sqrt = _target(q, -1 - half)  # q^{-1/2-m}
    lvals = []
    for c in cs:
        den = 1 - c * inv_sqrt
        if den.is_zero():
            raise ZeroDivisionError("an L-factor has a pole at s = m; outside the applicable range")
        lvals.append(den.inv())
    zeta = zeta_closed_form(v, D).evaluate(X)
    unit = zeta / prod
    measure = K((1 + Fraction(1, q)) ** -2)
    if v == 1:
        constant = measure * q_pow(q, -6)
        mono = (S2.alpha * S3.beta) ** 2 * (S2.beta * S3.alpha) ** -2
    else:
        constant = measure * q_pow(q, -3)
        mono = ONE
    for c in cs:
        mono = mono * (-c.inv())
    structural = constant * mono
    for L in lvals:
        structural = structural * L
    return FudgeRelation(unit, zeta, prod, constant, mono, tuple(lvals),
                         (not unit.is_zero()) and unit == structural)


# ---------------------------------------------------------------------------
# verification report
# ---------------------------------------------------------------------------

def verification_report(variant, D: TripleLocalDatum, order: int = 10, N: int = 40) -> dict:
    v = _variant_id(variant)
    Z = zeta_input(v, D)
    closed = zeta_closed_form(v, D)
    reduced = zeta_reduced_eval(Z, N)
    oracle = zeta_oracle(Z, order, N)
    expanded = series_expand(closed, order)
    agree_reduced = reduced == closed
    agree_oracle = oracle.equals_to_order(expanded, order)
    return {
        "variant": v,
        "q": D.q,
        "sample": [[S.alpha.serialize(), S.beta.serialize()] for S in D.satake],
        "truncation": order,
        "closed_form": closed.serialize(),
        "reduced": reduced.serialize(),
        "oracle": {str(k): c.serialize() for k, c in sorted(oracle.as_dict().items())},
        "agree_reduced": agree_reduced,
        "agree_oracle": agree_oracle,
        "verdict": agree_reduced and agree_oracle,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def random_split_datum(rng, q: int, w: int = 0, height: int = 9) -> TripleLocalDatum:
    return TripleLocalDatum("split", tuple(random_satake(rng, q, height) for _ in range(3)), q, w)
