"""Asai-cube local factors, archimedean Gamma data, critical points and the Sym^3 factorization.

Tensor basis: e_{i1} (x) e_{i2} (x) e_{i3} with i_k in {0, 1} (0 -> alpha, 1 -> beta) sits at
index 4*i1 + 2*i2 + i3, so the first slot is the most significant bit.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .algebra import ONE, ZERO, ExactScalar, IdentityVerdict, K, RatFnX, ScalarK, random_rational, spec_identity_test
from .gl2local import HeckePoly, SatakeGL2

Matrix = list  # list of rows of ScalarK

SPLITTINGS = ("split", "partial", "inert")


# ---------------------------------------------------------------------------
# small dense linear algebra over ScalarK
# ---------------------------------------------------------------------------

def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, m, r = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            acc = ZERO
            for k in range(m):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def kron(a: Matrix, b: Matrix) -> Matrix:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def diag2(S: SatakeGL2) -> Matrix:
    return [[S.alpha, ZERO], [ZERO, S.beta]]


def to_matrix(rows) -> Matrix:
    return [[K(x) for x in row] for row in rows]


def slot_permutation(perm: Sequence[int]) -> Matrix:
    """P with P(v_0 (x) v_1 (x) v_2) = v_{perm[0]} (x) v_{perm[1]} (x) v_{perm[2]}."""
    P = [[ZERO] * 8 for _ in range(8)]
    for bits in itertools.product((0, 1), repeat=3):
        src = 4 * bits[0] + 2 * bits[1] + bits[2]
        out = [bits[perm[k]] for k in range(3)]
        P[4 * out[0] + 2 * out[1] + out[2]][src] = ONE
    return P


SWAP12 = slot_permutation((1, 0, 2))
CYCLE = slot_permutation((2, 0, 1))  # v1 (x) v2 (x) v3 -> v3 (x) v1 (x) v2


def charpoly_reversed(M: Matrix) -> list[ScalarK]:
    """Coefficients c_0..c_n of det(1 - X M) via Faddeev-LeVerrier."""
    n = len(M)
    c = [ONE]
    Mk = identity(n)
    coeff = ONE
    for k in range(1, n + 1):
        AM = matmul(M, Mk)
        tr = ZERO
        for i in range(n):
            tr = tr + AM[i][i]
        coeff = -(tr * Fraction(1, k))
        # det(lambda - M) = sum a_k lambda^{n-k}; det(1 - X M) = sum a_k X^k
        c.append(coeff)
        Mk = [[AM[i][j] + (coeff if i == j else ZERO) for j in range(n)] for i in range(n)]
    return c


# ---------------------------------------------------------------------------
# local data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TripleLocalDatum:
    """Unramified data at one finite place.

    split:   satake = (S1, S2, S3) over the residue field of size q;
    partial: satake = (H, G) with H over the quadratic extension and G over F;
    inert:   satake = (H,) over the cubic extension.
    """

    kind: str
    satake: tuple
    q: int
    w: int = 0

    def __post_init__(self):
        if self.kind not in SPLITTINGS:
            raise ValueError(f"unknown splitting type {self.kind!r}")
        need = {"split": 3, "partial": 2, "inert": 1}[self.kind]
        if len(self.satake) != need:
            raise ValueError(f"{self.kind} datum needs {need} Satake entries")
        object.__setattr__(self, "satake", tuple(self.satake))

    @property
    def omega(self) -> ScalarK:
        """Central character value at varpi (split case)."""
        out = ONE
        for S in self.satake:
            out = out * S.omega
        return out

    def galois(self, k: int) -> TripleLocalDatum:
        return TripleLocalDatum(self.kind, tuple(S.galois(k) for S in self.satake), self.q, self.w)


def asai_matrix(D: TripleLocalDatum) -> Matrix:
    one = identity(2)
    if D.kind == "split":
        S1, S2, S3 = D.satake
        return kron(kron(diag2(S1), diag2(S2)), diag2(S3))
    if D.kind == "partial":
        H, G = D.satake
        return matmul(kron(kron(diag2(H), one), diag2(G)), SWAP12)
    (H,) = D.satake
    return matmul(kron(kron(diag2(H), one), one), CYCLE)


def lfactor_from_matrix(M: Matrix) -> RatFnX:
    return 1 / RatFnX(charpoly_reversed(M))


def asai_lfactor(D: TripleLocalDatum) -> RatFnX:
    """det(1 - X M)^{-1} with X = q^{-s}."""
    return lfactor_from_matrix(asai_matrix(D))


def asai_lfactor_companion(polys: Sequence[HeckePoly], scales: Sequence = (1, 1, 1)) -> RatFnX:
    """Split factor det(1 - X (c1 C1) (x) (c2 C2) (x) (c3 C3))^{-1} from Hecke companion matrices.

    No roots are extracted; scales carry the normalization of each form.
    """
    M = [[ONE]]
    for P, c in zip(polys, scales):
        C = [[K(x) * K(c) for x in row] for row in P.companion()]
        M = kron(M, C)
    return lfactor_from_matrix(M)


# ---------------------------------------------------------------------------
# archimedean data and critical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArchWeightData:
    """Weights (k1, k2, k3) at each real place and the global weight w with |omega| = |.|^w."""

    weights: tuple
    w: int
    twists: tuple | None = None

    def __post_init__(self):
        weights = tuple(tuple(int(k) for k in kap) for kap in self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise ValueError("at least one real place is required")
        for kap in weights:
            if len(kap) != 3 or min(kap) < 2:
                raise ValueError(f"weights must be three integers >= 2, got {kap}")
            if (sum(kap) - self.w) % 2:
                raise ValueError(f"parity: k1+k2+k3 = {sum(kap)} and w = {self.w} differ mod 2")
        if self.twists is not None:
            twists = tuple(tuple(int(t) for t in tw) for tw in self.twists)
            object.__setattr__(self, "twists", twists)
            for kap, tw in zip(weights, twists):
                if any((k - t) % 2 for k, t in zip(kap, tw)):
                    raise ValueError(f"twist parity mismatch at {kap}: {tw}")
                if sum(tw) != self.w:
                    raise ValueError(f"twists {tw} do not sum to w = {self.w}")

    def balanced(self, place: int = 0) -> bool:
        kap = self.weights[place]
        return sum(kap) > 2 * max(kap)

    def gap(self, place: int) -> int:
        """k1 + k2 + k3 - 2 max."""
        kap = self.weights[place]
        return sum(kap) - 2 * max(kap)


@dataclass(frozen=True)
class GammaCFactor:
    """prod_j Gamma_C(s + shift_j) with Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)."""

    shifts: tuple

    def __post_init__(self):
        shifts = tuple(sorted((Fraction(x) for x in self.shifts), reverse=True))
        for x in shifts:
            if (2 * x).denominator != 1:
                raise ValueError("shifts must be half-integers")
        object.__setattr__(self, "shifts", shifts)

    def poles_at(self, s) -> bool:
        s = Fraction(s)
        return any((s + mu).denominator == 1 and s + mu <= 0 for mu in self.shifts)

    def evaluate(self, s, dps: int = 30):
        with mpmath.workdps(dps):
            out = mpmath.mpf(1)
            for mu in self.shifts:
                z = mpmath.mpf(s) + mpmath.mpf(mu.numerator) / mu.denominator
                out *= 2 * (2 * mpmath.pi) ** (-z) * mpmath.gamma(z)
            return out


def arch_shifts(kappa: Sequence[int], w: int) -> tuple[Fraction, ...]:
    k1, k2, k3 = kappa
    half_w = Fraction(w, 2)
    return tuple(Fraction(x, 2) + half_w for x in (k1 + k2 + k3 - 3, k1 + k2 - k3 - 1, k1 + k3 - k2 - 1, k2 + k3 - k1 - 1))


def arch_factor(W: ArchWeightData, place: int = 0, check_balanced: bool = True) -> tuple[GammaCFactor, ExactScalar]:
    """Gamma_C shifts and epsilon i^{2(k1+k2+k3)-3} at one real place."""
    kap = W.weights[place]
    if check_balanced and not W.balanced(place):
        raise ValueError(f"weights {kap} are not balanced; the archimedean formula needs k1+k2+k3 > 2 max")
    eps = ExactScalar(Fraction(1), 0, 2 * sum(kap) - 3)
    return GammaCFactor(arch_shifts(kap, W.w)), eps


@functools.lru_cache(maxsize=None)
def _interval_points(gap: int, w: int) -> frozenset:
    """m + 1/2 with -gap/2 + 1 <= m + w/2 <= gap/2 - 1, i.e. 2 - gap <= 2m + w <= gap - 2."""
    lo = math.ceil(Fraction(2 - gap - w, 2))
    hi = math.floor(Fraction(gap - 2 - w, 2))
    return frozenset(Fraction(2 * m + 1, 2) for m in range(lo, hi + 1))


def _critical_closed_form(W: ArchWeightData) -> set[Fraction]:
    # the intersection over places of nested symmetric intervals is the one with the smallest gap
    return set(_interval_points(min(W.gap(v) for v in range(len(W.weights))), W.w))


@functools.lru_cache(maxsize=None)
def _pole_free_points(kappa: tuple, w: int) -> frozenset:
    """s = m + 1/2 where neither L(s, Pi_v, As) nor L(1 - s, dual, As) has a Gamma_C pole."""
    L, _ = arch_factor(ArchWeightData((kappa,), w))
    dual = GammaCFactor(arch_shifts(kappa, -w))
    bound = sum(kappa) + abs(w) + 4
    out = set()
    for m in range(-bound, bound + 1):
        s = Fraction(m) + Fraction(1, 2)
        if not L.poles_at(s) and not dual.poles_at(1 - s):
            out.add(s)
    return frozenset(out)


def _critical_pole_based(W: ArchWeightData) -> set[Fraction]:
    out = None
    for kap in W.weights:
        pts = _pole_free_points(kap, W.w)
        out = set(pts) if out is None else out & pts
    return out


def critical_points(W: ArchWeightData, mode: str = "closed-form") -> set[Fraction]:
    """Critical points m + 1/2 of the triple product L-function.

    Both modes return the empty set if some place is unbalanced: the characterization
    is stated for balanced weights only.
    """
    if not all(W.balanced(v) for v in range(len(W.weights))):
        return set()
    if mode == "closed-form":
        return _critical_closed_form(W)
    if mode == "pole-based":
        return _critical_pole_based(W)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Kim-Shahidi bound and Sym^3
# ---------------------------------------------------------------------------

def ks_check(D: TripleLocalDatum, dps: int = 40) -> bool:
    """q^{-1/2} < q^{w/2} |a1 a2 a3| < q^{1/2} for all eight Satake products."""
    if D.kind != "split":
        raise ValueError("ks_check needs split data")
    q = D.q
    for a, b, c in itertools.product(*[(S.alpha, S.beta) for S in D.satake]):
        prod = a * b * c
        # compare q^w |prod|^2 with q^{-1}, q^{+1}; exact when the product is real-valued
        sq = prod * prod.conj()
        scaled = sq * ScalarK.q_power(q, 2 * D.w)
        if scaled == K(Fraction(1, q)) or scaled == K(q):
            return False
        with mpmath.workdps(dps):
            val = abs(scaled.to_mpc(dps))
            if not (mpmath.mpf(1) / q < val < q):
                return False
    return True


@dataclass
class Sym3Verdict:
    passed: bool
    triple: RatFnX
    sym3: RatFnX
    twisted: RatFnX
    identity: IdentityVerdict | None = None
    degrees: tuple = field(default=(8, 4, 2))

    def __bool__(self):
        return self.passed


def sym3_lfactor(S: SatakeGL2, chi=ONE) -> RatFnX:
    a, b, c = S.alpha, S.beta, K(chi)
    out = RatFnX.const(1)
    for x in (a ** 3, a * a * b, a * b * b, b ** 3):
        out = out * (1 / (1 - RatFnX.monomial(x * c, 1)))
    return out


def twisted_central_lfactor(S: SatakeGL2, chi=ONE) -> RatFnX:
    """L(s, Pi (x) chi omega_Pi)."""
    t = K(chi) * S.omega
    return 1 / ((1 - RatFnX.monomial(S.alpha * t, 1)) * (1 - RatFnX.monomial(S.beta * t, 1)))


def sym3_triple(S: SatakeGL2, chi=ONE) -> TripleLocalDatum:
    return TripleLocalDatum("split", (S, S, S.twist(chi)), S.q, 0)


def sym3_factor_check(S: SatakeGL2, chi=ONE, samples: int = 8, rng: random.Random | None = None) -> Sym3Verdict:
    """L(s, Pi x Pi x Pi(x)chi) = L(s, Pi, Sym^3 (x) chi) L(s, Pi (x) chi omega)^2.

    The given datum is checked exactly; the identity as a polynomial identity in
    (alpha, beta, chi) is checked on random rational specializations.
    """
    triple = asai_lfactor(sym3_triple(S, chi))
    sym3 = sym3_lfactor(S, chi)
    twisted = twisted_central_lfactor(S, chi)
    ok = triple == sym3 * twisted * twisted

    def lhs(pt):
        return asai_lfactor(sym3_triple(SatakeGL2(pt["a"], pt["b"], S.q), pt["c"]))

    def rhs(pt):
        T = SatakeGL2(pt["a"], pt["b"], S.q)
        tw = twisted_central_lfactor(T, pt["c"])
        return sym3_lfactor(T, pt["c"]) * tw * tw

    verdict = spec_identity_test(lhs, rhs, samples, symbols=("a", "b", "c"), rng=rng or random.Random(1))
    return Sym3Verdict(ok and verdict.passed, triple, sym3, twisted, verdict)


def sym_cube_matrix(g) -> Matrix:
    """Action of g on binary cubic forms in the basis x^3, x^2 y, x y^2, y^3."""
    (a, b), (c, d) = g
    # x -> a x + c y, y -> b x + d y
    cols = []
    for i in range(4):
        # x^(3-i) y^i
        poly = [Fraction(1)]
        for lin in [(a, c)] * (3 - i) + [(b, d)] * i:
            nxt = [Fraction(0)] * (len(poly) + 1)
            for j, co in enumerate(poly):
                nxt[j] += co * lin[0]      # times x: y-degree unchanged
                nxt[j + 1] += co * lin[1]  # times y
            poly = nxt
        cols.append(poly)
    return to_matrix([[cols[j][i] for j in range(4)] for i in range(4)])


def sym3_companion_check(P: HeckePoly, chi=1) -> Sym3Verdict:
    """The cube factorization from the Hecke polynomial alone, without extracting roots."""
    chi = Fraction(chi)
    C = P.companion()
    twisted = HeckePoly(P.p, P.trace * chi, P.det * chi * chi, P.weight)
    triple = asai_lfactor_companion((P, P, twisted))
    sym3 = lfactor_from_matrix(matmul(sym_cube_matrix(C), to_matrix([[chi if i == j else 0 for j in range(4)]
                                                                      for i in range(4)])))
    t = chi * P.det
    tw = lfactor_from_matrix(to_matrix([[x * t for x in row] for row in C]))
    return Sym3Verdict(triple == sym3 * tw * tw, triple, sym3, tw)


def random_satake(rng: random.Random, q: int, height: int = 9) -> SatakeGL2:
    return SatakeGL2(K(random_rational(rng, height)), K(random_rational(rng, height)), q)
