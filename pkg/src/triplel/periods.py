"""Transcendence bookkeeping: Gamma_C values, archimedean gamma ratios, Gauss sums and period monomials.

Period identities are checked modulo rational numbers and the Galois-equivariant
algebraic relations among Gauss sums and Petersson norms (see gauss_symbol).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .algebra import ONE, ZERO, ExactScalar, ScalarK, _reduce, cyclotomic_coeffs
from .asai import ArchWeightData, arch_factor, arch_shifts, critical_points

__all__ = [
    "ExactScalar", "PeriodMonomial", "gammaC_eval", "arch_gamma_ratio_check", "DirichletCharacter",
    "all_characters", "gauss_sum", "RootSum", "gauss_root_sum", "tate_epsilon", "gammaC_product", "gauss_galois_check", "gauss_ratio_galois_check", "ledger_check",
]


# ---------------------------------------------------------------------------
# Gamma_C at integers and half-integers
# ---------------------------------------------------------------------------

def _gamma_exact(k: Fraction) -> ExactScalar:
    """Gamma(k) for k an integer > 0 or a half-integer, as rational * pi^{0 or 1/2}."""
    if k.denominator == 1:
        if k <= 0:
            raise ValueError(f"Gamma has a pole at {k}")
        return ExactScalar(Fraction(math.factorial(int(k) - 1)))
    if k.denominator != 2:
        raise ValueError(f"Gamma argument {k} is not a half-integer")
    n = int(k - Fraction(1, 2))
    if n >= 0:
        r = Fraction(math.factorial(2 * n), 4 ** n * math.factorial(n))
    else:
        n = -n
        r = Fraction((-4) ** n * math.factorial(n), math.factorial(2 * n))
    return ExactScalar(r, Fraction(1, 2))


def gammaC_eval(k) -> ExactScalar:
    """Gamma_C(k) = 2 (2 pi)^{-k} Gamma(k)."""
    k = Fraction(k)
    g = _gamma_exact(k)
    # 2^{-k}: integer part into r, a leftover 2^{-1/2} = sqrt2 / 2
    fl = math.floor(k)
    two_pow = ExactScalar(Fraction(2) ** (-fl))
    if k != fl:
        two_pow = two_pow * ExactScalar(Fraction(1, 2), 0, 0, 1)
    return ExactScalar(Fraction(2)) * two_pow * ExactScalar(Fraction(1), -k) * g


def gammaC_product(shifts, s) -> ExactScalar:
    out = ExactScalar(Fraction(1))
    for mu in shifts:
        out = out * gammaC_eval(Fraction(s) + mu)
    return out


@dataclass
class GammaRatioVerdict:
    passed: bool
    value: ExactScalar
    exponent: Fraction
    expected: int
    remainder: ExactScalar

    def __bool__(self):
        return self.passed


def arch_gamma_ratio_check(W: ArchWeightData, m: int, d: int | None = None,
                           epsilon: ExactScalar | None = None) -> GammaRatioVerdict:
    """prod_v eps_v L(1 - s, dual) / L(s) at s = m + 1/2, tested against (2 pi i)^{8dm + 4dw} Q^x.

    `epsilon` overrides the per-place root number (used for diagnostics and negative controls).
    """
    d = len(W.weights) if d is None else d
    if d != len(W.weights):
        raise ValueError("d must equal the number of real places")
    s = Fraction(m) + Fraction(1, 2)
    if s not in critical_points(W, "pole-based"):
        raise ValueError(f"s = {s} is not critical for {W.weights}, w = {W.w}")
    total = ExactScalar(Fraction(1))
    for v, kap in enumerate(W.weights):
        L, eps = arch_factor(W, v)
        dual = arch_shifts(kap, -W.w)
        eps_v = eps if epsilon is None else epsilon
        total = total * eps_v * gammaC_product(dual, 1 - s) / gammaC_product(L.shifts, s)
    expected = 8 * d * m + 4 * d * W.w
    E, rest = total.split_two_pi_i()
    return GammaRatioVerdict(E == expected and rest.is_rational(), total, E, expected, rest)


def tate_epsilon(kappa) -> ExactScalar:
    """Product of the Tate root numbers i^{2b+1} of the four two-dimensional pieces, b the integral shifts."""
    return ExactScalar(Fraction(1), 0, 2 * sum(kappa) - 2)


# ---------------------------------------------------------------------------
# Dirichlet characters and Gauss sums
# ---------------------------------------------------------------------------

def _units(N: int) -> list[int]:
    return [a for a in range(N) if math.gcd(a, N) == 1] if N > 1 else [0]


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(a) = zeta_order^{exps[a]} on (Z/N)^x."""

    N: int
    order: int
    exps: tuple  # pairs (a, exponent mod order), sorted by a

    def __post_init__(self):
        table = dict(self.exps)
        object.__setattr__(self, "exps", tuple(sorted((a % max(self.N, 1), e % self.order) for a, e in table.items())))
        table = dict(self.exps)
        units = _units(self.N)
        if sorted(table) != units:
            raise ValueError("value table must cover exactly (Z/N)^x")
        for a in units:
            for b in units:
                if (table[a] + table[b] - table[(a * b) % max(self.N, 1)]) % self.order:
                    raise ValueError("value table is not multiplicative")

    @classmethod
    def from_table(cls, N: int, order: int, table: Mapping[int, int]) -> DirichletCharacter:
        return cls(N, order, tuple(table.items()))

    @classmethod
    def trivial(cls, N: int) -> DirichletCharacter:
        return cls(N, 1, tuple((a, 0) for a in _units(N)))

    def exponent(self, a: int) -> int:
        return dict(self.exps)[a % max(self.N, 1)]

    def value(self, a: int) -> ScalarK:
        if math.gcd(a, self.N) != 1:
            return ZERO
        return ScalarK.root_of_unity(self.order, self.exponent(a))

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if self.N != other.N:
            raise ValueError("characters must share a modulus")
        L = self.order * other.order // math.gcd(self.order, other.order)
        fa, fb = L // self.order, L // other.order
        return DirichletCharacter(self.N, L, tuple((a, e * fa + other.exponent(a) * fb) for a, e in self.exps))

    def galois(self, k: int) -> DirichletCharacter:
        return DirichletCharacter(self.N, self.order, tuple((a, e * k) for a, e in self.exps))

    def is_primitive(self) -> bool:
        for d in range(1, self.N):
            if self.N % d == 0 and all(self.exponent(a) == 0 for a in _units(self.N) if a % d == 1 % d):
                return False
        return True


def _carmichael(N: int) -> int:
    lam = 1
    for a in _units(N):
        o, x = 1, a % N
        while x != 1 % N:
            x = x * a % N
            o += 1
        lam = lam * o // math.gcd(lam, o)
    return lam


def all_characters(N: int) -> list[DirichletCharacter]:
    """Every Dirichlet character mod N, values in mu_lambda with lambda the group exponent."""
    units = _units(N)
    if N <= 2:
        return [DirichletCharacter.trivial(N)]
    lam = _carmichael(N)
    gens: list[int] = []
    span = {1}
    for a in units:
        if a not in span:
            gens.append(a)
            frontier = set(span)
            while True:
                new = {(x * g) % N for x in frontier for g in gens} | frontier
                if new == frontier:
                    break
                frontier = new
            span = frontier
    out = []

    def extend(assign):
        table = {1: 0}
        queue = [1]
        while queue:
            x = queue.pop()
            for g, e in zip(gens, assign):
                y = (x * g) % N
                val = (table[x] + e) % lam
                if y in table:
                    if table[y] != val:
                        return None
                else:
                    table[y] = val
                    queue.append(y)
        return table

    def rec(i, assign):
        if i == len(gens):
            table = extend(assign)
            if table is not None:
                out.append(DirichletCharacter(N, lam, tuple(table.items())))
            return
        for e in range(lam):
            rec(i + 1, assign + [e])

    rec(0, [])
    return out


@dataclass(frozen=True)
class RootSum:
    """Formal integer combination sum_j c_j zeta_L^j; equality is decided modulo Phi_L."""

    L: int
    coeffs: tuple  # sorted (j, c) with c != 0

    @classmethod
    def build(cls, L: int, pairs) -> RootSum:
        acc: dict = {}
        for j, c in pairs:
            acc[j % L] = acc.get(j % L, 0) + c
        return cls(L, tuple(sorted((j, c) for j, c in acc.items() if c)))

    def lift(self, M: int) -> RootSum:
        if M % self.L:
            raise ValueError("lift target must be a multiple of the level")
        f = M // self.L
        return RootSum(M, tuple((j * f, c) for j, c in self.coeffs))

    def galois(self, k: int) -> RootSum:
        return RootSum.build(self.L, ((j * k, c) for j, c in self.coeffs))

    def rotate(self, j0: int) -> RootSum:
        return RootSum.build(self.L, ((j + j0, c) for j, c in self.coeffs))

    def __mul__(self, other: RootSum) -> RootSum:
        if self.L != other.L:
            raise ValueError("levels differ")
        return RootSum.build(self.L, ((a + b, c * d) for a, c in self.coeffs for b, d in other.coeffs))

    def reduced(self) -> tuple:
        c = [0] * self.L
        for j, v in self.coeffs:
            c[j] += v
        return _reduce(c, self.L) if self.L > 1 else (Fraction(sum(c)),)

    def is_zero(self) -> bool:
        """Exact test Phi_L | sum c_j x^j, by integer long division."""
        if self.L == 1:
            return sum(c for _, c in self.coeffs) == 0
        phi = np.array(cyclotomic_coeffs(self.L), dtype=object)
        d = len(phi) - 1
        c = np.zeros(self.L, dtype=object)
        for j, v in self.coeffs:
            c[j] += v
        for k in range(self.L - 1, d - 1, -1):
            if c[k]:
                c[k - d:k + 1] -= c[k] * phi
        return not c[:d].any()

    def __sub__(self, other: RootSum) -> RootSum:
        L = math.lcm(self.L, other.L)
        a, b = self.lift(L), other.lift(L)
        return RootSum.build(L, list(a.coeffs) + [(j, -c) for j, c in b.coeffs])

    def __eq__(self, other):
        if not isinstance(other, RootSum):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.reduced())

    def to_scalar(self) -> ScalarK:
        return ScalarK(self.L, self.reduced())


@functools.lru_cache(maxsize=None)
def gauss_root_sum(chi: DirichletCharacter, level: int | None = None) -> RootSum:
    """G(chi) as a formal sum of level-L roots of unity, L = lcm(N, order) unless given."""
    L = level or _galois_level(chi)
    if chi.N == 1:
        return RootSum.build(L, [(0, 1)])
    fo, fn = L // chi.order, L // chi.N
    return RootSum.build(L, ((chi.exponent(a) * fo + a * fn, 1) for a in _units(chi.N)))


def gauss_sum(chi: DirichletCharacter) -> ScalarK:
    """sum_{a mod N, (a, N) = 1} chi(a) zeta_N^a."""
    if chi.N == 1:
        return ONE
    return gauss_root_sum(chi).to_scalar()


def _galois_level(chi: DirichletCharacter) -> int:
    return chi.N * chi.order // math.gcd(chi.N, chi.order)


def gauss_galois_check(chi: DirichletCharacter, k: int) -> bool:
    """sigma_k(G(chi)) = (sigma_k chi)(k)^{-1} G(sigma_k chi) for the cyclotomic map zeta -> zeta^k."""
    L = _galois_level(chi)
    if math.gcd(k, L) != 1:
        raise ValueError("k must be a unit modulo the field level")
    lhs = gauss_root_sum(chi).galois(k)
    sc = chi.galois(k)
    rhs = gauss_root_sum(sc, L)
    if chi.N > 1:
        rhs = rhs.rotate(-sc.exponent(k) * (L // sc.order))
    return lhs == rhs


def gauss_ratio_galois_check(chi: DirichletCharacter, chi2: DirichletCharacter, k: int) -> bool:
    """sigma(G(chi chi')) G(s chi) G(s chi') = G(s chi s chi') sigma(G(chi) G(chi')), cleared of denominators."""
    prod = chi * chi2
    L = math.lcm(_galois_level(prod), _galois_level(chi), _galois_level(chi2))
    if math.gcd(k, L) != 1:
        raise ValueError("k must be a unit modulo the field level")

    def G(c):
        return gauss_root_sum(c, L)

    lhs = G(prod).galois(k) * G(chi.galois(k)) * G(chi2.galois(k))
    rhs = G(chi.galois(k) * chi2.galois(k)) * G(chi).galois(k) * G(chi2).galois(k)
    return lhs == rhs


# ---------------------------------------------------------------------------
# period monomials and the ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodMonomial:
    """coeff * prod symbol^exponent; symbols are plain strings."""

    coeff: ExactScalar = field(default_factory=lambda: ExactScalar(Fraction(1)))
    symbols: tuple = ()

    def __post_init__(self):
        clean = {}
        for name, e in dict(self.symbols).items():
            if e:
                clean[name] = e
        object.__setattr__(self, "symbols", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, coeff: ExactScalar | None = None, **exps) -> PeriodMonomial:
        return cls(coeff or ExactScalar(Fraction(1)), tuple(exps.items()))

    @classmethod
    def sym(cls, name: str, e: int = 1) -> PeriodMonomial:
        return cls(ExactScalar(Fraction(1)), ((name, e),))

    @classmethod
    def two_pi_i(cls, k) -> PeriodMonomial:
        return cls(ExactScalar.two_pi_i(k))

    @classmethod
    def i_power(cls, k) -> PeriodMonomial:
        return cls(ExactScalar(Fraction(1), 0, k))

    def exps(self) -> dict:
        return dict(self.symbols)

    def __mul__(self, other: PeriodMonomial) -> PeriodMonomial:
        e = self.exps()
        for k, v in other.symbols:
            e[k] = e.get(k, 0) + v
        return PeriodMonomial(self.coeff * other.coeff, tuple(e.items()))

    def inv(self) -> PeriodMonomial:
        return PeriodMonomial(self.coeff.inv(), tuple((k, -v) for k, v in self.symbols))

    def __truediv__(self, other: PeriodMonomial) -> PeriodMonomial:
        return self * other.inv()

    def __pow__(self, k: int) -> PeriodMonomial:
        return PeriodMonomial(self.coeff ** k, tuple((n, v * k) for n, v in self.symbols))

    def class_key(self) -> tuple:
        """Invariants of the class modulo Q^x."""
        c = self.coeff
        return (c.pi, c.i, c.sqrt2, self.symbols)

    def equivalent(self, other: PeriodMonomial) -> bool:
        return self.class_key() == other.class_key()


ONE_P = PeriodMonomial()


def gauss_symbol(**char_exps) -> PeriodMonomial:
    """G(prod chi^e), reduced with G(chi chi') ~ G(chi) G(chi') and G(chi^{-1}) ~ G(chi)^{-1}."""
    out = ONE_P
    for name, e in char_exps.items():
        out = out * PeriodMonomial.sym(f"G({name})", e)
    return out


def discriminant_symbol(e: int) -> PeriodMonomial:
    """(|D_F|^{1/2})^e; even powers are rational and drop out."""
    return PeriodMonomial.sym("|D_F|^(1/2)", e % 2)


def triple_period(kappas, w: int, omega_chars: Mapping[str, int], norm: PeriodMonomial,
                  field_exponent: int = 0) -> PeriodMonomial:
    """(|D_E|/|D_F|)^{1/2} (2 pi i)^{sum_v (k1+k2+k3+2w+2)} i^{dw} G(omega)^2 ||f||."""
    d = len(kappas)
    E = sum(sum(k) + 2 * w + 2 for k in kappas)
    return (discriminant_symbol(field_exponent) * PeriodMonomial.two_pi_i(E) * PeriodMonomial.i_power(d * w)
            * gauss_symbol(**{k: 2 * v for k, v in omega_chars.items()}) * norm)


@dataclass
class LedgerVerdict:
    identity: str
    passed: bool
    lhs: PeriodMonomial
    rhs: PeriodMonomial
    detail: str = ""

    def __bool__(self):
        return self.passed


KNOWN_IDENTITIES = ("left-half-FE", "sym3-period", "deligne-normalization")


def _left_half(d: int, w: int, m: int, kappa) -> LedgerVerdict:
    kappas = [tuple(kappa)] * d
    norm = PeriodMonomial.sym("||f_Pi||")
    p = triple_period(kappas, w, {"omega": 1}, norm)
    # dual: same weights, w -> -w, omega -> omega^{-1}, ||f_dual|| = ||f_Pi||
    p_dual = triple_period(kappas, -w, {"omega": -1}, norm)
    # L(m+1/2) = eps_f gamma_inf L(-m+1/2, dual), eps_f ~ G(omega)^4, gamma_inf ~ (2 pi i)^{8dm+4dw}
    lhs = PeriodMonomial.two_pi_i(4 * d * m) * p
    rhs = (gauss_symbol(omega=4) * PeriodMonomial.two_pi_i(8 * d * m + 4 * d * w)
           * PeriodMonomial.two_pi_i(-4 * d * m) * p_dual)
    first = p.equivalent(PeriodMonomial.two_pi_i(4 * d * w) * gauss_symbol(omega=4) * p_dual)
    return LedgerVerdict("left-half-FE", first and lhs.equivalent(rhs), lhs, rhs,
                         "p(Pi) vs (2 pi i)^{4dw} G(omega)^4 p(dual), then the full functional-equation chain")


def _twist(d: int, w: int, kappa, eta_trivial: bool) -> LedgerVerdict:
    kappas = [tuple(kappa)] * d
    norm = PeriodMonomial.sym("||f_Pi||")
    p = triple_period(kappas, w, {"omega": 1}, norm)
    # Pi (x) eta: omega -> omega eta^2, ||f_{Pi (x) eta}|| ~ ||f_Pi||
    eta = {} if eta_trivial else {"eta": 2}
    p_tw = triple_period(kappas, w, {"omega": 1, **eta}, norm)
    rhs = (ONE_P if eta_trivial else gauss_symbol(eta=4)) * p
    return LedgerVerdict("sym3-period", p_tw.equivalent(rhs), p_tw, rhs,
                         "p(Pi (x) eta) vs G(eta)^4 p(Pi)")


def _deligne(d: int, w: int, m: int, kappa: int, sgn_chi: int) -> LedgerVerdict:
    eps = (-1) ** (m % 2) * sgn_chi
    p_eps = PeriodMonomial.sym(f"p(Pi,{'+' if eps > 0 else '-'})")
    p_neg = PeriodMonomial.sym(f"p(Pi,{'-' if eps > 0 else '+'})")
    norm = PeriodMonomial.sym("||f_Pi||")
    # triple Pi x Pi x Pi(x)chi: weights (k,k,k), total weight 3w, central character omega^3 chi^2
    p_triple = triple_period([(kappa,) * 3] * d, 3 * w, {"omega": 3, "chi": 2}, norm ** 3, field_exponent=2 * d)
    L_triple = PeriodMonomial.two_pi_i(4 * d * m) * p_triple
    # L(m+1/2, Pi (x) chi omega) = L(m+w+1/2, Pi (x) chi omega^0); sign (-1)^{m+w} sgn(chi omega^0) = eps
    m2 = m + w
    L_std = (PeriodMonomial.two_pi_i(d * m2 + Fraction(d * (kappa + w), 2)) * gauss_symbol(chi=1, omega=1) * p_eps)
    sym3 = L_triple / (L_std ** 2)
    # product relation p(eps) p(-eps) ~ (2 pi i)^d i^{dw} G(omega) ||f||, used to remove p(eps)
    p_eps_value = PeriodMonomial.two_pi_i(d) * PeriodMonomial.i_power(d * w) * gauss_symbol(omega=1) * norm / p_neg
    e = sym3.exps().pop(p_eps.symbols[0][0], 0)
    sym3 = sym3 / (p_eps ** e) * (p_eps_value ** e)
    conj = (PeriodMonomial.two_pi_i(2 * d * m + d * (2 * kappa + 3 * w)) * PeriodMonomial.i_power(d * w)
            * gauss_symbol(chi=2, omega=2) * p_neg ** 2 * norm)
    return LedgerVerdict("deligne-normalization", sym3.equivalent(conj), sym3, conj,
                         "triple period / Shimura periods squared vs the conjectural normalization")


def ledger_check(identity: str, d: int = 1, w: int = 0, m: int = 0, kappa=(4, 4, 4),
                 sgn_chi: int = 1, eta_trivial: bool = False) -> LedgerVerdict:
    if identity not in KNOWN_IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; known: {', '.join(KNOWN_IDENTITIES)}")
    if identity == "left-half-FE":
        return _left_half(d, w, m, kappa)
    if identity == "sym3-period":
        return _twist(d, w, kappa, eta_trivial)
    k = kappa if isinstance(kappa, int) else kappa[0]
    return _deligne(d, w, m, k, sgn_chi)
