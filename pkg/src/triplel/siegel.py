"""GSp_{2n} elements, big-cell sections f_Phi, degenerate Whittaker values and Eisenstein coefficients over Q."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import ONE, ZERO, ExactScalar, K, RatFnX, ScalarK
from .gl2local import gl1_lfactor
from .localfield import ShellFunction, is_prime, shell_fourier, valuation
from .periods import _gamma_exact

Matrix = tuple  # tuple of row tuples of Fractions

__all__ = [
    "GSpElement", "NotInCell", "gsp_make", "J", "big_cell_decompose", "SchwartzSym3",
    "f_phi_eval", "degenerate_whittaker", "ArchCoefficient", "arch_coeff_constant",
    "PreconditionError", "PrecheckVerdict", "holomorphy_precheck", "eis_fourier_assemble",
    "coefficient_table", "table_to_json", "table_from_json", "is_positive_definite",
    "sym_from_six", "sym_to_six", "legendre",
]


# ---------------------------------------------------------------------------
# exact matrix helpers
# ---------------------------------------------------------------------------

def _m(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in A)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_scale(A: Matrix, c) -> Matrix:
    c = Fraction(c)
    return tuple(tuple(c * a for a in r) for r in A)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(n: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))


def det(A: Matrix) -> Fraction:
    M = [list(r) for r in A]
    n, out = len(M), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            out = -out
        out *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return out


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    M = [list(r) + list(e) for r, e in zip(A, identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(r[n:]) for r in M)


def is_symmetric(A: Matrix) -> bool:
    return A == transpose(A)


def block(A: Matrix, B: Matrix, C: Matrix, D: Matrix) -> Matrix:
    return tuple(tuple(a) + tuple(b) for a, b in zip(A, B)) + tuple(tuple(c) + tuple(d) for c, d in zip(C, D))


def split_blocks(g: Matrix):
    n = len(g) // 2
    A = tuple(r[:n] for r in g[:n])
    B = tuple(r[n:] for r in g[:n])
    C = tuple(r[:n] for r in g[n:])
    D = tuple(r[n:] for r in g[n:])
    return A, B, C, D


def is_positive_definite(B) -> bool:
    B = _m(B)
    return all(det(tuple(r[:k] for r in B[:k])) > 0 for k in range(1, len(B) + 1))


def sym_from_six(six: Sequence) -> Matrix:
    """(b11, b12, b13, b22, b23, b33) -> symmetric 3x3."""
    b11, b12, b13, b22, b23, b33 = (Fraction(x) for x in six)
    return ((b11, b12, b13), (b12, b22, b23), (b13, b23, b33))


def sym_to_six(B: Matrix) -> tuple:
    return (B[0][0], B[0][1], B[0][2], B[1][1], B[1][2], B[2][2])


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------

class NotInCell(ValueError):
    """Raised when an element lies outside the open cell P J P."""


def J(n: int) -> Matrix:
    return block(zeros(n), identity(n), mat_scale(identity(n), -1), zeros(n))


@dataclass(frozen=True)
class GSpElement:
    """A 2n x 2n rational matrix with g J g^T = nu J."""

    matrix: Matrix
    nu: Fraction = field(default=None)

    def __post_init__(self):
        g = _m(self.matrix)
        object.__setattr__(self, "matrix", g)
        if len(g) % 2 or any(len(r) != len(g) for r in g):
            raise ValueError("GSp elements are square of even size")
        n = len(g) // 2
        Jn = J(n)
        lhs = mat_mul(mat_mul(g, Jn), transpose(g))
        nu = lhs[0][n]
        if nu == 0 or lhs != mat_scale(Jn, nu):
            raise ValueError("matrix is not a symplectic similitude")
        if self.nu is not None and Fraction(self.nu) != nu:
            raise ValueError("declared similitude disagrees with the matrix")
        object.__setattr__(self, "nu", nu)

    @property
    def n(self) -> int:
        return len(self.matrix) // 2

    def __mul__(self, other: GSpElement) -> GSpElement:
        return GSpElement(mat_mul(self.matrix, other.matrix))

    def inv(self) -> GSpElement:
        return GSpElement(inverse(self.matrix))

    def __eq__(self, other):
        return isinstance(other, GSpElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)


def gsp_make(kind: str, payload=None, n: int | None = None) -> GSpElement:
    """kind in {'m', 'n', 'n-', 'J'}; payload (a, nu) for 'm', a symmetric matrix for 'n'/'n-', n for 'J'."""
    if kind == "J":
        size = n if n is not None else int(payload)
        return GSpElement(J(size))
    if kind == "m":
        a, nu = payload
        a = _m(a)
        if det(a) == 0:
            raise ValueError("m(a, nu) needs an invertible a")
        if Fraction(nu) == 0:
            raise ValueError("the similitude must be nonzero")
        k = len(a)
        return GSpElement(block(a, zeros(k), zeros(k), mat_scale(transpose(inverse(a)), nu)))
    if kind in ("n", "n-"):
        x = _m(payload)
        if not is_symmetric(x):
            raise ValueError("unipotent parameters must be symmetric")
        k = len(x)
        if kind == "n":
            return GSpElement(block(identity(k), x, zeros(k), identity(k)))
        return GSpElement(block(identity(k), zeros(k), x, identity(k)))
    raise ValueError(f"unknown element kind {kind!r}")


@dataclass(frozen=True)
class CellDecomposition:
    a: Matrix
    nu: Fraction
    x_upper: Matrix
    x: Matrix

    def reassemble(self) -> GSpElement:
        n = len(self.a)
        return (gsp_make("m", (self.a, self.nu)) * gsp_make("n", self.x_upper)
                * gsp_make("J", n=n) * gsp_make("n", self.x))


def big_cell_decompose(g: GSpElement) -> CellDecomposition:
    """g = m(a, nu) n(x_upper) J n(x) when the lower-left block C is invertible."""
    A, _, C, D = split_blocks(g.matrix)
    if det(C) == 0:
        raise NotInCell("lower-left block is singular")
    Ci = inverse(C)
    x = mat_mul(Ci, D)
    a = mat_scale(transpose(Ci), -g.nu)
    x_upper = mat_scale(mat_mul(inverse(a), A), -1)
    return CellDecomposition(a, g.nu, x_upper, x)


# ---------------------------------------------------------------------------
# Schwartz functions on Sym_3
# ---------------------------------------------------------------------------

ENTRIES = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class SchwartzSym3:
    """Finite sum of coef * prod_{i<=j} phi_ij(x_ij) with shell-function factors."""

    terms: tuple  # ((coef, (phi_11, phi_12, phi_13, phi_22, phi_23, phi_33)), ...)

    @classmethod
    def product(cls, entries: Mapping[tuple, ShellFunction]) -> SchwartzSym3:
        missing = [e for e in ENTRIES if e not in entries]
        if missing:
            raise ValueError(f"missing entries {missing}")
        return cls(((ONE, tuple(entries[e] for e in ENTRIES)),))

    @property
    def q(self) -> int:
        return self.terms[0][1][0].q

    @property
    def is_product(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][0] == ONE

    def entry(self, i: int, j: int) -> ShellFunction:
        if not self.is_product:
            raise ValueError("entry access needs a single product term")
        i, j = min(i, j), max(i, j)
        return self.terms[0][1][ENTRIES.index((i, j))]

    def __call__(self, x: Matrix) -> ScalarK:
        p = self.q
        vals = [valuation(x[i][j], p) for i, j in ENTRIES]
        total = ZERO
        for coef, phis in self.terms:
            prod = coef
            for phi, v in zip(phis, vals):
                prod = prod * phi(v)
                if prod.is_zero():
                    break
            total = total + prod
        return total

    def __add__(self, other: SchwartzSym3) -> SchwartzSym3:
        return SchwartzSym3(self.terms + other.terms)

    def scale(self, c) -> SchwartzSym3:
        c = K(c)
        return SchwartzSym3(tuple((coef * c, phis) for coef, phis in self.terms))

    def galois(self, k: int) -> SchwartzSym3:
        def g(phi):
            return ShellFunction(phi.q, phi.n_min, phi.n_max, tuple(c.galois(k) for c in phi.coeffs), phi.tail.galois(k))
        return SchwartzSym3(tuple((coef.galois(k), tuple(g(f) for f in phis)) for coef, phis in self.terms))

    def fourier(self) -> SchwartzSym3:
        """Transform against psi(tr(x y)); off-diagonal entries pair as psi(2 x_ij y_ij).

        For odd residue characteristic 2 is a unit, so valuation-constant factors are unchanged by the rescaling.
        """
        if self.q % 2 == 0:
            raise ValueError("the doubled off-diagonal pairing needs odd residue characteristic")
        return SchwartzSym3(tuple((coef, tuple(shell_fourier(f) for f in phis)) for coef, phis in self.terms))

    def factors_through(self, n: int) -> bool:
        """True if Phi factors through Sym_3(varpi^-n o) / Sym_3(varpi^n o)."""
        for _, phis in self.terms:
            for f in phis:
                g = f.normalized()
                if g.is_zero():
                    continue
                if g.n_min < -n or g.n_max > n:
                    return False
        return True

    def support_patterns(self):
        """Per term, per entry: (exact shells with nonzero value, ball start or None)."""
        out = []
        for _, phis in self.terms:
            pats = []
            for f in phis:
                g = f.normalized()
                shells = tuple(n for n in range(g.n_min, g.n_max) if not g(n).is_zero())
                ball = None if g.tail.is_zero() else g.n_max
                pats.append((shells, ball))
            out.append(tuple(pats))
        return out


# ---------------------------------------------------------------------------
# sections and Whittaker values
# ---------------------------------------------------------------------------

def f_phi_eval(Phi: SchwartzSym3, g: GSpElement, omega, w: int = 0) -> RatFnX:
    """f_Phi(g) for g in GSp_6: omega^-2|.|^{-3s-3}(nu) * omega|.|^{2s+2}(det a) * Phi(x) on the big cell.

    omega is omega(varpi) for an unramified character; the |.|^{-w} twist of the induced
    model cancels against the 2s+w+2 exponent, so w does not enter the value.
    """
    if g.n != 3:
        raise ValueError("f_Phi lives on GSp_6")
    p = Phi.q
    if not is_prime(p):
        raise ValueError("exact evaluation needs a prime residue field")
    try:
        cell = big_cell_decompose(g)
    except NotInCell:
        return RatFnX.const(0)
    val = Phi(cell.x)
    if val.is_zero():
        return RatFnX.const(0)
    om = K(omega)
    vnu = valuation(cell.nu, p)
    vdet = valuation(det(cell.a), p)
    coef = om ** (vdet - 2 * vnu) * Fraction(p) ** (3 * vnu - 2 * vdet) * val
    return RatFnX.monomial(coef, 2 * vdet - 3 * vnu)


def degenerate_whittaker(section, B, p: int, chi=ONE, n: int | None = None) -> RatFnX:
    """W_B(1, f) for the spherical section or a big-cell section f_Phi.

    spherical: 1 for n odd, L(s - n/2, chi chi_B) for n even (chi_B from (-1)^{n/2} det B).
    f_Phi: the stable integral int Phi(x) psi(-tr(Bx)) dx, i.e. Phi-hat(-B).
    """
    B = _m(B)
    n = len(B) if n is None else n
    if p == 2:
        raise ValueError("residue characteristic 2 is unsupported")
    if not is_symmetric(B):
        raise ValueError("B must be symmetric")
    if isinstance(section, SchwartzSym3):
        if n != 3:
            raise ValueError("f_Phi sections are implemented for n = 3")
        hat = section.fourier()
        return RatFnX.const(hat(mat_scale(B, -1)))
    if section != "spherical":
        raise ValueError(f"unknown section {section!r}")
    dB = det(B)
    if valuation(dB, p) != 0 or any(valuation(x, p) < 0 for r in B for x in r):
        raise ValueError("spherical value needs B integral with unit determinant")
    if n % 2:
        return RatFnX.const(1)
    sign = (-1) ** (n // 2)
    num, den = (sign * dB).numerator, (sign * dB).denominator
    chi_B = legendre(num * den, p)
    return gl1_lfactor(K(chi) * chi_B, p, half_shift=-n)


# ---------------------------------------------------------------------------
# archimedean constant and the Fourier coefficient assembler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArchCoefficient:
    """prefactor * exp(-2 pi * exp_trace); the exponential is kept symbolic."""

    prefactor: ExactScalar
    exp_trace: Fraction


def _sqrt_rational(x: Fraction) -> ExactScalar:
    """sqrt(x) for x = square or 2 * square."""
    for t, scale in ((0, Fraction(1)), (1, Fraction(1, 2))):
        y = x * scale
        n, d = math.isqrt(y.numerator), math.isqrt(y.denominator)
        if n * n == y.numerator and d * d == y.denominator:
            return ExactScalar(Fraction(n, d), 0, 0, t)
    raise ValueError(f"sqrt({x}) is outside Q(sqrt 2)")


def arch_coeff_constant(ell: int, n: int, B, a=None) -> ArchCoefficient:
    """(4 pi)^{-n(n-1)/4} prod Gamma(ell - j/2)^{-1} (2 pi i)^{n ell} (det B)^{ell-(n+1)/2} (det a)^ell."""
    B = _m(B)
    if ell <= n:
        raise ValueError(f"weight {ell} must exceed n = {n}")
    a = identity(n) if a is None else _m(a)
    if not is_positive_definite(B):
        return ArchCoefficient(ExactScalar(Fraction(0)), Fraction(0))
    k = Fraction(n * (n - 1), 4)
    # (4 pi)^{-k} with 2k an integer: 4^{-k} = 2^{-2k}
    pref = ExactScalar(Fraction(2) ** int(-2 * k), -k)
    for j in range(n):
        pref = pref * _gamma_exact(Fraction(ell) - Fraction(j, 2)).inv()
    pref = pref * ExactScalar.two_pi_i(n * ell)
    e = Fraction(ell) - Fraction(n + 1, 2)
    dB = det(B)
    pref = pref * dB ** math.floor(e)
    if e != math.floor(e):
        pref = pref * _sqrt_rational(dB)
    pref = pref * det(a) ** ell
    trace = sum((mat_mul(mat_mul(transpose(a), B), a)[i][i] for i in range(n)), Fraction(0))
    return ArchCoefficient(pref, trace)


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class PrecheckVerdict:
    passed: bool
    reasons: tuple

    def __bool__(self):
        return self.passed


_DET_TERMS = (
    (1, ((0, 0), (1, 1), (2, 2))),
    (2, ((0, 1), (1, 2), (0, 2))),
    (-1, ((0, 0), (1, 2), (1, 2))),
    (-1, ((1, 1), (0, 2), (0, 2))),
    (-1, ((2, 2), (0, 1), (0, 1))),
)


def _det3_sym(x: dict) -> Fraction:
    return sum((c * x[e1] * x[e2] * x[e3] for c, (e1, e2, e3) in _DET_TERMS), Fraction(0))


def _pattern_can_be_singular(pattern, p: int) -> bool:
    """Can a symmetric matrix with entries in the given shell/ball sets be singular?

    pattern: six entries, each ('shell', v) or ('ball', v). Decided by the valuation of the
    determinant terms, falling back to an exhaustive check on leading residues mod p.
    """
    lows, exact = {}, {}
    for e, (kind, v) in zip(ENTRIES, pattern):
        lows[e] = v
        exact[e] = kind == "shell"
    term_low = []
    for c, es in _DET_TERMS:
        term_low.append((sum(lows[e] for e in es), all(exact[e] for e in es)))
    vmin = min(t[0] for t in term_low)
    at_min = [t for t in term_low if t[0] == vmin]
    if len(at_min) == 1 and at_min[0][1]:
        return False
    # leading residues: shells take unit residues, balls any residue (including 0)
    choices = []
    for e, (kind, v) in zip(ENTRIES, pattern):
        choices.append(range(1, p) if kind == "shell" else range(p))
    for combo in itertools.product(*choices):
        x = {e: Fraction(r) for e, r in zip(ENTRIES, combo)}
        lead = Fraction(0)
        for (c, es), (tv, _) in zip(_DET_TERMS, term_low):
            if tv == vmin:
                lead += c * x[es[0]] * x[es[1]] * x[es[2]]
        if lead.numerator % p == 0:
            return True
    return False


def holomorphy_precheck(Phi: SchwartzSym3 | None, ell: int, n: int = 3, chi_sign: int = 1,
                        chi_squared_trivial: bool = False, d: int = 1) -> PrecheckVerdict:
    """Preconditions for holomorphy at s = ell of the Eisenstein series built from f_Phi."""
    reasons = []
    if not 2 * ell > n:
        reasons.append(f"weight bound: need ell > n/2, got ell={ell}, n={n}")
    if (-1) ** ell != chi_sign:
        reasons.append(f"parity: (-1)^ell = {(-1) ** ell} differs from sgn(chi) = {chi_sign}")
    if d == 1 and n % 2 == 0 and 2 * ell == n + 2 and chi_squared_trivial:
        reasons.append("base field Q, n even, ell = 1 + n/2: need chi^2 != 1")
    if Phi is not None:
        if n != 3:
            raise ValueError("the support test is implemented for n = 3")
        p = Phi.q
        for pats in Phi.fourier().support_patterns():
            options = []
            for shells, ball in pats:
                opts = [("shell", v) for v in shells]
                if ball is not None:
                    opts.append(("ball", ball))
                options.append(opts)
            if any(not o for o in options):
                continue
            for combo in itertools.product(*options):
                if _pattern_can_be_singular(combo, p):
                    reasons.append(f"support: Fourier transform meets singular matrices on pattern {combo}")
                    break
            else:
                continue
            break
    return PrecheckVerdict(not reasons, tuple(reasons))


def eis_fourier_assemble(ell: int, B, phi_place: tuple, n: int = 3, chi_sign: int | None = None,
                         check: bool = True) -> ExactScalar:
    """B-th coefficient at s = ell, g = 1, over Q: arch constant * Phi-hat_p(-B) * (spherical places = 1)."""
    p, Phi = phi_place
    B = _m(B)
    if n != 3 or len(B) != 3:
        raise ValueError("the assembler is implemented for n = 3")
    if not is_symmetric(B):
        raise ValueError("B must be symmetric")
    if check:
        sign = (-1) ** ell if chi_sign is None else chi_sign
        verdict = holomorphy_precheck(Phi, ell, n, sign)
        if not verdict:
            raise PreconditionError("; ".join(verdict.reasons))
    if not is_positive_definite(B):
        return ExactScalar(Fraction(0))
    dB = det(B)
    for r in (dB.numerator, dB.denominator):
        for ell_p in _prime_factors(abs(r)):
            if ell_p != p:
                raise PreconditionError(f"det B is not a unit at the spherical place {ell_p}")
    local = degenerate_whittaker(Phi, B, p).evaluate(ONE)
    if not local.is_rational():
        raise ValueError("the finite-place factor is not rational; use the ScalarK value directly")
    arch = arch_coeff_constant(ell, n, B)
    # Tamagawa factor |D_F|^{-n(n+1)/4} = 1 over Q; odd n: spherical factors are 1
    return arch.prefactor * local.to_fraction()


def _prime_factors(n: int) -> list:
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            if d not in out:
                out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def coefficient_table(ell: int, Bs: Sequence, phi_place: tuple) -> list:
    """[{B: six integers, value: ExactScalar serialization}] in the order given."""
    rows = []
    for B in Bs:
        B = _m(B)
        val = eis_fourier_assemble(ell, B, phi_place)
        rows.append({"B": [int(x) if x.denominator == 1 else str(x) for x in sym_to_six(B)],
                     "value": val.serialize()})
    return rows


def table_to_json(rows: list) -> str:
    return json.dumps(rows, indent=2, sort_keys=True)


def table_from_json(text: str) -> list:
    rows = json.loads(text)
    return [{"B": sym_from_six(r["B"]), "value": ExactScalar.parse(r["value"])} for r in rows]
