"""Unramified GL2 data: Satake parameters, gamma factors, Whittaker functions and induced sections."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import ONE, ZERO, K, RatFnX, ScalarK
from .localfield import INF, is_prime, psi_eval, q_pow, shell_psi_integral, valuation

Mat2 = tuple  # ((a, b), (c, d)) with Fraction entries


def mat(a, b, c, d) -> Mat2:
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def mmul(x: Mat2, y: Mat2) -> Mat2:
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def mdet(g: Mat2) -> Fraction:
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def n_up(x) -> Mat2:
    return mat(1, x, 0, 1)


def n_low(y) -> Mat2:
    return mat(1, 0, y, 1)


def torus(a) -> Mat2:
    """t(a) = diag(a, 1)."""
    return mat(a, 0, 0, 1)


def m_sl2(a) -> Mat2:
    """m(a) = diag(a, 1/a)."""
    a = Fraction(a)
    return mat(a, 0, 0, 1 / a)


J1 = mat(0, 1, -1, 0)


@dataclass(frozen=True)
class SatakeGL2:
    """Unramified principal series chi x mu with chi(varpi) = alpha, mu(varpi) = beta."""

    alpha: ScalarK
    beta: ScalarK
    q: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", K(self.alpha))
        object.__setattr__(self, "beta", K(self.beta))
        if self.alpha.is_zero() or self.beta.is_zero():
            raise ValueError("Satake parameters must be nonzero")

    @property
    def omega(self) -> ScalarK:
        return self.alpha * self.beta

    def swapped(self) -> SatakeGL2:
        return SatakeGL2(self.beta, self.alpha, self.q)

    def twist(self, c) -> SatakeGL2:
        return SatakeGL2(self.alpha * K(c), self.beta * K(c), self.q)

    def galois(self, k: int) -> SatakeGL2:
        return SatakeGL2(self.alpha.galois(k), self.beta.galois(k), self.q)


@dataclass(frozen=True)
class HeckePoly:
    """x^2 - trace*x + det, the Hecke polynomial at an unramified prime."""

    p: int
    trace: Fraction
    det: Fraction
    weight: int

    @property
    def discriminant(self) -> Fraction:
        return self.trace ** 2 - 4 * self.det

    def companion(self) -> Mat2:
        return mat(0, -self.det, 1, self.trace)

    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.det, -self.trace, Fraction(1))


def satake_from_hecke(a_p, p: int, weight: int, chi_p=1, level: int = 1) -> HeckePoly:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if level % p == 0:
        raise ValueError(f"p = {p} divides the level {level}; ramified places are out of scope")
    return HeckePoly(p, Fraction(a_p), Fraction(chi_p) * Fraction(p) ** (weight - 1), weight)


# ---------------------------------------------------------------------------
# gamma factors
# ---------------------------------------------------------------------------

def sqrt_q_power(q: int, half: int) -> ScalarK:
    return ScalarK.q_power(q, half)


def gl1_lfactor(c, q: int, half_shift: int = 0) -> RatFnX:
    """L(s + half_shift/2, chi) = 1/(1 - c q^{-half_shift/2} X) for chi(varpi) = c."""
    return 1 / (1 - RatFnX.monomial(K(c) * sqrt_q_power(q, -half_shift), 1))


def gl1_gamma(c, q: int, half_shift: int = 0) -> RatFnX:
    """gamma(s + half_shift/2, chi, psi) = L(1 - s', chi^{-1}) / L(s', chi), conductor-o psi."""
    c = K(c)
    t = sqrt_q_power(q, -half_shift)
    num = 1 - RatFnX.monomial(c * t, 1)
    den = 1 - RatFnX.monomial(c.inv() * Fraction(1, q) * t.inv(), -1)
    return num / den


def gl2_gamma(S: SatakeGL2, twist=ONE, half_shift: int = 0) -> RatFnX:
    """gamma(s, Pi (x) nu) for unramified nu with nu(varpi) = twist."""
    t = K(twist)
    return gl1_gamma(S.alpha * t, S.q, half_shift) * gl1_gamma(S.beta * t, S.q, half_shift)


def rankin_gamma(S1: SatakeGL2, S2: SatakeGL2, twist=ONE, half_shift: int = 0) -> RatFnX:
    t = K(twist)
    out = RatFnX.const(1)
    for a in (S1.alpha, S1.beta):
        for b in (S2.alpha, S2.beta):
            out = out * gl1_gamma(a * b * t, S1.q, half_shift)
    return out


def gl_gamma(data, twist=ONE, half_shift: int = 0) -> RatFnX:
    """gamma factor for a GL1 value, a SatakeGL2, or a pair (Rankin product)."""
    if isinstance(data, SatakeGL2):
        return gl2_gamma(data, twist, half_shift)
    if isinstance(data, tuple) and len(data) == 2:
        return rankin_gamma(data[0], data[1], twist, half_shift)
    raise TypeError("gl_gamma needs a SatakeGL2 or a pair of them; use gl1_gamma for characters")


# ---------------------------------------------------------------------------
# Iwasawa decomposition and the spherical Whittaker function
# ---------------------------------------------------------------------------

def iwasawa_gl2(g: Mat2, p: int):
    """g = n(y) diag(t1, t2) k with k in GL2(Z_p); returns (y, t1, t2, k)."""
    (a, b), (c, d) = g
    delta = mdet(g)
    if delta == 0:
        raise ValueError("singular matrix")
    if d != 0 and (c == 0 or valuation(c, p) >= valuation(d, p)):
        y, t1, t2 = b / d, delta / d, d
        k = n_low(c / d)
    else:
        y, t1, t2 = a / c, delta / c, c
        k = mat(0, -1, 1, d / c)
    return y, t1, t2, k


def spherical_torus(S: SatakeGL2, n) -> ScalarK:
    """W(t(varpi^n)) = q^{-n/2} (alpha^{n+1} - beta^{n+1}) / (alpha - beta), zero for n < 0."""
    if n == INF:
        raise ValueError("t(0) is not in GL2")
    if n < 0:
        return ZERO
    a, b = S.alpha, S.beta
    if a == b:
        poly = K(n + 1) * a ** n
    else:
        poly = ZERO
        for j in range(n + 1):
            poly = poly + a ** j * b ** (n - j)
    return sqrt_q_power(S.q, -n) * poly


def spherical_phase(S: SatakeGL2, g: Mat2, p: int) -> tuple[Fraction, ScalarK]:
    """W°(g) = psi(lam) * amp with amp depending only on valuations of the entries of g."""
    y, t1, t2, _ = iwasawa_gl2(g, p)
    v1, v2 = valuation(t1, p), valuation(t2, p)
    amp = S.omega ** v2 * spherical_torus(S, v1 - v2)
    return y, amp


def whittaker_spherical(S: SatakeGL2, n: int = 0, right: Mat2 | None = None, p: int | None = None) -> ScalarK:
    """W°(t(varpi^n) * right)."""
    if right is None:
        return spherical_torus(S, n)
    if p is None:
        raise ValueError("a prime is needed to evaluate at a general group element")
    g = mmul(torus(Fraction(p) ** n), right)
    lam, amp = spherical_phase(S, g, p)
    return psi_eval(lam, p) * amp


# ---------------------------------------------------------------------------
# the induced section f^{(n)} and the Whittaker function W^{(n)}
# ---------------------------------------------------------------------------

def _char(S: SatakeGL2, va, vd, vdelta) -> ScalarK:
    """chi(delta/d) mu(d) |delta/d^2|^{1/2} from valuations."""
    return S.alpha ** (vdelta - vd) * S.beta ** vd * sqrt_q_power(S.q, -(vdelta - 2 * vd))


def section_eval_fn(S: SatakeGL2, n: int, g: Mat2, p: int) -> ScalarK:
    """f^{(n)}(g): supported on P n^-(F), with f(n^-(x)) = I_{varpi^{2n} o}(x)."""
    (a, b), (c, d) = g
    if d == 0:
        return ZERO
    delta = mdet(g)
    if valuation(c / d, p) < 2 * n:
        return ZERO
    return _char(S, None, valuation(d, p), valuation(delta, p))


class SupportBoundError(ValueError):
    pass


def whittaker_section(S: SatakeGL2, n: int, g: Mat2, p: int, N: int = 40) -> ScalarK:
    """W^{(n)}(g) = int f^{(n)}(J_1 n(x) g) psi(-x) dx by adaptive refinement into balls.

    Balls x0 + varpi^R o are refined until the integrand is provably constant on them;
    shells beyond the point where it is constant on whole shells integrate psi to zero.
    """
    (a, b), (c, d) = g
    delta = mdet(g)
    if delta == 0:
        raise ValueError("singular matrix")
    q = S.q
    if q != p:
        raise ValueError("the rational model needs q = p")
    vdelta = valuation(delta, p)
    twon = 2 * n
    # outer region: for v(x) < E both a + x c and b + x d have valuation v(x) + v(c), v(x) + v(d)
    bounds = []
    if c != 0:
        bounds.append(valuation(a, p) - valuation(c, p) if a != 0 else INF)
    if d != 0:
        bounds.append(valuation(b, p) - valuation(d, p) if b != 0 else INF)
    E0 = min(bounds)
    E = -1 if E0 == INF else min(int(E0), -1)

    def lin_state(u, w, x0, R):
        """Valuation of u + x w on x0 + varpi^R o: (True, v) if constant, else (False, lower bound)."""
        if w == 0:
            return True, valuation(u, p)
        val0 = valuation(u + x0 * w, p)
        vw = valuation(w, p)
        if val0 < vw + R:
            return True, val0
        return False, vw + R

    total = ZERO
    stack = [(Fraction(0), E)]
    while stack:
        x0, R = stack.pop()
        if R > N:
            raise SupportBoundError(f"refinement depth {R} exceeds truncation N={N}; increase N")
        cc, vC = lin_state(a, c, x0, R)
        dc, vD = lin_state(b, d, x0, R)
        value = None
        if cc and dc:
            if vD == INF:
                value = ZERO
            elif vC - vD >= twon:
                value = _char(S, None, vD, vdelta)
            else:
                value = ZERO
        elif dc and not cc and vD != INF and vC - vD >= twon:
            value = _char(S, None, vD, vdelta)
        elif cc and not dc and vC != INF and vD > vC - twon:
            value = ZERO
        if value is None:
            step = Fraction(p) ** R
            for t in range(p):
                stack.append((x0 + t * step, R + 1))
            continue
        if value.is_zero() or R < 0:
            continue
        total = total + value * psi_eval(-x0, p) * q_pow(q, -R)
    return total


def section_phase(S: SatakeGL2, n: int, g: Mat2, p: int) -> tuple[Fraction, ScalarK]:
    """Closed-form W^{(n)}(g) = psi(lam) * amp, from the substitution w = 1/D in the defining integral.

    amp depends only on the valuations of the entries of g and of det g.
    """
    (a, b), (c, d) = g
    delta = mdet(g)
    q = S.q
    vdelta = valuation(delta, p)
    al, be = S.alpha, S.beta
    ratio = al / be
    if d == 0:
        vb, vc = valuation(b, p), valuation(c, p)
        R = vb - vc + 2 * n
        if R < 0:
            return Fraction(0), ZERO
        amp = al ** vc * be ** vb * sqrt_q_power(q, -(vc - vb)) * q_pow(q, -R)
        return a / c, amp
    vd = valuation(d, p)
    pref = q_pow(q, vd) * al ** vdelta * sqrt_q_power(q, -vdelta)
    r = vd - vdelta + 2 * n
    vw0 = valuation(c, p) - vdelta if c != 0 else INF
    if vw0 < r:
        e = vw0
        if r - 2 * e - vd < 0:
            return Fraction(0), ZERO
        amp = pref * ratio ** e * q_pow(q, e - r)
        return a / c, amp
    acc = ZERO
    for e in range(r, 2 - vd):
        w = shell_psi_integral(q, -e, -vd)
        if w:
            acc = acc + ratio ** e * q_pow(q, -e) * w
    return b / d, pref * acc


def whittaker_section_fast(S: SatakeGL2, n: int, g: Mat2, p: int) -> ScalarK:
    lam, amp = section_phase(S, n, g, p)
    if amp.is_zero():
        return ZERO
    return psi_eval(lam, p) * amp


def whittaker_phase(kind: str, S: SatakeGL2, g: Mat2, p: int, n: int = 1) -> tuple[Fraction, ScalarK]:
    """Phase form of either Whittaker function: 'spherical' or 'section'."""
    if kind == "spherical":
        return spherical_phase(S, g, p)
    if kind == "section":
        return section_phase(S, n, g, p)
    raise ValueError(f"unknown Whittaker kind {kind!r}")
