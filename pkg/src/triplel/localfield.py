"""Unramified p-adic fields, the standard additive character, and shell-constant Schwartz functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import ONE, ZERO, K, RatFnX, ScalarK

INF = math.inf


class PrecisionError(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def valuation(x, p: int) -> float | int:
    """p-adic valuation of a rational; +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** valuation(x, p)


@dataclass(frozen=True)
class LocalField:
    p: int
    f: int = 1
    M: int = 6

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.f < 1 or self.M < 1:
            raise ValueError("inertia degree and precision must be positive")

    @property
    def q(self) -> int:
        return self.p ** self.f

    def elt(self, x) -> PadicElt:
        if self.f != 1:
            raise ValueError("unit representatives exist only for the prime field")
        x = Fraction(x)
        return PadicElt(self, valuation(x, self.p), x)

    def from_valuation(self, n) -> PadicElt:
        return PadicElt(self, n, None if self.f > 1 else Fraction(self.p) ** n if n != INF else Fraction(0))


@dataclass(frozen=True)
class PadicElt:
    """An element of F; for f = 1 the exact rational value, otherwise only the valuation."""

    field: LocalField
    n: float | int
    value: Fraction | None = None

    @property
    def is_zero(self) -> bool:
        return self.n == INF

    def abs(self) -> Fraction:
        return Fraction(0) if self.is_zero else Fraction(1, self.field.q ** self.n) if self.n >= 0 \
            else Fraction(self.field.q ** (-self.n))

    def _need_value(self):
        if self.value is None:
            raise ValueError("operation needs a unit representative (f = 1 only)")
        return self.value

    def __mul__(self, other: PadicElt) -> PadicElt:
        if self.value is None or other.value is None:
            return PadicElt(self.field, self.n + other.n, None)
        return self.field.elt(self.value * other.value)

    def __add__(self, other: PadicElt) -> PadicElt:
        return self.field.elt(self._need_value() + other._need_value())

    def __neg__(self) -> PadicElt:
        return PadicElt(self.field, self.n, None if self.value is None else -self.value)

    def inv(self) -> PadicElt:
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        return PadicElt(self.field, -self.n, None if self.value is None else 1 / self.value)


def psi_eval(x, p: int, M: int | None = None) -> ScalarK:
    """psi(x) = exp(-2 pi i {x}_p) for x in Q; trivial on Z_p."""
    if isinstance(x, PadicElt):
        p, M, x = x.field.p, x.field.M, x._need_value()
    x = Fraction(x)
    v = valuation(x, p)
    if v >= 0:
        return ONE
    if M is not None and v < -M:
        raise PrecisionError(f"valuation {v} below precision -{M}")
    n = -v
    pn = p ** n
    # fractional part u/p^n with x - u/p^n in Z_(p)
    u = (x.numerator * pow(x.denominator // pn, -1, pn)) % pn
    return ScalarK.root_of_unity(pn, -u)


def q_pow(q: int, k: int) -> Fraction:
    return Fraction(q) ** k


# ---------------------------------------------------------------------------
# standard integrals
# ---------------------------------------------------------------------------

def ball_psi_integral(q: int, radius: int, vlam) -> Fraction:
    """int_{varpi^radius o} psi(lam z) dz, depending only on v(lam)."""
    return q_pow(q, -radius) if vlam + radius >= 0 else Fraction(0)


def shell_psi_integral(q: int, m: int, vlam) -> Fraction:
    """int_{v(z)=m} psi(lam z) dz."""
    if vlam + m >= 0:
        return q_pow(q, -m) * (1 - Fraction(1, q))
    if vlam + m == -1:
        return -q_pow(q, -m - 1)
    return Fraction(0)


def unit_average(q: int, vz) -> Fraction:
    """int_{o^x} psi(eps z) d^x eps with vol(o^x) = 1."""
    if vz >= 0:
        return Fraction(1)
    if vz == -1:
        return Fraction(-1, q - 1)
    return Fraction(0)


# ---------------------------------------------------------------------------
# shell functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShellFunction:
    """c_n on {v(x) = n} for n_min <= n < n_max, tail on {v(x) >= n_max}, zero below n_min."""

    q: int
    n_min: int
    n_max: int
    coeffs: tuple
    tail: ScalarK = ZERO

    def __post_init__(self):
        if self.n_max < self.n_min or len(self.coeffs) != self.n_max - self.n_min:
            raise ValueError("shell range and coefficient count disagree")

    def __call__(self, n) -> ScalarK:
        """Value on the shell of valuation n (n = inf for x = 0)."""
        if n >= self.n_max:
            return self.tail
        if n < self.n_min:
            return ZERO
        return self.coeffs[n - self.n_min]

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, q: int) -> ShellFunction:
        return cls(q, 0, 0, (), ZERO)

    @classmethod
    def ball(cls, q: int, k: int) -> ShellFunction:
        """Indicator of varpi^k o."""
        return cls(q, k, k, (), ONE)

    @classmethod
    def shell(cls, q: int, k: int) -> ShellFunction:
        """Indicator of varpi^k o^x."""
        return cls(q, k, k + 1, (ONE,), ZERO)

    @classmethod
    def from_balls(cls, q: int, balls: Mapping[int, ScalarK]) -> ShellFunction:
        """sum_k b_k * I_{varpi^k o}."""
        balls = {k: K(b) for k, b in balls.items() if not K(b).is_zero()}
        if not balls:
            return cls.zero(q)
        lo, hi = min(balls), max(balls)
        coeffs, acc = [], ZERO
        for n in range(lo, hi):
            acc = acc + balls.get(n, ZERO)
            coeffs.append(acc)
        tail = acc + balls[hi]
        return cls(q, lo, hi, tuple(coeffs), tail).normalized()

    def to_balls(self) -> dict[int, ScalarK]:
        out, prev = {}, ZERO
        for n in range(self.n_min, self.n_max):
            d = self(n) - prev
            if not d.is_zero():
                out[n] = d
            prev = self(n)
        d = self.tail - prev
        if not d.is_zero():
            out[self.n_max] = d
        return out

    def normalized(self) -> ShellFunction:
        lo, hi = self.n_min, self.n_max
        coeffs = list(self.coeffs)
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            lo += 1
        while coeffs and coeffs[-1] == self.tail:
            coeffs.pop()
            hi -= 1
        if not coeffs and self.tail.is_zero():
            return ShellFunction.zero(self.q)
        if not coeffs:
            lo = hi
        return ShellFunction(self.q, lo, hi, tuple(coeffs), self.tail)

    # algebra ----------------------------------------------------------------
    def _span(self, other: ShellFunction) -> tuple[int, int]:
        lo = min(self.n_min, other.n_min)
        hi = max(self.n_max, other.n_max)
        return lo, hi

    def _combine(self, other: ShellFunction, op) -> ShellFunction:
        if self.q != other.q:
            raise ValueError("residue cardinalities differ")
        lo, hi = self._span(other)
        coeffs = tuple(op(self(n), other(n)) for n in range(lo, hi))
        return ShellFunction(self.q, lo, hi, coeffs, op(self.tail, other.tail)).normalized()

    def __add__(self, other: ShellFunction) -> ShellFunction:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: ShellFunction) -> ShellFunction:
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, ShellFunction):
            return self._combine(other, lambda a, b: a * b)
        c = K(other)
        return ShellFunction(self.q, self.n_min, self.n_max, tuple(x * c for x in self.coeffs),
                             self.tail * c).normalized()

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ShellFunction):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (a.q, a.n_min, a.n_max, a.coeffs, a.tail) == (b.q, b.n_min, b.n_max, b.coeffs, b.tail)

    def __hash__(self):
        a = self.normalized()
        return hash((a.q, a.n_min, a.n_max, a.coeffs, a.tail))

    def conj(self) -> ShellFunction:
        return ShellFunction(self.q, self.n_min, self.n_max, tuple(c.conj() for c in self.coeffs), self.tail.conj())

    def support_bounds(self) -> tuple[int, int | None]:
        """(lowest shell in the support, first valuation from which f is constant)."""
        a = self.normalized()
        return a.n_min, a.n_max

    def is_zero(self) -> bool:
        a = self.normalized()
        return not a.coeffs and a.tail.is_zero()


def shell_fourier(f: ShellFunction) -> ShellFunction:
    """Fourier transform with respect to psi(xy) and the self-dual measure vol(o) = 1."""
    q = f.q
    return ShellFunction.from_balls(q, {-k: b * q_pow(q, -k) for k, b in f.to_balls().items()})


def indicator_units_hat(q: int) -> ShellFunction:
    """Fourier transform of the indicator of o^x."""
    return shell_fourier(ShellFunction.shell(q, 0))


def shell_measure(q: int, n: int) -> Fraction:
    return q_pow(q, -n) * (1 - Fraction(1, q))


def _geometric(ratio: ScalarK, start: int, x_power: int, q: int) -> RatFnX:
    """sum_{n >= start} ratio^n X^(x_power n)."""
    if x_power == 0:
        if not ratio.is_rational() or abs(ratio.to_fraction()) >= 1:
            raise ArithmeticError("divergent geometric tail; carry s symbolically as an X-power")
        r = ratio.to_fraction()
        return RatFnX.const(r ** start / (1 - r))
    term = RatFnX.monomial(ratio ** start, x_power * start)
    return term / (1 - RatFnX.monomial(ratio, x_power))


def shell_integral(f: ShellFunction, domain: str = "additive", psi_val=None,
                   char_value=ONE, x_power: int = 0) -> RatFnX:
    """Integral of f(x) psi(b x) chi(x) |x|^s over F (dx) or F^x (d^x x).

    psi_val is v(b) or None for no additive twist; chi(varpi) = char_value;
    |x|^s contributes X^(x_power * v(x)).
    """
    q = f.q
    chi = K(char_value)
    if domain not in ("additive", "multiplicative"):
        raise ValueError(f"unknown domain {domain!r}")

    def shell_weight(n):
        if domain == "additive":
            if psi_val is None:
                return shell_measure(q, n)
            return shell_psi_integral(q, n, psi_val)
        if psi_val is None:
            return Fraction(1)
        return unit_average(q, n + psi_val)

    total = RatFnX.const(0)
    terms = {}
    for n in range(f.n_min, f.n_max):
        c = f(n)
        if c.is_zero():
            continue
        w = shell_weight(n)
        if w:
            terms[x_power * n] = terms.get(x_power * n, ZERO) + c * chi ** n * w
    if terms:
        total = RatFnX.from_laurent(terms)
    if not f.tail.is_zero():
        start = f.n_max
        if psi_val is not None:
            # beyond -v(b) the character is trivial; handle the finite transition shells explicitly
            extra = {}
            while start < -psi_val:
                w = shell_weight(start)
                if w:
                    extra[x_power * start] = extra.get(x_power * start, ZERO) + f.tail * chi ** start * w
                start += 1
            if extra:
                total = total + RatFnX.from_laurent(extra)
        if domain == "additive":
            ratio = chi * Fraction(1, q)
            tail = _geometric(ratio, start, x_power, q) * (f.tail * (1 - Fraction(1, q)))
        else:
            tail = _geometric(chi, start, x_power, q) * f.tail
        total = total + tail
    return total
