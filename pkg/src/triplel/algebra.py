"""Exact scalars in Q(zeta_N)(sqrt q), rational functions and Laurent series in X = q^{-s}."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import sympy

Rational = Fraction


# ---------------------------------------------------------------------------
# cyclotomic coordinates
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, low degree first."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(n, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _degree(n: int) -> int:
    return len(cyclotomic_coeffs(n)) - 1


def _reduce(coeffs: list, n: int) -> tuple:
    """Reduce a coefficient list modulo Phi_n."""
    phi = cyclotomic_coeffs(n)
    d = len(phi) - 1
    c = list(coeffs)
    for k in range(len(c) - 1, d - 1, -1):
        lead = c[k]
        if lead:
            for j in range(d):
                if phi[j]:
                    c[k - d + j] -= lead * phi[j]
        c[k] = 0
    out = c[:d] + [Fraction(0)] * (d - len(c))
    return tuple(Fraction(x) for x in out[:d])


def _cmul(a: tuple, b: tuple, n: int) -> tuple:
    if len(a) == 1:
        return tuple(a[0] * y for y in b)
    if len(b) == 1:
        return tuple(b[0] * x for x in a)
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    return _reduce(prod, n)


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    b = _poly_trim(list(b))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / Fraction(b[-1])
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] * inv
        q[shift] = f
        for i, y in enumerate(b):
            a[shift + i] -= f * y
        a.pop()
    return q, a


def _cinv(a: tuple, n: int) -> tuple:
    """Inverse in Q(zeta_n) by the extended Euclidean algorithm."""
    if len(a) == 1:
        return (1 / a[0],)
    r0, r1 = [Fraction(c) for c in cyclotomic_coeffs(n)], _poly_trim([Fraction(c) for c in a])
    if not r1:
        raise ZeroDivisionError("inverse of zero in cyclotomic field")
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while len(_poly_trim(r1)) > 1:
        q, r = _poly_divmod(r0, r1)
        prod = [Fraction(0)] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                prod[i + j] += x * y
        s_new = [(s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)
                 for i in range(max(len(s0), len(prod)))]
        r0, r1 = r1, _poly_trim(r)
        s0, s1 = s1, _poly_trim(s_new) or [Fraction(0)]
        if not r1:
            raise ZeroDivisionError("element shares a factor with the cyclotomic polynomial")
    c = r1[0]
    return _reduce([x / c for x in s1], n)


@lru_cache(maxsize=None)
def _lift_matrix(n: int, m: int) -> tuple[tuple, ...]:
    """Images of zeta_n^j (j < deg) in level-m coordinates, with zeta_n = zeta_m^(m/n)."""
    step = m // n
    rows = []
    for j in range(_degree(n)):
        e = [Fraction(0)] * (j * step + 1)
        e[j * step] = Fraction(1)
        rows.append(_reduce(e, m))
    return tuple(rows)


@lru_cache(maxsize=None)
def _galois_matrix(n: int, k: int) -> tuple[tuple, ...]:
    rows = []
    for j in range(_degree(n)):
        e = [Fraction(0)] * ((j * k) % n + 1)
        e[(j * k) % n] = Fraction(1)
        rows.append(_reduce(e, n))
    return tuple(rows)


def _apply_matrix(vec: tuple, rows: tuple) -> tuple:
    width = len(rows[0]) if rows else 1
    out = [Fraction(0)] * width
    for x, row in zip(vec, rows):
        if x:
            for i, y in enumerate(row):
                if y:
                    out[i] += x * y
    return tuple(out)


# ---------------------------------------------------------------------------
# ScalarK
# ---------------------------------------------------------------------------

class ScalarK:
    """Element u + v*sqrt(q) with u, v in Q(zeta_N), stored in the power basis of zeta_N.

    The designated complex embedding sends zeta_N to exp(2*pi*i*emb/N) and sqrt(q)
    to the positive real square root.
    """

    __slots__ = ("N", "u", "v", "q", "emb")

    def __init__(self, N: int = 1, u: Sequence = (0,), v: Sequence | None = None,
                 q: int | None = None, emb: int = 1):
        if N < 1:
            raise ValueError("cyclotomic level must be >= 1")
        d = _degree(N)
        uu = tuple(Fraction(x) for x in u)
        if len(uu) != d:
            uu = _reduce(list(uu), N)
        vv = tuple(Fraction(x) for x in v) if v is not None else (Fraction(0),) * d
        if len(vv) != d:
            vv = _reduce(list(vv), N)
        if q is not None and (q < 2):
            raise ValueError("sqrt base must be an integer >= 2")
        if q is None and any(vv):
            raise ValueError("sqrt part without a sqrt base")
        if math.gcd(emb, N) != 1:
            raise ValueError("embedding index must be a unit mod N")
        self.N, self.u, self.v, self.q, self.emb = N, uu, vv, q, emb % N if N > 1 else 1

    @classmethod
    def _raw(cls, N, u, v, q, emb=1):
        obj = object.__new__(cls)
        obj.N, obj.u, obj.v, obj.q, obj.emb = N, u, v, q, emb
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, r) -> ScalarK:
        return cls._raw(1, (Fraction(r),), (Fraction(0),), None)

    @classmethod
    def sqrt(cls, q: int) -> ScalarK:
        return cls._raw(1, (Fraction(0),), (Fraction(1),), q)

    @classmethod
    def root_of_unity(cls, N: int, k: int = 1) -> ScalarK:
        if N == 1:
            return cls.rational(1)
        e = [Fraction(0)] * (k % N + 1)
        e[k % N] = Fraction(1)
        u = _reduce(e, N)
        return cls._raw(N, u, (Fraction(0),) * len(u), None)

    @classmethod
    def q_power(cls, q: int, half_exponent: int) -> ScalarK:
        """q^(half_exponent/2) as an exact element."""
        k, r = divmod(half_exponent, 2)
        base = Fraction(q) ** k
        if r == 0:
            return cls.rational(base)
        return cls._raw(1, (Fraction(0),), (base,), q)

    @staticmethod
    def coerce(x) -> ScalarK:
        if isinstance(x, ScalarK):
            return x
        if isinstance(x, (int, Fraction)):
            return ScalarK._raw(1, (Fraction(x),), (Fraction(0),), None)
        raise TypeError(f"cannot coerce {type(x).__name__} to ScalarK")

    # level handling ------------------------------------------------------
    def lift(self, M: int) -> ScalarK:
        if M == self.N:
            return self
        if M % self.N:
            raise ValueError(f"level {self.N} does not divide {M}")
        rows = _lift_matrix(self.N, M)
        emb = self.emb
        while math.gcd(emb, M) != 1:
            emb += self.N
        return ScalarK._raw(M, _apply_matrix(self.u, rows), _apply_matrix(self.v, rows), self.q, emb % M if M > 1 else 1)

    @staticmethod
    def _common(a: ScalarK, b: ScalarK):
        if a.q is not None and b.q is not None and a.q != b.q:
            raise ValueError(f"incompatible sqrt bases {a.q} and {b.q}")
        q = a.q if a.q is not None else b.q
        if a.N == b.N:
            if a.N > 1 and a.emb != b.emb:
                raise ValueError("incompatible designated embeddings")
            return a, b, a.N, q
        M = a.N * b.N // math.gcd(a.N, b.N)
        aa, bb = a.lift(M), b.lift(M)
        if aa.N > 1 and a.N > 1 and b.N > 1 and aa.emb != bb.emb:
            raise ValueError("incompatible designated embeddings")
        return aa, bb, M, q

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        if self.N == 1 and other.N == 1:
            q = self.q if self.q is not None else other.q
            if self.q is not None and other.q is not None and self.q != other.q:
                raise ValueError("incompatible sqrt bases")
            return ScalarK._raw(1, (self.u[0] + other.u[0],), (self.v[0] + other.v[0],), q)
        a, b, N, q = ScalarK._common(self, other)
        emb = a.emb if a.N > 1 else b.emb
        return ScalarK._raw(N, tuple(x + y for x, y in zip(a.u, b.u)),
                            tuple(x + y for x, y in zip(a.v, b.v)), q, emb)

    __radd__ = __add__

    def __neg__(self):
        return ScalarK._raw(self.N, tuple(-x for x in self.u), tuple(-x for x in self.v), self.q, self.emb)

    def __sub__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ScalarK.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        if self.N == 1 and other.N == 1:
            if self.q is not None and other.q is not None and self.q != other.q:
                raise ValueError("incompatible sqrt bases")
            q = self.q if self.q is not None else other.q
            u1, v1, u2, v2 = self.u[0], self.v[0], other.u[0], other.v[0]
            if not v1 and not v2:
                return ScalarK._raw(1, (u1 * u2,), (Fraction(0),), q)
            return ScalarK._raw(1, (u1 * u2 + q * v1 * v2,), (u1 * v2 + u2 * v1,), q)
        a, b, N, q = ScalarK._common(self, other)
        emb = a.emb if a.N > 1 else b.emb
        uu = _cmul(a.u, b.u, N)
        if any(a.v) and any(b.v):
            vv_ = _cmul(a.v, b.v, N)
            uu = tuple(x + q * y for x, y in zip(uu, vv_))
        vv = tuple(x + y for x, y in zip(_cmul(a.u, b.v, N), _cmul(a.v, b.u, N)))
        return ScalarK._raw(N, uu, vv, q, emb)

    __rmul__ = __mul__

    def inv(self) -> ScalarK:
        if self.is_zero():
            raise ZeroDivisionError("ScalarK division by zero")
        if self.N == 1:
            u, v = self.u[0], self.v[0]
            if not v:
                return ScalarK._raw(1, (1 / u,), (Fraction(0),), self.q)
            nrm = u * u - self.q * v * v
            if nrm == 0:
                raise ZeroDivisionError("not invertible")
            return ScalarK._raw(1, (u / nrm,), (-v / nrm,), self.q)
        N = self.N
        if not any(self.v):
            return ScalarK._raw(N, _cinv(self.u, N), self.v, self.q, self.emb)
        uu, vv = _cmul(self.u, self.u, N), _cmul(self.v, self.v, N)
        nrm = tuple(x - self.q * y for x, y in zip(uu, vv))
        if not any(nrm):
            raise ZeroDivisionError("not invertible: sqrt(q) lies in the cyclotomic field")
        ninv = _cinv(nrm, N)
        return ScalarK._raw(N, _cmul(self.u, ninv, N), tuple(-x for x in _cmul(self.v, ninv, N)), self.q, self.emb)

    def __truediv__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return ScalarK.coerce(other) * self.inv()

    def __pow__(self, k: int) -> ScalarK:
        if k < 0:
            return self.inv() ** (-k)
        result, base = ScalarK.rational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, k: int) -> ScalarK:
        """The automorphism zeta_N -> zeta_N^k; fixes sqrt(q) and Q."""
        if math.gcd(k, self.N) != 1:
            raise ValueError(f"k={k} is not a unit mod {self.N}")
        if self.N == 1:
            return self
        rows = _galois_matrix(self.N, k % self.N)
        return ScalarK._raw(self.N, _apply_matrix(self.u, rows), _apply_matrix(self.v, rows), self.q, self.emb)

    def conj(self) -> ScalarK:
        """Complex conjugation under the designated embedding."""
        return self.galois(-1)

    # predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.u) and not any(self.v)

    def is_rational(self) -> bool:
        return not any(self.u[1:]) and not any(self.v)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.u[0]

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        if self.N == other.N:
            if self.q != other.q and (any(self.v) or any(other.v)):
                return False
            return self.u == other.u and self.v == other.v
        a, b, _, _ = ScalarK._common(self, other)
        return a.u == b.u and a.v == b.v

    def __hash__(self):
        if self.is_rational():
            return hash(self.u[0])
        return hash(("K", self.q, self.v[0] if not any(self.v[1:]) else None))

    # numerics --------------------------------------------------------------
    def to_complex(self) -> complex:
        z = cmath.exp(2j * math.pi * self.emb / self.N)
        u = sum(float(c) * z ** j for j, c in enumerate(self.u))
        v = sum(float(c) * z ** j for j, c in enumerate(self.v))
        return complex(u + (math.sqrt(self.q) * v if self.q else 0))

    def to_mpc(self, dps: int = 50):
        import mpmath
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2 * self.emb) / self.N)
            u = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z ** j for j, c in enumerate(self.u))
            v = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z ** j for j, c in enumerate(self.v))
            return u + (mpmath.sqrt(self.q) * v if self.q else 0)

    # serialization ------------------------------------------------------
    def serialize(self) -> str:
        us = ",".join(str(x) for x in self.u)
        if self.q is None:
            return f"K[{self.N}]({us})"
        vs = ",".join(str(x) for x in self.v)
        return f"K[{self.N},q={self.q}]({us};{vs})"

    @classmethod
    def parse(cls, text: str) -> ScalarK:
        text = text.strip()
        if not text.startswith("K[") or not text.endswith(")"):
            raise ValueError(f"malformed scalar: {text!r}")
        head, body = text[2:-1].split("](", 1)
        parts = head.split(",")
        N = int(parts[0])
        q = int(parts[1][2:]) if len(parts) > 1 else None
        if ";" in body:
            us, vs = body.split(";")
            return cls(N, [Fraction(x) for x in us.split(",")], [Fraction(x) for x in vs.split(",")], q)
        return cls(N, [Fraction(x) for x in body.split(",")], None, q)

    def __repr__(self):
        if self.is_rational():
            return f"ScalarK({self.u[0]})"
        return f"ScalarK({self.serialize()})"


ZERO = ScalarK.rational(0)
ONE = ScalarK.rational(1)


def K(x) -> ScalarK:
    return ScalarK.coerce(x)


# ---------------------------------------------------------------------------
# polynomials over ScalarK (tuples, low degree first)
# ---------------------------------------------------------------------------

Poly = tuple


def ptrim(p: Iterable[ScalarK]) -> Poly:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return tuple(p)


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n))


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pscale(a: Poly, c: ScalarK) -> Poly:
    return ptrim(x * c for x in a)


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = b[-1].inv()
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        if a[-1].is_zero():
            a.pop()
            continue
        shift = len(a) - len(b)
        f = a[-1] * inv
        q[shift] = f
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - f * y
        a.pop()
    return ptrim(q), ptrim(a)


def pmonic(a: Poly) -> Poly:
    if not a:
        return a
    inv = a[-1].inv()
    return tuple(x * inv for x in a[:-1]) + (ONE,)


def pgcd(a: Poly, b: Poly) -> Poly:
    a, b = ptrim(a), ptrim(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    return pmonic(a) if a else a


def peval(a: Poly, x: ScalarK) -> ScalarK:
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pgalois(a: Poly, k: int) -> Poly:
    return tuple(c.galois(k) if c.N > 1 else c for c in a)


def _strip_x(p: Poly) -> tuple[int, Poly]:
    k = 0
    while k < len(p) and p[k].is_zero():
        k += 1
    return k, p[k:]


# ---------------------------------------------------------------------------
# RatFnX
# ---------------------------------------------------------------------------

class RatFnX:
    """X^shift * num(X) / den(X) in lowest terms; den monic with den(0) != 0, num(0) != 0."""

    __slots__ = ("num", "den", "shift")

    def __init__(self, num: Sequence = (), den: Sequence = (1,), shift: int = 0):
        n = ptrim(K(c) for c in num)
        d = ptrim(K(c) for c in den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den, self.shift = RatFnX._canon(n, d, shift)

    @staticmethod
    def _canon(n: Poly, d: Poly, shift: int):
        if not n:
            return (), (ONE,), 0
        kn, n = _strip_x(n)
        kd, d = _strip_x(d)
        shift += kn - kd
        if len(d) > 1:
            g = pgcd(n, d)
            if len(g) > 1:
                n, _ = pdivmod(n, g)
                d, _ = pdivmod(d, g)
        lead = d[-1].inv()
        return tuple(c * lead for c in n), tuple(c * lead for c in d[:-1]) + (ONE,), shift

    @classmethod
    def _raw(cls, num, den, shift):
        obj = object.__new__(cls)
        obj.num, obj.den, obj.shift = num, den, shift
        return obj

    @classmethod
    def const(cls, c) -> RatFnX:
        c = K(c)
        if c.is_zero():
            return cls._raw((), (ONE,), 0)
        return cls._raw((c,), (ONE,), 0)

    @classmethod
    def monomial(cls, c, k: int) -> RatFnX:
        c = K(c)
        if c.is_zero():
            return cls.const(0)
        return cls._raw((c,), (ONE,), k)

    @classmethod
    def X(cls) -> RatFnX:
        return cls.monomial(1, 1)

    @classmethod
    def from_laurent(cls, coeffs: Mapping[int, ScalarK]) -> RatFnX:
        items = {k: K(v) for k, v in coeffs.items() if not K(v).is_zero()}
        if not items:
            return cls.const(0)
        lo = min(items)
        poly = [ZERO] * (max(items) - lo + 1)
        for k, v in items.items():
            poly[k - lo] = v
        return cls(poly, (ONE,), lo)

    @staticmethod
    def coerce(x) -> RatFnX:
        if isinstance(x, RatFnX):
            return x
        return RatFnX.const(x)

    def is_zero(self) -> bool:
        return not self.num

    def _parts(self):
        """(numerator, denominator) as polynomials, with the shift folded in."""
        if self.shift >= 0:
            return (ZERO,) * self.shift + self.num, self.den, 0
        return self.num, (ZERO,) * (-self.shift) + self.den, 0

    def __add__(self, other):
        other = RatFnX.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.shift, other.shift)
        a = (ZERO,) * (self.shift - lo) + self.num
        b = (ZERO,) * (other.shift - lo) + other.num
        if self.den == other.den:
            return RatFnX._from_parts(padd(a, b), self.den, lo)
        return RatFnX._from_parts(padd(pmul(a, other.den), pmul(b, self.den)), pmul(self.den, other.den), lo)

    __radd__ = __add__

    @staticmethod
    def _from_parts(n, d, shift):
        obj = object.__new__(RatFnX)
        obj.num, obj.den, obj.shift = RatFnX._canon(n, d, shift)
        return obj

    def __neg__(self):
        return RatFnX._raw(pneg(self.num), self.den, self.shift)

    def __sub__(self, other):
        return self + (-RatFnX.coerce(other))

    def __rsub__(self, other):
        return RatFnX.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ScalarK)):
            c = K(other)
            if c.is_zero() or self.is_zero():
                return RatFnX.const(0)
            return RatFnX._raw(tuple(x * c for x in self.num), self.den, self.shift)
        other = RatFnX.coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFnX.const(0)
        if len(self.den) == 1 and len(other.den) == 1:
            return RatFnX._raw(pmul(self.num, other.num), (ONE,), self.shift + other.shift)
        return RatFnX._from_parts(pmul(self.num, other.num), pmul(self.den, other.den), self.shift + other.shift)

    __rmul__ = __mul__

    def inv(self) -> RatFnX:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFnX._from_parts(self.den, self.num, -self.shift)

    def __truediv__(self, other):
        return self * RatFnX.coerce(other).inv()

    def __rtruediv__(self, other):
        return RatFnX.coerce(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = RatFnX.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ScalarK)):
            other = RatFnX.const(other)
        if not isinstance(other, RatFnX):
            return NotImplemented
        return self.shift == other.shift and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.shift, self.num, self.den))

    def evaluate(self, x) -> ScalarK:
        x = K(x)
        d = peval(self.den, x)
        if d.is_zero():
            raise ZeroDivisionError("pole at the evaluation point")
        return peval(self.num, x) * d.inv() * x ** self.shift

    def compose_scale(self, c) -> RatFnX:
        """f(c*X)."""
        c = K(c)
        num = tuple(a * c ** i for i, a in enumerate(self.num))
        den = tuple(a * c ** i for i, a in enumerate(self.den))
        return RatFnX(num, den, 0) * RatFnX.monomial(c ** self.shift, self.shift)

    def reflect(self, c) -> RatFnX:
        """f(c / X); with c = q^{-1} this is the substitution s -> 1 - s."""
        c = K(c)
        dn, dd = len(self.num) - 1, len(self.den) - 1
        num = tuple(a * c ** i for i, a in enumerate(self.num))[::-1]
        den = tuple(a * c ** i for i, a in enumerate(self.den))[::-1]
        return RatFnX(num, den, 0) * RatFnX.monomial(c ** self.shift, dd - dn - self.shift)

    def galois(self, k: int) -> RatFnX:
        return RatFnX(pgalois(self.num, k), pgalois(self.den, k), self.shift)

    def denominator_constant(self) -> ScalarK:
        return self.den[0]

    def serialize(self) -> str:
        n = " ".join(c.serialize() for c in self.num)
        d = " ".join(c.serialize() for c in self.den)
        return f"X^{self.shift}*[{n}]/[{d}]"

    @classmethod
    def parse(cls, text: str) -> RatFnX:
        head, rest = text.strip().split("*", 1)
        shift = int(head[2:])
        n, d = rest.split("]/[")
        num = [ScalarK.parse(t) for t in n.lstrip("[").split()]
        den = [ScalarK.parse(t) for t in d.rstrip("]").split()]
        return cls(num, den, shift)

    def __repr__(self):
        return f"RatFnX({self.serialize()})"


# ---------------------------------------------------------------------------
# Laurent series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeriesX:
    """Coefficients c_k for start <= k <= order; higher terms are unknown."""

    start: int
    coeffs: tuple
    order: int

    def coefficient(self, k: int) -> ScalarK:
        if k > self.order:
            raise ValueError(f"coefficient X^{k} beyond truncation order {self.order}")
        if k < self.start:
            return ZERO
        i = k - self.start
        return self.coeffs[i] if i < len(self.coeffs) else ZERO

    def as_dict(self) -> dict[int, ScalarK]:
        return {self.start + i: c for i, c in enumerate(self.coeffs) if not c.is_zero()}

    def truncate(self, order: int) -> LaurentSeriesX:
        order = min(order, self.order)
        n = max(order - self.start + 1, 0)
        return LaurentSeriesX(self.start, tuple(self.coeffs[:n]), order)

    def __mul__(self, other: LaurentSeriesX) -> LaurentSeriesX:
        start = self.start + other.start
        order = min(self.order + other.start, other.order + self.start)
        n = max(order - start + 1, 0)
        out = [ZERO] * n
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= n:
                    break
                out[i + j] = out[i + j] + a * b
        return LaurentSeriesX(start, tuple(out), order)

    def __add__(self, other: LaurentSeriesX) -> LaurentSeriesX:
        start = min(self.start, other.start)
        order = min(self.order, other.order)
        return LaurentSeriesX.from_dict(
            {k: self.coefficient(k) + other.coefficient(k) for k in range(start, order + 1)}, order)

    @classmethod
    def from_dict(cls, d: Mapping[int, ScalarK], order: int) -> LaurentSeriesX:
        keys = [k for k, v in d.items() if k <= order and not K(v).is_zero()]
        if not keys:
            return cls(order + 1, (), order)
        start = min(keys)
        return cls(start, tuple(K(d.get(k, ZERO)) for k in range(start, order + 1)), order)

    def equals_to_order(self, other: LaurentSeriesX, order: int | None = None) -> bool:
        order = min(self.order, other.order) if order is None else order
        lo = min(self.start, other.start)
        return all(self.coefficient(k) == other.coefficient(k) for k in range(lo, order + 1))


def series_expand(f: RatFnX, order: int) -> LaurentSeriesX:
    """Expand f as a Laurent series in X through X^order."""
    if f.is_zero() or order < f.shift:
        return LaurentSeriesX(order + 1, (), order)
    n = order - f.shift + 1
    d0inv = f.den[0].inv()
    out = []
    for k in range(n):
        acc = f.num[k] if k < len(f.num) else ZERO
        for j in range(1, min(k, len(f.den) - 1) + 1):
            acc = acc - f.den[j] * out[k - j]
        out.append(acc * d0inv)
    return LaurentSeriesX(f.shift, tuple(out), order)


# ---------------------------------------------------------------------------
# randomized identity testing
# ---------------------------------------------------------------------------

@dataclass
class IdentityVerdict:
    passed: bool
    samples: list = field(default_factory=list)
    counterexample: dict | None = None
    rejected: int = 0

    def __bool__(self):
        return self.passed


Evaluator = Callable[[Mapping[str, ScalarK]], object]


def random_rational(rng: random.Random, height: int = 30) -> Fraction:
    while True:
        num = rng.randint(-height, height)
        if num:
            return Fraction(num, rng.randint(1, height))


def spec_identity_test(lhs: Evaluator, rhs: Evaluator, sample_count: int,
                       symbols: Sequence[str] = (), rng: random.Random | None = None,
                       sampler: Callable[[random.Random], Mapping[str, ScalarK]] | None = None,
                       max_rejections: int | None = None) -> IdentityVerdict:
    """Compare two evaluators on random exact specializations of their free symbols.

    A nonzero difference of total degree D vanishes at a uniformly random point of
    S^n with probability at most D/|S|; samples hitting a pole are rejected.
    """
    rng = rng or random.Random(0)
    if sampler is None:
        def sampler(r):
            return {s: K(random_rational(r)) for s in symbols}
    limit = max_rejections if max_rejections is not None else 20 * sample_count + 20
    verdict = IdentityVerdict(True)
    while len(verdict.samples) < sample_count:
        point = sampler(rng)
        try:
            a, b = lhs(point), rhs(point)
        except ZeroDivisionError:
            verdict.rejected += 1
            if verdict.rejected > limit:
                raise RuntimeError("all samples rejected; enlarge the sample space")
            continue
        verdict.samples.append(point)
        if a != b:
            verdict.passed = False
            verdict.counterexample = dict(point)
            return verdict
    return verdict


# ---------------------------------------------------------------------------
# transcendental bookkeeping scalar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactScalar:
    """r * sqrt(2)^t * pi^a * i^b with r rational, t in {0, 1}, a a half-integer, b in {0, 1}.

    i^2 = -1 and sqrt(2)^2 = 2 are folded into r, so equality is componentwise.
    """

    r: Fraction
    pi: Fraction = Fraction(0)
    i: int = 0
    sqrt2: int = 0

    def __post_init__(self):
        r, b, t = Fraction(self.r), self.i % 4, self.sqrt2 % 2
        if b >= 2:
            r, b = -r, b - 2
        extra = (self.sqrt2 - t) // 2
        object.__setattr__(self, "r", r * Fraction(2) ** extra)
        object.__setattr__(self, "i", b)
        object.__setattr__(self, "sqrt2", t)
        object.__setattr__(self, "pi", Fraction(self.pi))
        if 2 * self.pi != int(2 * self.pi):
            raise ValueError("pi exponent must be a half-integer")

    @classmethod
    def two_pi_i(cls, k) -> ExactScalar:
        """(2 pi i)^k for an integer k."""
        k = int(k)
        return cls(Fraction(2) ** k, Fraction(k), k % 4)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.r * other, self.pi, self.i, self.sqrt2)
        return ExactScalar(self.r * other.r, self.pi + other.pi, self.i + other.i, self.sqrt2 + other.sqrt2)

    __rmul__ = __mul__

    def inv(self) -> ExactScalar:
        if self.r == 0:
            raise ZeroDivisionError("inverse of zero")
        # (sqrt2)^{-1} = sqrt2 / 2 and i^{-1} = -i
        r = 1 / self.r
        if self.sqrt2:
            r /= 2
        if self.i:
            r = -r
        return ExactScalar(r, -self.pi, self.i, self.sqrt2)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.r / other, self.pi, self.i, self.sqrt2)
        return self * other.inv()

    def __pow__(self, k: int):
        out = ExactScalar(Fraction(1))
        base = self if k >= 0 else self.inv()
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return self.r == 0

    def is_rational(self) -> bool:
        return self.pi == 0 and self.i == 0 and self.sqrt2 == 0

    def split_two_pi_i(self) -> tuple[Fraction, ExactScalar]:
        """(E, rest) with self = (2 pi i)^E * rest and rest free of pi."""
        E = self.pi
        if E.denominator != 1:
            return E, self / ExactScalar(Fraction(1), E)
        return E, self / ExactScalar.two_pi_i(int(E))

    def to_complex(self) -> complex:
        return complex(float(self.r) * math.sqrt(2) ** self.sqrt2 * math.pi ** float(self.pi) * (1j if self.i else 1))

    def serialize(self) -> str:
        return f"{self.r}*sqrt2^{self.sqrt2}*pi^{self.pi}*i^{self.i}"

    @classmethod
    def parse(cls, text: str) -> ExactScalar:
        r, s2, pi, i = text.split("*")
        return cls(Fraction(r), Fraction(pi[3:]), int(i[2:]), int(s2[6:]))
