"""Exact arithmetic over Q and quadratic fields Q(sqrt d).

Rationals are :class:`fractions.Fraction` throughout.  Quadratic field
elements are immutable :class:`QuadElement` values tagged by a squarefree
``d``.  Square-class questions (global and local) are decided exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Place = Union[int, str]  # a rational prime, or "real"

REAL = "real"

_TRIAL_LIMIT = 10**6


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integers


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24, probabilistic beyond)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def _factor_positive(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for q in (2, 3, 5):
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    # wheel mod 30
    q, i = 7, 0
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    while q * q <= n and q <= _TRIAL_LIMIT:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += steps[i]
        i = (i + 1) % 8
    if n > 1:
        if q * q > n:
            out[n] = out.get(n, 0) + 1
        else:
            _split(n, out)
    return tuple(sorted(out.items()))


def factor_integer(n: int) -> tuple[int, dict[int, int]]:
    """Return ``(sign, {prime: exponent})`` with ``sign * prod(p**e) == n``."""
    if n == 0:
        raise AlgebraError("cannot factor 0")
    return (1 if n > 0 else -1), dict(_factor_positive(abs(n)))


def prime_divisors(n: int) -> set[int]:
    if n == 0:
        raise AlgebraError("0 has no finite set of prime divisors")
    return set(factor_integer(n)[1])


def valuation(q: Fraction | int, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    q = Fraction(q)
    if q == 0:
        raise AlgebraError("valuation of 0")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def int_valuation(n: int, p: int) -> int:
    """p-adic valuation of an integer; 0 maps to a large sentinel."""
    if n == 0:
        return 1 << 30
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_int(n: int) -> int:
    """Squarefree part of a nonzero integer, sign kept."""
    sign, fac = factor_integer(n)
    s = sign
    for q, e in fac.items():
        if e % 2:
            s *= q
    return s


def squarefree_part(q: Fraction | int) -> tuple[int, Fraction]:
    """Write ``q = s * r**2`` with ``s`` a squarefree integer."""
    q = Fraction(q)
    if q == 0:
        raise AlgebraError("squarefree part of 0")
    # q = num/den = num*den / den^2
    s = squarefree_int(q.numerator * q.denominator)
    r2 = q / s
    r = Fraction(math.isqrt(r2.numerator), math.isqrt(r2.denominator))
    assert r * r == r2
    return s, r


def is_rational_square(q: Fraction | int) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def rational_sqrt(q: Fraction | int) -> Fraction | None:
    q = Fraction(q)
    if not is_rational_square(q):
        return None
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


def squarefree_divisors(n: int, signed: bool = True) -> list[int]:
    """All squarefree divisors of ``n`` (with both signs when ``signed``)."""
    primes = sorted(prime_divisors(n)) if n not in (1, -1) else []
    out = [1]
    for q in primes:
        out += [d * q for d in out]
    if signed:
        out += [-d for d in out]
    return sorted(out, key=lambda d: (abs(d), d))


# ---------------------------------------------------------------------------
# local squares


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    if p == 2 or p < 2 or not is_prime(p):
        raise AlgebraError(f"legendre symbol needs an odd prime, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def is_square_in_Qp(q: Fraction | int, p: Place) -> bool:
    """Is the nonzero rational ``q`` a square in Q_p (or R when p is "real")?"""
    q = Fraction(q)
    if q == 0:
        raise AlgebraError("0 has no square class")
    if p == REAL:
        return q > 0
    v = valuation(q, p)
    if v % 2:
        return False
    unit = q / Fraction(p) ** v
    if p == 2:
        return unit.numerator * unit.denominator % 8 == 1
    return legendre(unit.numerator * unit.denominator, p) == 1


def local_class(q: Fraction | int, p: Place) -> tuple[int, ...]:
    """A hashable key for the class of ``q`` in Q_p*/Q_p*^2."""
    q = Fraction(q)
    if p == REAL:
        return (1 if q > 0 else -1,)
    v = valuation(q, p)
    unit = q / Fraction(p) ** v
    u = unit.numerator * unit.denominator
    if p == 2:
        return (v % 2, u % 8)
    return (v % 2, legendre(u, p))


# ---------------------------------------------------------------------------
# quadratic fields


def _check_d(d: int) -> None:
    if d in (0, 1) or squarefree_int(d) != d:
        raise AlgebraError(f"field tag must be squarefree and not 0 or 1, got {d}")


@dataclass(frozen=True)
class QuadElement:
    """The element ``a + b*sqrt(d)`` of Q(sqrt d)."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def make(cls, a, b, d: int) -> "QuadElement":
        _check_d(d)
        return cls(Fraction(a), Fraction(b), d)

    @classmethod
    def rational(cls, a, d: int) -> "QuadElement":
        return cls(Fraction(a), Fraction(0), d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def _same(self, other: "QuadElement") -> None:
        if other.d != self.d:
            raise AlgebraError(f"field mismatch: Q(sqrt {self.d}) vs Q(sqrt {other.d})")

    def _coerce(self, other) -> "QuadElement":
        if isinstance(other, QuadElement):
            self._same(other)
            return other
        return QuadElement(Fraction(other), Fraction(0), self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadElement(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadElement(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadElement(Fraction(1), Fraction(0), self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "QuadElement":
        return QuadElement(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        return QuadElement(self.a / n, -self.b / n, self.d)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.d})"


def quad_norm(e: QuadElement) -> Fraction:
    return e.norm()


def quad_conj(e: QuadElement) -> QuadElement:
    return e.conj()


def quad_mul(e: QuadElement, f: QuadElement) -> QuadElement:
    return e * f


def quad_inv(e: QuadElement) -> QuadElement:
    return e.inverse()


def quad_sqrt(e: QuadElement) -> QuadElement | None:
    """A square root of ``e`` inside its field, or None."""
    if e.is_zero():
        raise AlgebraError("square class of 0 is undefined")
    if e.b == 0:
        r = rational_sqrt(e.a)
        if r is not None:
            return QuadElement(r, Fraction(0), e.d)
        r = rational_sqrt(e.a / e.d)
        if r is not None:
            return QuadElement(Fraction(0), r, e.d)
        return None
    n = rational_sqrt(e.norm())
    if n is None:
        return None
    for cand in ((e.a + n) / 2, (e.a - n) / 2):
        u = rational_sqrt(cand)
        if u:
            root = QuadElement(u, e.b / (2 * u), e.d)
            assert root * root == e
            return root
    return None


def quad_is_square(e: QuadElement) -> bool:
    return quad_sqrt(e) is not None


def square_class_support(e: QuadElement) -> set[int]:
    """Primes where ``e`` may fail to be a unit, plus the primes of 2d."""
    if e.is_zero():
        raise AlgebraError("support of 0")
    n = e.norm()
    out = {2} | prime_divisors(e.d)
    out |= prime_divisors(n.numerator) | prime_divisors(n.denominator)
    # split primes can hide in coordinates with a unit norm
    out |= prime_divisors(e.a.denominator) | prime_divisors(e.b.denominator)
    return out


@dataclass(frozen=True)
class SquareClass:
    """A coset of (L*)^2 in L* for L = Q(sqrt d), or L = Q when d == 1."""

    d: int
    rep: QuadElement | Fraction

    def __post_init__(self):
        if field_is_zero(self.rep):
            raise AlgebraError("square class of 0")

    @property
    def support(self) -> set[int]:
        return field_support(self.rep)

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if other.d != self.d:
            raise AlgebraError("field mismatch")
        return SquareClass(self.d, self.rep * other.rep)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquareClass) or other.d != self.d:
            return NotImplemented
        return field_is_square(self.rep * field_inverse(other.rep))

    def __hash__(self):
        return hash(self.d)


# helpers treating Fraction as the degenerate field Q (tag d == 1)


def field_is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QuadElement) else x == 0


def field_is_square(x) -> bool:
    if isinstance(x, QuadElement):
        return quad_is_square(x)
    return is_rational_square(x)


def field_inverse(x):
    return x.inverse() if isinstance(x, QuadElement) else 1 / Fraction(x)


def field_norm(x) -> Fraction:
    return x.norm() if isinstance(x, QuadElement) else Fraction(x)


def field_support(x) -> set[int]:
    if isinstance(x, QuadElement):
        return square_class_support(x)
    x = Fraction(x)
    return {2} | prime_divisors(x.numerator) | prime_divisors(x.denominator)
