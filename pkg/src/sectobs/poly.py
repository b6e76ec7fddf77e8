"""Dense univariate polynomials as coefficient lists, lowest degree first.

Coefficients are ints or Fractions; every routine is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Sequence

from .algebra import factor_integer

Poly = list


def trim(f: Sequence) -> Poly:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence) -> int:
    return len(trim(f)) - 1


def evaluate(f: Sequence, x):
    acc = 0 * x
    for c in reversed(f):
        acc = acc * x + c
    return acc


def add(f: Sequence, g: Sequence) -> Poly:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def scale(f: Sequence, c) -> Poly:
    return trim([c * a for a in f])


def mul(f: Sequence, g: Sequence) -> Poly:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return trim(out)


def prod(polys) -> Poly:
    out: Poly = [1]
    for f in polys:
        out = mul(out, f)
    return out


def derivative(f: Sequence) -> Poly:
    return trim([i * f[i] for i in range(1, len(f))])


def divmod_poly(f: Sequence, g: Sequence) -> tuple[Poly, Poly]:
    f = [Fraction(c) for c in trim(f)]
    g = [Fraction(c) for c in trim(g)]
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        c = f[-1] / g[-1]
        k = len(f) - len(g)
        q[k] = c
        for i, b in enumerate(g):
            f[i + k] -= c * b
        f = trim(f)
    return trim(q), f


def compose_x2(g: Sequence) -> Poly:
    """g(X^2)."""
    out = [0] * (2 * len(g) - 1) if g else []
    for i, c in enumerate(g):
        out[2 * i] = c
    return trim(out)


def taylor_shift(f: Sequence[int], c: int) -> list[int]:
    """Coefficients of f(c + t) in t."""
    a = list(f)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def reverse(f: Sequence, deg: int) -> Poly:
    """X^deg * f(1/X)."""
    f = list(f) + [0] * (deg + 1 - len(f))
    return list(reversed(f[: deg + 1]))


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                k = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= k * m[col][c]
    return det


def resultant(f: Sequence, g: Sequence) -> Fraction:
    """Sylvester-matrix resultant."""
    f, g = trim(f), trim(g)
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0:
        return Fraction(f[0]) ** n
    if n == 0:
        return Fraction(g[0]) ** m
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = Fraction(c)
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = Fraction(c)
        rows.append(row)
    return _det(rows)


def discriminant(f: Sequence) -> Fraction:
    f = trim(f)
    n = len(f) - 1
    if n < 1:
        raise ValueError("discriminant of a constant")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, derivative(f)) / Fraction(f[-1])


def content_integral(f: Sequence) -> list[int]:
    """Scale f by a positive rational *square* so coefficients are integers."""
    den = 1
    for c in f:
        den = math.lcm(den, Fraction(c).denominator)
    return [int(Fraction(c) * den * den) for c in f]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return [0]
    _, fac = factor_integer(n)
    out = [1]
    for q, e in fac.items():
        out = [d * q**k for d in out for k in range(e + 1)]
    return out


def rational_roots(f: Sequence) -> list[Fraction]:
    """Distinct rational roots by the rational root theorem."""
    f = trim([Fraction(c) for c in f])
    den = 1
    for c in f:
        den = math.lcm(den, c.denominator)
    g = [int(c * den) for c in f]
    roots = set()
    while g and g[0] == 0:
        roots.add(Fraction(0))
        g = g[1:]
    if len(g) <= 1:
        return sorted(roots)
    for num, dd in product(_divisors(g[0]), _divisors(g[-1])):
        for s in (1, -1):
            r = Fraction(s * num, dd)
            if evaluate(g, r) == 0:
                roots.add(r)
    return sorted(roots)


# ---------------------------------------------------------------------------
# real roots


def sturm_sequence(f: Sequence) -> list[Poly]:
    f = trim([Fraction(c) for c in f])
    seq = [f, derivative(f)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            break
        seq.append(scale(r, -1))
    return [s for s in seq if s]


def _sign_changes(values) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _sign_at_inf(f: Poly, positive: bool) -> int:
    lead = f[-1]
    if positive or degree(f) % 2 == 0:
        return 1 if lead > 0 else -1
    return -1 if lead > 0 else 1


def count_real_roots(f: Sequence, lo=None, hi=None) -> int:
    """Distinct real roots in (lo, hi]; None means infinite."""
    seq = sturm_sequence(f)
    def at(x, positive):
        if x is None:
            return [_sign_at_inf(s, positive) for s in seq]
        return [evaluate(s, Fraction(x)) for s in seq]
    return _sign_changes(at(lo, False)) - _sign_changes(at(hi, True))


def root_bound(f: Sequence) -> Fraction:
    f = trim([Fraction(c) for c in f])
    lead = abs(f[-1])
    return 1 + max((abs(c) / lead for c in f[:-1]), default=Fraction(0))


def isolate_real_roots(f: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one distinct real root."""
    f = trim([Fraction(c) for c in f])
    if degree(f) < 1:
        return []
    b = root_bound(f)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = count_real_roots(f, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack += [(lo, mid), (mid, hi)]
    return sorted(out)
