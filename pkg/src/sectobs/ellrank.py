"""Elliptic quotients of bielliptic genus-2 curves and their ranks.

The quotients are certified by a complete 2-descent (full rational
2-torsion) plus a point search; the search runs both naively on x = m/n^2
and on the 2-coverings attached to Selmer elements, where points are much
smaller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _accel, poly
from .algebra import (
    REAL,
    QuadElement,
    local_class,
    prime_divisors,
    rational_sqrt,
    squarefree_divisors,
    squarefree_int,
    squarefree_part,
)
from .curve import DivisorClass, Genus2Curve
from .localpoints import p1_search, real_search

DEFAULT_HEIGHT_BOUND = 10**4
COVER_BOUNDS = (64, 256, 1024)

Point = tuple  # (x, y) of Fractions, or None for the point at infinity


class DescentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# models


def bielliptic_quotients(C: Genus2Curve) -> tuple[list[Fraction], list[Fraction]]:
    """Cubics g1, g2 with E1: Y^2 = g1(u) via u = x^2 and E2: Y^2 = g2(u)
    via u = 1/x^2, Y = y/x^3."""
    if not C.is_even():
        raise DescentError("bielliptic quotients need an even sextic")
    f0, _, f2, _, f4, _, f6 = C.coeffs
    return [f0, f2, f4, f6], [f6, f4, f2, f0]


@dataclass(frozen=True)
class EllipticCurve:
    """Integral split model Y^2 = (X - e1)(X - e2)(X - e3).

    It is tied to a raw model Y^2 = c (u - r1)(u - r2)(u - r3) by
    X = s^2 c u, Y = s^3 c y_raw.
    """

    e: tuple[int, int, int]
    c: Fraction = Fraction(1)
    s: Fraction = Fraction(1)
    label: str = ""

    def __post_init__(self):
        if len(set(self.e)) != 3:
            raise DescentError("roots must be distinct")

    @property
    def cubic(self) -> list[int]:
        return poly.prod([[-ei, 1] for ei in self.e])

    def rhs(self, x):
        e1, e2, e3 = self.e
        return (x - e1) * (x - e2) * (x - e3)

    def contains(self, P: Point) -> bool:
        return P is None or P[1] * P[1] == self.rhs(P[0])

    def from_raw(self, P: Point) -> Point:
        if P is None:
            return None
        u, y = P
        return (self.s**2 * self.c * u, self.s**3 * self.c * y)

    def to_raw(self, P: Point) -> Point:
        if P is None:
            return None
        X, Y = P
        return (X / (self.s**2 * self.c), Y / (self.s**3 * self.c))

    def two_torsion(self) -> list[Point]:
        return [(Fraction(ei), Fraction(0)) for ei in self.e]

    # group law (a2 = -(e1+e2+e3), a4 = e1e2+e1e3+e2e3)

    def neg(self, P: Point) -> Point:
        return None if P is None else (P[0], -P[1])

    def add(self, P: Point, Q: Point) -> Point:
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        a2 = -sum(self.e)
        a4 = self.e[0] * self.e[1] + self.e[0] * self.e[2] + self.e[1] * self.e[2]
        if x1 == x2:
            if y1 + y2 == 0:
                return None
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return (x3, y3)

    def mul(self, n: int, P: Point) -> Point:
        if n < 0:
            return self.mul(-n, self.neg(P))
        out, base = None, P
        while n:
            if n & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            n >>= 1
        return out

    def torsion_order(self, P: Point, limit: int = 12) -> int | None:
        Q = P
        for n in range(1, limit + 1):
            if Q is None:
                return n
            Q = self.add(Q, P)
        return None


def integralize(g: Sequence, label: str = "") -> EllipticCurve:
    """Integral split model of Y^2 = g(u) for a cubic g with rational roots."""
    g = [Fraction(x) for x in g]
    if poly.degree(g) != 3:
        raise DescentError("not a cubic")
    roots = poly.rational_roots(g)
    if len(roots) != 3:
        raise DescentError("cubic does not split over Q (full rational 2-torsion required)")
    c = g[3]
    scaled = [c * r for r in roots]
    den = 1
    for x in scaled:
        den = math.lcm(den, x.denominator)
    ints = [int(x * den * den) for x in scaled]
    g0 = math.gcd(*ints)
    k = 1
    for q, e in _square_factor(g0):
        k *= q**e
    s = Fraction(den, k)
    e = tuple(int(c * r * s * s) for r in roots)
    return EllipticCurve(e, c, s, label)


def _square_factor(n: int):
    """(q, e) with q^(2e) the largest square dividing n."""
    from .algebra import factor_integer
    if n == 0:
        return []
    return [(q, m // 2) for q, m in factor_integer(n)[1].items() if m >= 2]


# ---------------------------------------------------------------------------
# 2-descent


def delta(E: EllipticCurve, P: Point) -> tuple[int, int]:
    """Connecting map to (Q*/Q*^2)^2: P -> (x - e1, x - e2) up to squares."""
    if P is None:
        return (1, 1)
    e1, e2, e3 = E.e
    x = Fraction(P[0])
    if x == e1:
        return (squarefree_int((e1 - e2) * (e1 - e3)), squarefree_int(e1 - e2))
    if x == e2:
        return (squarefree_int(e2 - e1), squarefree_int((e2 - e1) * (e2 - e3)))
    return (squarefree_part(x - e1)[0], squarefree_part(x - e2)[0])


def _mul_classes(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (squarefree_int(a[0] * b[0]), squarefree_int(a[1] * b[1]))


def span(classes) -> set[tuple[int, int]]:
    out = {(1, 1)}
    for c in classes:
        if c not in out:
            out |= {_mul_classes(c, x) for x in out}
    return out


def _dim(group_size: int) -> int:
    d = group_size.bit_length() - 1
    if 1 << d != group_size:
        raise DescentError(f"set of size {group_size} is not an F_2-space")
    return d


def covering_forms(E: EllipticCurve, b1: int, b2: int) -> list[list[int]]:
    """Quadratic forms in z (with t = 1) whose simultaneous squareness cuts
    out the 2-covering for (b1, b2): x = e1 + b1 z^2."""
    e1, e2, e3 = E.e
    return [[b2 * (e1 - e2), 0, b2 * b1], [b1 * b2 * (e1 - e3), 0, b1 * b1 * b2]]


def covering_is_locally_solvable(E: EllipticCurve, b1: int, b2: int, place) -> bool:
    forms = covering_forms(E, b1, b2)
    if place == REAL:
        return real_search(forms, [2, 2])[0]
    return p1_search(forms, [2, 2], place)[0]


def bad_places(E: EllipticCurve) -> list:
    e1, e2, e3 = E.e
    primes = prime_divisors(2 * (e1 - e2) * (e1 - e3) * (e2 - e3))
    return [REAL] + sorted(primes)


@dataclass
class DescentResult:
    curve: EllipticCurve
    selmer: list[tuple[int, int]]
    torsion_image: list[tuple[int, int]]
    points: list[Point] = field(default_factory=list)
    generators: list[Point] = field(default_factory=list)
    lower: int = 0
    upper: int = 0
    local_checks: int = 0

    @property
    def selmer_dim(self) -> int:
        return _dim(len(self.selmer))

    @property
    def certified(self) -> int | None:
        return self.lower if self.lower == self.upper else None

    @property
    def sha2_dim(self) -> int | None:
        return None if self.certified is None else self.selmer_dim - 2 - self.certified

    def point_images(self) -> list[tuple[int, int]]:
        return sorted(span([delta(self.curve, P) for P in self.points] + self.torsion_image))

    def to_json(self) -> dict:
        E = self.curve
        return {
            "model": {"e": list(E.e), "c": str(E.c), "s": str(E.s), "label": E.label},
            "selmer": [list(x) for x in self.selmer],
            "selmer_dim": self.selmer_dim,
            "torsion_image": [list(x) for x in self.torsion_image],
            "generators": [_pt_json(P) for P in self.generators],
            "generator_images": [list(delta(E, P)) for P in self.generators],
            "rank_lower": self.lower,
            "rank_upper": self.upper,
            "certified_rank": self.certified,
            "sha2_dim": self.sha2_dim,
            "local_checks": self.local_checks,
        }


def _pt_json(P: Point):
    return None if P is None else [str(P[0]), str(P[1])]


def _pt_unjson(v) -> Point:
    return None if v is None else (Fraction(v[0]), Fraction(v[1]))


def two_descent(E: EllipticCurve) -> DescentResult:
    """Full 2-Selmer group of E, with rank upper bound dim Sel - 2.

    Local solvability of a covering depends only on the local square classes
    of (b1, b2), so each place is decided once per class pair.
    """
    e1, e2, e3 = E.e
    B1 = squarefree_divisors((e1 - e2) * (e1 - e3))
    B2 = squarefree_divisors((e2 - e1) * (e2 - e3))
    places = bad_places(E)
    cache: dict = {}
    selmer = []
    for b1 in B1:
        for b2 in B2:
            ok = True
            for v in places:
                key = (v, local_class(b1, v), local_class(b2, v))
                if key not in cache:
                    cache[key] = covering_is_locally_solvable(E, b1, b2, v)
                if not cache[key]:
                    ok = False
                    break
            if ok:
                selmer.append((b1, b2))
    selmer.sort(key=lambda t: (abs(t[0]) * abs(t[1]), t))
    torsion = sorted(span([delta(E, T) for T in E.two_torsion()]))
    if not set(torsion) <= set(selmer):
        raise DescentError("torsion image not in the Selmer group (local test defect)")
    res = DescentResult(E, selmer, torsion, local_checks=len(cache))
    res.upper = res.selmer_dim - 2
    return res


# ---------------------------------------------------------------------------
# point search


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def point_search(E: EllipticCurve, height_bound: int = DEFAULT_HEIGHT_BOUND,
                 backend: str | None = None) -> list[Point]:
    """All points with x = m/n^2 in lowest terms, |m| <= H and n^2 <= H."""
    e1, e2, e3 = sorted(E.e)
    found = {}
    for n in range(1, math.isqrt(height_bound) + 1):
        w = n * n
        f = poly.prod([[-e1 * w, 1], [-e2 * w, 1], [-e3 * w, 1]])
        tables = _accel.build_tables([f])
        # the cubic is >= 0 exactly on [e1 w, e2 w] and [e3 w, oo)
        ranges = [(max(-height_bound, e1 * w), min(height_bound, e2 * w)),
                  (max(-height_bound, e3 * w), height_bound)]
        for lo, hi in ranges:
            for m in _accel.scan(lo, hi, tables, backend):
                m = int(m)
                if math.gcd(m, n) != 1:
                    continue
                r = _isqrt_exact(poly.evaluate(f, m))
                if r is not None:
                    found[Fraction(m, w)] = Fraction(r, n**3)
    return [(x, y) for x, y in sorted(found.items())]


def covering_search(E: EllipticCurve, b1: int, b2: int, bound: int,
                    backend: str | None = None) -> list[Point]:
    """Points x = e1 + b1 (z/t)^2 coming from small (z, t) on the covering."""
    e1, e2, e3 = E.e
    out = []
    for t in range(1, bound + 1):
        t2 = t * t
        forms = [[b2 * (e1 - e2) * t2, 0, b2 * b1], [b1 * b2 * (e1 - e3) * t2, 0, b1 * b1 * b2]]
        for z in _accel.sieve(forms, 0, bound, backend=backend):
            z = int(z)
            if math.gcd(z, t) != 1:
                continue
            if all(_isqrt_exact(poly.evaluate(f, z)) is not None for f in forms):
                x = e1 + Fraction(b1 * z * z, t2)
                y = rational_sqrt(E.rhs(x))
                assert y is not None
                out.append((x, y))
        if out:
            break
    return out


def certify_rank(E: EllipticCurve, height_bound: int = DEFAULT_HEIGHT_BOUND,
                 cover_bounds: Sequence[int] = COVER_BOUNDS,
                 descent: DescentResult | None = None) -> DescentResult:
    """Close the gap between points found and the Selmer bound, if possible."""
    res = descent or two_descent(E)
    pts = [P for P in point_search(E, height_bound) if E.torsion_order(P) is None]
    res.points = list(pts)
    known = span(res.torsion_image)
    gens: list[Point] = []

    def absorb(P):
        nonlocal known
        img = delta(E, P)
        if img not in known:
            known = span(list(known) + [img])
            gens.append(P)

    for P in sorted(pts, key=lambda P: (_height(P[0]), P)):
        absorb(P)
    for bound in cover_bounds:
        if _dim(len(known)) - 2 >= res.upper:
            break
        for b in res.selmer:
            if b in known:
                continue
            for P in covering_search(E, b[0], b[1], bound):
                if E.torsion_order(P) is None:
                    res.points.append(P)
                    absorb(P)
            if _dim(len(known)) - 2 >= res.upper:
                break
    res.generators = gens
    res.lower = _dim(len(known)) - 2
    if res.lower > res.upper:
        raise DescentError("more independent points than the Selmer bound allows")
    return res


def _height(x: Fraction) -> int:
    return max(abs(x.numerator), x.denominator)


# ---------------------------------------------------------------------------
# back to the genus-2 curve


def pullback(C: Genus2Curve, P: Point, which: int) -> DivisorClass:
    """The divisor class on C over a point P = (u0, y0) of the raw quotient Ei.

    E1 (u = x^2):        {(sqrt u0, y0), (-sqrt u0, y0)}
    E2 (u = 1/x^2):      {(1/sqrt u0, y0 / u0^(3/2)), (-1/sqrt u0, -y0 / u0^(3/2))}
    """
    if P is None:
        return DivisorClass((), label=f"E{which}:O")
    u0, y0 = Fraction(P[0]), Fraction(P[1])
    if which == 2 and u0 == 0:
        raise DescentError("u0 = 0 has no preimage in the E2 chart")
    d, r = squarefree_part(u0) if u0 else (1, Fraction(0))
    if d == 1:
        s = r  # sqrt(u0) is rational
        if which == 1:
            pts = ((s, y0), (-s, y0))
        else:
            pts = ((1 / s, y0 / (u0 * s)), (-1 / s, -y0 / (u0 * s)))
    else:
        s = QuadElement(Fraction(0), r, d)
        if which == 1:
            pts = ((s, QuadElement.rational(y0, d)), (-s, QuadElement.rational(y0, d)))
        else:
            x = s / u0          # 1/sqrt(u0)
            y = s * (y0 / (u0 * u0))  # y0 / u0^(3/2)
            pts = ((x, y), (-x, -y))
    D = DivisorClass(pts, label=f"E{which}:({P[0]},{P[1]})")
    return D.check(C)


def quotient_models(C: Genus2Curve) -> tuple[EllipticCurve, EllipticCurve]:
    g1, g2 = bielliptic_quotients(C)
    return integralize(g1, "E1"), integralize(g2, "E2")


def jacobian_rank(ranks: Sequence[int | None]) -> int | None:
    """rank J = rank E1 + rank E2, since J is isogenous to E1 x E2."""
    if any(r is None for r in ranks):
        return None
    return sum(ranks)


def weierstrass_invariants(g: Sequence) -> tuple[Fraction, Fraction]:
    """(c4, c6) of Y^2 = g(u) for a cubic g.

    Scaling by the leading coefficient a gives the monic model
    (aY)^2 = X^3 + b X^2 + ac X + a^2 d with X = a u.
    """
    d, c, b, a = (Fraction(x) for x in g)
    a2, a4, a6 = b, a * c, a * a * d
    b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    return c4, c6


def _is_rational_power(q: Fraction, k: int) -> bool:
    if q < 0 and k % 2 == 0:
        return False
    sign = -1 if q < 0 else 1
    out = []
    for n in (abs(q.numerator), q.denominator):
        r = round(n ** (1 / k))
        r = next((t for t in (r - 1, r, r + 1) if t >= 0 and t**k == n), None)
        if r is None:
            return False
        out.append(r)
    return True if sign > 0 else k % 2 == 1


def models_isomorphic(g: Sequence, h: Sequence) -> bool:
    """Whether Y^2 = g(u) and Y^2 = h(u) are isomorphic over Q: their (c4, c6)
    must agree up to (lambda^4, lambda^6) for a rational lambda."""
    c4, c6 = weierstrass_invariants(g)
    d4, d6 = weierstrass_invariants(h)
    if (c4 == 0) != (d4 == 0) or (c6 == 0) != (d6 == 0):
        return False
    if c4 and c6:
        lam2 = (d6 / c6) / (d4 / c4)
        return lam2 * lam2 == d4 / c4 and rational_sqrt(lam2) is not None
    if c4:
        return _is_rational_power(d4 / c4, 4)
    return _is_rational_power(d6 / c6, 6)
