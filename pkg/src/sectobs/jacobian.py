"""Rational classes on the Jacobian of a bielliptic curve beyond the pullbacks.

With phi(P1, P2) = phi1(P1) + phi2(P2), the Jacobian is (E1 x E2)/Delta,
Delta = {(T, tau T)} pairing the 2-torsion point at the root r of E1 with
the one at 1/r on E2.  A point phi(R1, R2) is rational exactly when
sigma(R1, R2) - (R1, R2) lies in Delta for every sigma, so 2 R_i = P_i is
rational and the 2-descent images agree: delta1(P1) = delta2(P2) with the
roots matched.  This gives J(Q) completely in terms of E1(Q) and E2(Q):

    J(Q) / phi(E1(Q) x E2(Q))  <->  matched pairs modulo 2E1(Q) x 2E2(Q).

Matched pairs are realized as divisors by halving over the common
multiquadratic field and reducing phi1(R1) + phi2(R2) to degree 2 with one
step of Cantor's reduction through the function y - v(x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import QuadElement, factor_integer, rational_sqrt, squarefree_part
from .curve import DivisorClass, Genus2Curve
from .ellrank import DescentResult, EllipticCurve, Point, delta, span


class JacobianError(ValueError):
    pass


# ---------------------------------------------------------------------------
# multiquadratic fields


class MultiQuadField:
    """Q(sqrt g_1, ..., sqrt g_r) for squarefree g_k independent mod squares."""

    def __init__(self, radicands: Sequence):
        self._primes = sorted({q for x in radicands for q in _primes_of(x)})
        self.basis: list[tuple[int, int]] = []  # echelon (vector, generator)
        for x in radicands:
            s = squarefree_part(Fraction(x))[0]
            v, g = self._reduce(s)
            if v:
                self.basis.append((v, g))
                self.basis.sort(reverse=True)
        self.gens = [g for _, g in self.basis]
        self.r = len(self.gens)

    def _vector(self, s: int) -> int:
        bits = 1 if s < 0 else 0
        for i, q in enumerate(self._primes):
            if s % q == 0:
                bits |= 1 << (i + 1)
        return bits

    def _reduce(self, s: int) -> tuple[int, int]:
        v, g = self._vector(s), s
        for bv, bg in self.basis:
            if v ^ bv < v:
                v ^= bv
                g = squarefree_part(Fraction(g * bg))[0]
        return v, g

    def element(self, coeffs: dict | Fraction | int) -> "MQ":
        if not isinstance(coeffs, dict):
            coeffs = {0: Fraction(coeffs)}
        return MQ(self, {m: Fraction(c) for m, c in coeffs.items() if c != 0})

    def sqrt(self, q) -> "MQ":
        """A square root of the rational ``q`` (its class must lie in the field)."""
        q = Fraction(q)
        if q == 0:
            return self.element(0)
        s = squarefree_part(q)[0]
        if any(p not in self._primes for p in _primes_of(s)):
            raise JacobianError(f"sqrt({q}) is outside the field")
        vec = self._vector(s)
        mask, prod = 0, 1
        for k, (bv, bg) in enumerate(self.basis):
            if vec ^ bv < vec:
                vec ^= bv
                mask |= 1 << k
                prod *= bg
        if vec:
            raise JacobianError(f"sqrt({q}) is outside the field")
        t = rational_sqrt(q / prod)
        assert t is not None
        return self.element({mask: t})


def _primes_of(x) -> set[int]:
    x = Fraction(x)
    out = set()
    for n in (x.numerator, x.denominator):
        if abs(n) > 1:
            out |= set(factor_integer(n)[1])
    return out


class MQ:
    """An element of a MultiQuadField: {bitmask: rational coefficient}."""

    __slots__ = ("K", "c")

    def __init__(self, K: MultiQuadField, c: dict):
        self.K, self.c = K, c

    def _co(self, o) -> "MQ":
        return o if isinstance(o, MQ) else self.K.element(o)

    def __add__(self, o):
        o = self._co(o)
        out = dict(self.c)
        for m, v in o.c.items():
            out[m] = out.get(m, 0) + v
        return MQ(self.K, {m: v for m, v in out.items() if v != 0})

    __radd__ = __add__

    def __neg__(self):
        return MQ(self.K, {m: -v for m, v in self.c.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        g = self.K.gens
        out: dict = {}
        for s, a in self.c.items():
            for t, b in o.c.items():
                v = a * b
                both = s & t
                k = 0
                while both:
                    if both & 1:
                        v *= g[k]
                    both >>= 1
                    k += 1
                out[s ^ t] = out.get(s ^ t, 0) + v
        return MQ(self.K, {m: v for m, v in out.items() if v != 0})

    __rmul__ = __mul__

    def act(self, sigma: int) -> "MQ":
        return MQ(self.K, {m: (-v if bin(m & sigma).count("1") % 2 else v) for m, v in self.c.items()})

    def inverse(self) -> "MQ":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        num = self.K.element(1)
        for sigma in range(1, 1 << self.K.r):
            num = num * self.act(sigma)
        n = self * num
        if set(n.c) - {0}:
            raise JacobianError("norm is not rational")
        return num * (1 / n.c[0])

    def __truediv__(self, o):
        return self * self._co(o).inverse()

    def __rtruediv__(self, o):
        return self._co(o) * self.inverse()

    def is_zero(self) -> bool:
        return not self.c

    def is_rational(self) -> bool:
        return set(self.c) <= {0}

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise JacobianError("element is not rational")
        return self.c.get(0, Fraction(0))

    def __eq__(self, o):
        return (self - o).is_zero()

    def __repr__(self):
        return f"MQ({self.c}, gens={self.K.gens})"


# ---------------------------------------------------------------------------
# polynomials over any field (lists, low degree first)


def _zero(x) -> bool:
    return x.is_zero() if hasattr(x, "is_zero") else x == 0


def ptrim(f):
    f = list(f)
    while f and _zero(f[-1]):
        f.pop()
    return f


def pmul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return ptrim(out)


def psub(f, g):
    n = max(len(f), len(g))
    return ptrim([(f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)])


def pdivmod(f, g):
    f, g = ptrim(f), ptrim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(f) - len(g) + 1, 1)
    while len(f) >= len(g) and f:
        c = f[-1] / g[-1]
        k = len(f) - len(g)
        q[k] = c
        f = psub(f, [0] * k + [c * t for t in g])
    return ptrim(q), f


# ---------------------------------------------------------------------------
# halving and reduction


def halves(E: EllipticCurve, P: Point, K: MultiQuadField) -> list:
    """The four R in E(K) with 2R = P (None is the identity).

    With r_i = sqrt(x0 - e_i): x(R) = x0 + r1 r2 + r1 r3 + r2 r3 and the
    tangent slope at R is +-(r1 + r2 + r3).  Every sign choice is tried and
    kept only if doubling returns P.
    """
    if P is None:
        return [None] + [(K.element(t[0]), K.element(0)) for t in E.two_torsion()]
    x0, y0 = P
    r = [K.sqrt(x0 - ei) for ei in E.e]
    out: list = []
    for signs in itertools.product((1, -1), repeat=3):
        r1, r2, r3 = (ri * si for ri, si in zip(r, signs))
        x = x0 + r1 * r2 + r1 * r3 + r2 * r3
        y = (r1 + r2 + r3) * (x - x0) - y0
        R = (x, y)
        if y * y != E.rhs(x) or not _doubles_to(E, R, P):
            continue
        if not any(R[0] == S[0] and R[1] == S[1] for S in out):
            out.append(R)
    if len(out) != 4:
        raise JacobianError(f"expected 4 halves, found {len(out)}")
    return out


def _doubles_to(E: EllipticCurve, R, P) -> bool:
    x, y = R
    if y.is_zero():
        return False
    a2 = -sum(E.e)
    a4 = E.e[0] * E.e[1] + E.e[0] * E.e[2] + E.e[1] * E.e[2]
    lam = (3 * x * x + 2 * a2 * x + a4) / (2 * y)
    x2 = lam * lam - a2 - 2 * x
    y2 = lam * (x - x2) - y
    return x2 == P[0] and y2 == P[1]


def reduce_sum(C: Genus2Curve, u1, Y1, u2, Y2):
    """Reduce phi1((u1, Y1)) + phi2((u2, Y2)) to a degree-2 divisor.

    phi1 gives (x^2 - u1, v = Y1); phi2 gives (x^2 - w, v = Y2 x / u2) with
    w = 1/u2.  The degree-4 sum has v = A + Bx + Cx^2 + Dx^3 by CRT; then
    div(y - v) = E + E' - 3(inf+ + inf-) and E' = ((F - v^2)/u4, -v) has
    class minus that of E.  Returns (u', v') with u' monic quadratic.
    """
    if u1 is None and u2 is None:
        raise JacobianError("both components are the identity")
    if u2 is None:
        return [-u1, 0, 1], ptrim([Y1])
    w = 1 / u2
    c = Y2 / u2
    if u1 is None:
        return [-w, 0, 1], ptrim([0, c])
    if (u1 - w).is_zero():
        raise JacobianError("the two pullbacks share support")
    Cc = Y1 / (u1 - w)
    A = -Cc * w
    Dd = c / (w - u1)
    B = -Dd * u1
    v = ptrim([A, B, Cc, Dd])
    u4 = pmul([-u1, 0, 1], [-w, 0, 1])
    F = [Fraction(x) for x in C.coeffs]
    q, r = pdivmod(psub(F, pmul(v, v)), u4)
    if r:
        raise JacobianError("v^2 is not F modulo u")
    if len(q) != 3:
        raise JacobianError("reduced divisor meets infinity")
    q = [t / q[-1] for t in q]
    _, vr = pdivmod([-t for t in v], q)
    return q, vr


def _as_divisor(C: Genus2Curve, u, v, label: str) -> DivisorClass | None:
    """The rational divisor with Mumford pair (u, v), or None if not over Q."""
    try:
        n, s = u[0].rational(), -u[1].rational()
        vv = [t.rational() for t in v] + [Fraction(0)] * (2 - len(v))
    except JacobianError:
        return None
    disc = s * s - 4 * n
    if disc == 0:
        return None
    d, r = squarefree_part(disc)
    if d == 1:
        xs = [(s + r) / 2, (s - r) / 2]
        pts = tuple((x, vv[0] + vv[1] * x) for x in xs)
    else:
        x = QuadElement(s / 2, r / 2, d)
        y = vv[0] + vv[1] * x
        pts = ((x, y), (x.conj(), y.conj()))
    return DivisorClass(pts, label=label).check(C)


@dataclass(frozen=True)
class MatchedPair:
    P1: Point
    P2: Point
    image: tuple[int, int]


def matched_pairs(R1: DescentResult, R2: DescentResult) -> list[MatchedPair]:
    """A basis of pairs (P1, P2) with equal 2-descent images, modulo pairs of
    doubles and modulo Delta.  ``R2`` must use :func:`matched_models`
    so that 2-torsion points correspond index by index."""
    E1, E2 = R1.curve, R2.curve
    elems1 = _elements(E1, R1.generators)
    elems2 = _elements(E2, R2.generators)
    # pairs (T_r, T'_{1/r}) with equal images only give back 2-torsion of J
    seen = span([delta(E1, T) for T, T2 in zip(E1.two_torsion(), E2.two_torsion())
                 if delta(E1, T) == delta(E2, T2)])
    chosen: list[MatchedPair] = []
    for img in sorted(set(elems1) & set(elems2)):
        if img in seen:
            continue
        chosen.append(MatchedPair(elems1[img], elems2[img], img))
        seen = span(list(seen) + [img])
    return chosen


def _elements(E: EllipticCurve, gens: Sequence[Point]) -> dict:
    """delta-image -> a point with that image, over gens plus two torsion points."""
    basis = list(gens) + E.two_torsion()[:2]
    out: dict = {}
    for mask in range(1 << len(basis)):
        P = None
        for i, G in enumerate(basis):
            if mask >> i & 1:
                P = E.add(P, G)
        out.setdefault(delta(E, P), P)
    return out


def matched_models(E1: EllipticCurve, E2: EllipticCurve) -> EllipticCurve:
    """E2 with its roots reordered to match E1 under r -> 1/r."""
    order = []
    for e in E1.e:
        r = Fraction(e) / (E1.s**2 * E1.c)
        t = (E2.s**2 * E2.c) / r
        if t.denominator != 1 or int(t) not in E2.e:
            raise JacobianError("quotient roots do not correspond")
        order.append(int(t))
    return EllipticCurve(tuple(order), E2.c, E2.s, E2.label)


def class_from_match(C: Genus2Curve, E1: EllipticCurve, E2: EllipticCurve, m: MatchedPair) -> DivisorClass:
    """A rational degree-2 divisor in the class phi(R1, R2) with 2R_i = P_i."""
    rad = []
    for E, P in ((E1, m.P1), (E2, m.P2)):
        x0 = P[0] if P is not None else None
        rad += [x0 - e for e in E.e if x0 is not None and x0 != e]
        rad += [a - b for a in E.e for b in E.e if a != b]
    K = MultiQuadField(rad)
    H1, H2 = halves(E1, m.P1, K), halves(E2, m.P2, K)
    k1, k2 = E1.s**2 * E1.c, E2.s**2 * E2.c
    l1, l2 = E1.s**3 * E1.c, E2.s**3 * E2.c
    for R1 in H1:
        for R2 in H2:
            u1, Y1 = (None, None) if R1 is None else (R1[0] / k1, R1[1] / l1)
            u2, Y2 = (None, None) if R2 is None else (R2[0] / k2, R2[1] / l2)
            try:
                u, v = reduce_sum(C, u1, Y1, u2, Y2)
            except (JacobianError, ZeroDivisionError):
                continue
            D = _as_divisor(C, [_lift(t, K) for t in u], [_lift(t, K) for t in v], f"half{m.image}")
            if D is not None:
                return D
    raise JacobianError(f"no rational reduction for the matched image {m.image}")


def _lift(t, K: MultiQuadField) -> MQ:
    return t if isinstance(t, MQ) else K.element(t)
