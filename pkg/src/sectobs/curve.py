"""Genus-2 sextic models Y^2 = F(X) and the factorisation of F over Q."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import poly
from .algebra import (
    QuadElement,
    factor_integer,
    is_prime,
    is_rational_square,
    rational_sqrt,
    squarefree_part,
)


class CurveError(ValueError):
    pass


class UnsupportedProfile(CurveError):
    """F has an irreducible factor of degree >= 3."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Genus2Curve:
    """Y^2 = f6 X^6 + ... + f0; ``coeffs`` holds f0..f6."""

    coeffs: tuple[Fraction, ...]
    label: str = ""

    def __post_init__(self):
        c = tuple(_frac(x) for x in self.coeffs)
        if len(c) != 7:
            raise CurveError("a sextic model needs exactly 7 coefficients")
        if c[6] == 0:
            raise CurveError("f6 must be nonzero")
        object.__setattr__(self, "coeffs", c)
        if self.discriminant() == 0:
            raise CurveError("F has a repeated root (singular model)")

    @classmethod
    def from_high(cls, high: Sequence, label: str = "") -> "Genus2Curve":
        """Build from f6, f5, ..., f0."""
        return cls(tuple(_frac(x) for x in reversed(list(high))), label)

    @property
    def f6(self) -> Fraction:
        return self.coeffs[6]

    def discriminant(self) -> Fraction:
        return discriminant(self)

    def is_even(self) -> bool:
        return self.coeffs[1] == self.coeffs[3] == self.coeffs[5] == 0

    def F(self, x):
        return poly.evaluate(self.coeffs, x)

    def dF(self, x):
        return poly.evaluate(poly.derivative(self.coeffs), x)

    def high(self) -> list[Fraction]:
        return list(reversed(self.coeffs))

    def describe(self) -> str:
        terms = []
        for i in range(6, -1, -1):
            c = self.coeffs[i]
            if c:
                terms.append(f"{c}*X^{i}")
        return "Y^2 = " + " + ".join(terms)


def discriminant(C: Genus2Curve) -> Fraction:
    return poly.discriminant(list(C.coeffs))


def family_curve(p: int, a: int) -> Genus2Curve:
    """C_{p,a}: Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a)."""
    if not is_prime(p):
        raise CurveError(f"p = {p} is not prime")
    if p % 8 != 7:
        raise CurveError(f"p = {p} is not 7 mod 8")
    if a == p:
        raise CurveError("a = p excluded")
    if a == 2 * p:
        raise CurveError("a = 2p excluded")
    if a == 0:
        raise CurveError("a = 0 excluded (repeated root)")
    f = poly.prod([[2], [p, 0, 1], [2 * p, 0, 1], [a, 0, 1]])
    return Genus2Curve(tuple(f), label=f"C_{{{p},{a}}}")


# ---------------------------------------------------------------------------
# factorisation


@dataclass(frozen=True)
class Factor:
    """A monic irreducible factor of F, lowest coefficient first."""

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def d(self) -> int:
        """Squarefree tag of the root field: 1 for Q, else the quadratic field."""
        if self.degree == 1:
            return 1
        if self.degree != 2:
            raise UnsupportedProfile(f"degree-{self.degree} factor has no quadratic root field")
        c, b, _ = self.coeffs
        return squarefree_part(b * b - 4 * c)[0]

    def root(self):
        """One root theta, as a Fraction or a QuadElement in Q(sqrt d)."""
        if self.degree == 1:
            return -self.coeffs[0]
        c, b, _ = self.coeffs
        s, r = squarefree_part(b * b - 4 * c)
        return QuadElement(-b / 2, r / 2, s)

    def roots(self):
        t = self.root()
        return [t] if self.degree == 1 else [t, t.conj()]

    def __str__(self) -> str:
        return poly_str(self.coeffs)


def poly_str(coeffs) -> str:
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mon = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
        if mon and c == 1:
            parts.append(mon)
        elif mon and c == -1:
            parts.append("-" + mon)
        else:
            parts.append(f"{c}{'*' if mon else ''}{mon}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class FactoredSextic:
    unit: Fraction
    factors: tuple[Factor, ...]
    complete: bool = True  # every factor is known to be irreducible

    @property
    def supported(self) -> bool:
        return all(f.degree <= 2 for f in self.factors)

    def require_supported(self) -> "FactoredSextic":
        if not self.supported:
            degs = sorted(f.degree for f in self.factors)
            raise UnsupportedProfile(f"unsupported factor profile {degs}")
        return self

    def expand(self) -> list[Fraction]:
        return poly.scale(poly.prod([list(f.coeffs) for f in self.factors]), self.unit)

    def linear(self) -> list[Factor]:
        return [f for f in self.factors if f.degree == 1]

    def __str__(self) -> str:
        return f"{self.unit} * " + " * ".join(f"({f})" for f in self.factors)


def _monic(f) -> tuple[Fraction, ...]:
    f = poly.trim([_frac(c) for c in f])
    lead = f[-1]
    return tuple(c / lead for c in f)


def _split_x2_minus(r: Fraction) -> list[tuple[Fraction, ...]]:
    """Monic irreducible factors of X^2 - r."""
    s = rational_sqrt(r)
    if s is not None:
        return [(-s, Fraction(1)), (s, Fraction(1))]
    return [(-r, Fraction(0), Fraction(1))]


def _split_biquadratic(b: Fraction, c: Fraction) -> list[tuple[Fraction, ...]]:
    """Factors of X^4 + b X^2 + c given u^2 + b u + c irreducible."""
    root_c = rational_sqrt(c)
    for beta in ([] if root_c is None else [root_c, -root_c]):
        alpha = rational_sqrt(2 * beta - b)
        if alpha is not None and alpha != 0:
            return [(beta, alpha, Fraction(1)), (beta, -alpha, Fraction(1))]
    return [(c, Fraction(0), b, Fraction(0), Fraction(1))]


def _split_cubic_in_x2(g: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    """Factors of G(X^2) for a monic irreducible cubic G.

    G(X^2) = -h(X) h(-X) for a monic cubic h = X^3 - s X^2 + t X - n exactly
    when n^2 = -G(0), s^2 - 2t = e1 and t^2 - 2ns = e2 have a rational
    solution (e1, e2 the elementary symmetric functions of G's roots).
    """
    g0, g1, g2, _ = g
    e1, e2, e3 = -g2, g1, -g0
    n_abs = rational_sqrt(e3)
    if n_abs is not None:
        for n in {n_abs, -n_abs}:
            # ((s^2 - e1)/2)^2 - 2 n s - e2 = 0, times 4
            quartic = [e1 * e1 - 4 * e2, -8 * n, -2 * e1, Fraction(0), Fraction(1)]
            for s in poly.rational_roots(quartic):
                t = (s * s - e1) / 2
                h = (-n, t, -s, Fraction(1))
                hm = tuple(c * (-1) ** i for i, c in enumerate(h))  # h(-X)
                hm = _monic(hm)
                if poly.mul(h, hm) == poly.compose_x2(list(g)):
                    return [h, hm]
    return [tuple(poly.compose_x2(list(g)))]


def _quadratic_factors(f: Sequence[Fraction]) -> tuple[list[tuple[Fraction, ...]], list[Fraction]]:
    """Peel monic rational quadratic factors off a monic f without rational roots.

    Rescaling X = Y/d makes f integral, so any monic quadratic factor has
    integer coefficients.  Candidates come from pairing numerical roots and
    are accepted only after exact division.
    """
    rest = list(f)
    d = 1
    for c in rest:
        d = d * c.denominator // math.gcd(d, c.denominator)
    out: list[tuple[Fraction, ...]] = []
    while len(rest) > 3:
        n = len(rest) - 1
        h = [c * d ** (n - i) for i, c in enumerate(rest)]  # d^n f(Y/d), integral
        roots = np.roots([float(c) for c in reversed(h)])
        found = None
        for i, j in itertools.combinations(range(n), 2):
            s, p = roots[i] + roots[j], roots[i] * roots[j]
            if abs(s.imag) > 1e-6 or abs(p.imag) > 1e-6:
                continue
            q = [Fraction(round(p.real)), Fraction(-round(s.real)), Fraction(1)]
            quo, rem = poly.divmod_poly(h, q)
            if not poly.trim(rem):
                found = q
                break
        if found is None:
            break
        q = (found[0] / d ** 2, found[1] / d, Fraction(1))
        out.append(q)
        rest, rem = poly.divmod_poly(rest, list(q))
        assert not poly.trim(rem)
    return out, rest


def factor_sextic(C: Genus2Curve, strict: bool = True) -> FactoredSextic:
    """Exact factorisation of F over Q into monic irreducibles.

    Even sextics go through the cubic G with G(X^2) = F(X).  Other sextics
    are supported when they split into linear and quadratic factors after
    removing rational roots.  With ``strict`` an irreducible factor of
    degree >= 3 raises :class:`UnsupportedProfile`; otherwise it is kept
    (for non-even input such a block is not split further).
    """
    f = list(C.coeffs)
    unit = f[6]
    complete = True
    out: list[tuple[Fraction, ...]] = []
    if C.is_even():
        g = _monic([f[0], f[2], f[4], f[6]])
        rest = list(g)
        for r in poly.rational_roots(g):
            out += _split_x2_minus(r)
            rest, rem = poly.divmod_poly(rest, [-r, 1])
            assert not rem
        if len(rest) == 3:
            c, b, _ = rest
            out += _split_biquadratic(b, c)
        elif len(rest) == 4:
            out += _split_cubic_in_x2(rest)
    else:
        rest = list(_monic(f))
        for r in poly.rational_roots(rest):
            out.append((-r, Fraction(1)))
            rest, rem = poly.divmod_poly(rest, [-r, 1])
            assert not rem
        quads, rest = _quadratic_factors(rest)
        out += quads
        if len(rest) > 3:
            if strict:
                raise UnsupportedProfile(f"irreducible factor of degree {len(rest) - 1}")
            complete = False
        if len(rest) > 1:
            out.append(tuple(rest))
    fs = FactoredSextic(unit, tuple(Factor(tuple(_frac(c) for c in q)) for q in
                                    sorted(out, key=lambda q: (len(q), abs(q[0]), q))), complete)
    assert fs.expand() == poly.trim(f), "factorisation does not expand back"
    if strict:
        fs.require_supported()
    return fs


# ---------------------------------------------------------------------------
# multiquadratic splitting field


class MultiQuad:
    """Q(sqrt g_1, ..., sqrt g_r) for multiplicatively independent g_k.

    Elements are dicts {bitmask: Fraction}; bit k set means a factor sqrt g_k.
    """

    def __init__(self, gens: Sequence[int]):
        self.gens = list(gens)
        self.r = len(self.gens)

    def mul(self, x: dict, y: dict) -> dict:
        out: dict[int, Fraction] = {}
        for s, a in x.items():
            for t, b in y.items():
                c = a * b
                for k in range(self.r):
                    if (s >> k) & (t >> k) & 1:
                        c *= self.gens[k]
                m = s ^ t
                out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c != 0}

    @staticmethod
    def add(x: dict, y: dict) -> dict:
        out = dict(x)
        for m, c in y.items():
            out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c != 0}

    def act(self, sigma: int, x: dict) -> dict:
        """Galois element flipping sqrt g_k for every bit k of ``sigma``."""
        return {m: (-c if bin(m & sigma).count("1") % 2 else c) for m, c in x.items()}

    def group(self) -> list[int]:
        return list(range(1 << self.r))


def _sqf_vector(s: int, primes: list[int]) -> int:
    bits = 1 if s < 0 else 0
    for i, q in enumerate(primes):
        if abs(s) % q == 0:
            bits |= 1 << (i + 1)
    return bits


def splitting_field(fs: FactoredSextic) -> tuple[MultiQuad, list[dict]]:
    """The splitting field of F and its six roots inside it."""
    fs.require_supported()
    tags = [f.d for f in fs.factors if f.degree == 2]
    primes = sorted({q for d in tags for q in factor_integer(d)[1]})
    # Gaussian elimination over F_2 on exponent vectors
    basis: list[tuple[int, int]] = []  # (vector, generator)
    for d in tags:
        v = _sqf_vector(d, primes)
        g = d
        for bv, bg in basis:
            if v ^ bv < v:
                v ^= bv
                g = squarefree_part(Fraction(g * bg))[0]
        if v:
            basis.append((v, g))
            basis.sort(reverse=True)
    gens = [g for _, g in basis]
    K = MultiQuad(gens)

    def sqrt_of(d: int) -> dict:
        vec = _sqf_vector(d, primes)
        mask, prod_g = 0, 1
        # solve vec = xor of chosen basis vectors (basis is in echelon form)
        for k, (bv, bg) in enumerate(basis):
            if vec ^ bv < vec:
                vec ^= bv
                mask |= 1 << k
                prod_g *= bg
        assert vec == 0
        t = rational_sqrt(Fraction(d, prod_g))
        assert t is not None
        return {mask: t}

    roots: list[dict] = []
    for f in fs.factors:
        if f.degree == 1:
            roots.append({0: -f.coeffs[0]})
        else:
            c, b, _ = f.coeffs
            s, r = squarefree_part(b * b - 4 * c)
            rt = sqrt_of(s)
            half = {m: v * r / 2 for m, v in rt.items()}
            base = {0: -b / 2} if b else {}
            roots.append(K.add(base, half))
            roots.append(K.add(base, {m: -v for m, v in half.items()}))
    return K, roots


def _symmetric(K: MultiQuad, rts: Sequence[dict]) -> tuple:
    a, b, c = rts
    e1 = K.add(K.add(a, b), c)
    e2 = K.add(K.add(K.mul(a, b), K.mul(a, c)), K.mul(b, c))
    e3 = K.mul(K.mul(a, b), c)
    return tuple(tuple(sorted(e.items())) for e in (e1, e2, e3))


def lemma_conditions(fs: FactoredSextic) -> dict:
    """Root-configuration hypotheses (i) and (ii) of the degree-1 class lemma.

    (i): F has no rational root.  (ii): no split of the six roots into two
    triples that are each Galois-stable, or stable over one quadratic field
    and swapped by its conjugation.  Triples are compared through their
    elementary symmetric functions in the splitting field.
    """
    fs.require_supported()
    cond_i = not fs.linear()
    K, roots = splitting_field(fs)
    G = K.group()
    bad = []
    for rest in itertools.combinations(range(1, 6), 2):
        S = (0,) + rest
        T = tuple(i for i in range(6) if i not in S)
        ps = _symmetric(K, [roots[i] for i in S])
        pt = _symmetric(K, [roots[i] for i in T])
        images = {}
        for sigma in G:
            images[sigma] = _symmetric(K, [K.act(sigma, roots[i]) for i in S])
        stab = [s for s in G if images[s] == ps]
        if len(stab) == len(G):
            bad.append({"partition": [list(S), list(T)], "kind": "rational"})
        elif 2 * len(stab) == len(G) and all(images[s] == pt for s in G if s not in stab):
            bad.append({"partition": [list(S), list(T)], "kind": "conjugate"})
    return {"cond_i": cond_i, "cond_ii": not bad, "offending_partitions": bad}


# ---------------------------------------------------------------------------
# rational 2-torsion


@dataclass(frozen=True)
class TwoTorsionBasis:
    quadratics: tuple[tuple[Fraction, ...], ...]
    dim: int

    @property
    def count(self) -> int:
        return len(self.quadratics)


def two_torsion(fs: FactoredSextic) -> TwoTorsionBasis:
    """Nonzero rational 2-torsion: one class per monic rational q | F of degree 2.

    Needs the irreducible factors, not the supported profile: F without a
    rational quadratic divisor gives dimension 0.
    """
    if not fs.complete:
        raise UnsupportedProfile("factorization into irreducibles is incomplete")
    qs = [f.coeffs for f in fs.factors if f.degree == 2]
    lin = fs.linear()
    for f, g in itertools.combinations(lin, 2):
        qs.append(tuple(poly.mul(f.coeffs, g.coeffs)))
    n = len(qs) + 1
    dim = n.bit_length() - 1
    if 1 << dim != n:
        raise CurveError(f"{len(qs)} quadratic divisors is not 2^t - 1")
    return TwoTorsionBasis(tuple(qs), dim)


def is_square_leading(C: Genus2Curve) -> bool:
    return is_rational_square(C.f6)


# ---------------------------------------------------------------------------
# divisor classes {P1, P2} = [P1 + P2 - inf+ - inf-]


def _coord(x):
    return x if isinstance(x, QuadElement) else _frac(x)


@dataclass(frozen=True)
class DivisorClass:
    """{P1, P2} with P1, P2 both rational or conjugate over one quadratic field.

    ``points`` is empty for the identity {inf+, inf-}.
    """

    points: tuple = ()
    label: str = ""

    def __post_init__(self):
        pts = tuple((_coord(x), _coord(y)) for x, y in self.points)
        if len(pts) not in (0, 2):
            raise CurveError("a divisor class needs zero or two affine points")
        object.__setattr__(self, "points", pts)
        if pts:
            (x1, y1), (x2, y2) = pts
            quad = [v for v in (x1, y1, x2, y2) if isinstance(v, QuadElement) and not v.is_rational()]
            if quad:
                if len({v.d for v in quad}) != 1:
                    raise CurveError("points must share one quadratic field")
                if _as_quad(x2, quad[0].d) != _as_quad(x1, quad[0].d).conj() or \
                        _as_quad(y2, quad[0].d) != _as_quad(y1, quad[0].d).conj():
                    raise CurveError("irrational points must be Galois conjugate")

    @property
    def is_identity(self) -> bool:
        return not self.points

    @property
    def field(self) -> int:
        for x, y in self.points:
            for v in (x, y):
                if isinstance(v, QuadElement) and not v.is_rational():
                    return v.d
        return 1

    def u_poly(self) -> tuple[Fraction, ...]:
        """Monic X^2 - (x1 + x2) X + x1 x2 (rational), or (1,) for the identity."""
        if not self.points:
            return (Fraction(1),)
        (x1, _), (x2, _) = self.points
        s, n = x1 + x2, x1 * x2
        s = s.a if isinstance(s, QuadElement) else s
        n = n.a if isinstance(n, QuadElement) else n
        return (_frac(n), -_frac(s), Fraction(1))

    def has_weierstrass_support(self) -> bool:
        return any(_is_zero(y) for _, y in self.points)

    def on_curve(self, C: Genus2Curve) -> bool:
        return all(_eq(y * y, C.F(x)) for x, y in self.points)

    def check(self, C: Genus2Curve) -> "DivisorClass":
        if not self.on_curve(C):
            raise CurveError(f"divisor {self.label or self.points} is not on the curve")
        return self

    def to_json(self) -> dict:
        return {"label": self.label, "points": [[_jsonify(x), _jsonify(y)] for x, y in self.points]}

    @classmethod
    def from_json(cls, d: dict) -> "DivisorClass":
        return cls(tuple((_unjson(x), _unjson(y)) for x, y in d["points"]), d.get("label", ""))


def _as_quad(v, d: int) -> QuadElement:
    return v if isinstance(v, QuadElement) else QuadElement(_frac(v), Fraction(0), d)


def _is_zero(v) -> bool:
    return v.is_zero() if isinstance(v, QuadElement) else v == 0


def _eq(a, b) -> bool:
    return _is_zero(a - b)


def _jsonify(v):
    if isinstance(v, QuadElement):
        return {"a": str(v.a), "b": str(v.b), "d": v.d}
    return str(v)


def _unjson(v):
    if isinstance(v, dict):
        return QuadElement(Fraction(v["a"]), Fraction(v["b"]), int(v["d"]))
    return Fraction(v)


def two_torsion_classes(fs: FactoredSextic, C: Genus2Curve | None = None) -> list[DivisorClass]:
    """The nonzero rational 2-torsion classes as Weierstrass-point pairs."""
    out = []
    for q in two_torsion(fs).quadratics:
        c, b, _ = q
        s, r = squarefree_part(b * b - 4 * c) if b * b - 4 * c else (1, Fraction(0))
        if s == 1:
            pts = ((-b / 2 + r / 2, 0), (-b / 2 - r / 2, 0))
        else:
            x = QuadElement(-b / 2, r / 2, s)
            pts = ((x, QuadElement.rational(0, s)), (x.conj(), QuadElement.rational(0, s)))
        D = DivisorClass(pts, label=f"[{poly_str(q)}]")
        if C is not None:
            D.check(C)
        out.append(D)
    return out
