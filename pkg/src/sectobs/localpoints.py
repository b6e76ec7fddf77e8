"""Local solvability of Y^2 = F(X) over R and Q_p.

Both the genus-2 curve and the 2-covering curves used in descent reduce to
one question: is there an x in P^1(Q_v) at which a given list of binary
forms of even degree all take square values (0 counts as a square)?
:func:`p1_search` answers it over Q_p by splitting residue discs,
:func:`real_search` answers it over R by root isolation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import poly
from .algebra import (
    REAL,
    Place,
    int_valuation,
    is_square_in_Qp,
    legendre,
    prime_divisors,
    valuation,
)

log = logging.getLogger(__name__)

_INF = 1 << 30

#: below this bound the genus-2 Weil estimate p + 1 - 4 sqrt(p) can vanish
WEIL_CUTOFF = 13


class LocalDepthExceeded(RuntimeError):
    """The disc search passed its completeness bound (a defect, not an answer)."""


@dataclass
class LocalReport:
    place: Place
    solvable: bool
    method: str
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "place": self.place,
            "solvable": self.solvable,
            "method": self.method,
            "witness": self.witness,
        }

    @classmethod
    def from_json(cls, d: dict) -> "LocalReport":
        return cls(d["place"], d["solvable"], d["method"], d["witness"])


# ---------------------------------------------------------------------------
# residue-disc engine


def _unit_is_square(a: int, v: int, p: int) -> bool:
    if v % 2:
        return False
    u = a // p**v
    if p == 2:
        return u % 8 == 1
    return legendre(u, p) == 1


def _classify(coeffs: Sequence[int], p: int) -> str:
    """Behaviour of a polynomial in t on the unit disc t in Z_p.

    Returns "sq"/"nonsq" when the square class is constant, "root" when it
    has exactly one (necessarily p-adic) simple zero there, "split"
    otherwise.
    """
    vals = [int_valuation(a, p) for a in coeffs]
    vmin = min(vals)
    if vmin >= _INF:
        return "sq"
    n = max(i for i, v in enumerate(vals) if v == vmin)
    if n == 0:
        gap = min(vals[1:], default=_INF) - vals[0]
        if gap >= (3 if p == 2 else 1):
            return "sq" if _unit_is_square(coeffs[0], vals[0], p) else "nonsq"
        return "split"
    return "root" if n == 1 else "split"


def _disc_coeffs(f: Sequence[int], c: int, k: int, p: int) -> list[int]:
    shifted = poly.taylor_shift(f, c)
    pk = p**k
    return [a * pk**i for i, a in enumerate(shifted)]


def _charts(forms: Sequence[Sequence[int]], degs: Sequence[int]):
    affine = [list(f) for f in forms]
    at_inf = [poly.reverse(f, d) for f, d in zip(forms, degs)]
    return {"affine": affine, "infinity": at_inf}


def depth_bound(forms: Sequence[Sequence[int]], degs: Sequence[int], p: int) -> int:
    """Completeness bound v_p(16 * disc * lead) + 4 for the product form."""
    bound = 0
    for polys in _charts(forms, degs).values():
        prod = poly.prod(polys)
        if poly.degree(prod) < 1:
            continue
        disc = poly.discriminant(prod)
        if disc == 0:
            raise ValueError("forms are not squarefree and coprime")
        lead = poly.trim(prod)[-1]
        bound = max(bound, valuation(16 * disc * lead, p) + 4)
    return bound + (3 if p == 2 else 0)


def _hensel_root(f: Sequence[int], c: int, k: int, p: int) -> tuple[int, int]:
    """Refine a disc holding one simple root until Hensel's lemma applies."""
    df = poly.derivative(f)
    while True:
        if int_valuation(poly.evaluate(f, c), p) > 2 * int_valuation(poly.evaluate(df, c), p):
            return c, k
        for d in range(p):
            child = c + d * p**k
            if _classify(_disc_coeffs(f, child, k + 1, p), p) == "root":
                c, k = child, k + 1
                break
        else:  # pragma: no cover - uniqueness of the root forbids this
            raise LocalDepthExceeded("lost track of a simple root")


def p1_search(
    forms: Sequence[Sequence[int]],
    degs: Sequence[int],
    p: int,
    bound: int | None = None,
) -> tuple[bool, dict]:
    """Decide whether some x in P^1(Q_p) makes every form a square in Q_p.

    ``forms`` are integer coefficient lists (lowest degree first) of the
    dehomogenised forms f(x, 1); ``degs`` their (even) homogeneous degrees.
    Returns ``(found, evidence)``; on failure the evidence records the number
    of discs refuted and the deepest level reached.
    """
    if bound is None:
        bound = depth_bound(forms, degs, p)
    charts = _charts(forms, degs)
    nodes = 0
    deepest = 0
    # affine chart: x in Z_p; chart at infinity: x = 1/s with s in pZ_p
    stack = [("infinity", 0, 1), ("affine", 0, 0)]
    while stack:
        chart, c, k = stack.pop()
        nodes += 1
        deepest = max(deepest, k)
        if k > bound:
            raise LocalDepthExceeded(f"p={p}: disc depth {k} exceeds bound {bound}")
        polys = charts[chart]
        status = [_classify(_disc_coeffs(f, c, k, p), p) for f in polys]
        if "nonsq" in status:
            continue
        roots = [j for j, s in enumerate(status) if s == "root"]
        if "split" not in status and len(roots) <= 1:
            if roots:
                j = roots[0]
                c, k = _hensel_root(polys[j], c, k, p)
                return True, {"kind": "root", "chart": chart, "x": c, "level": k,
                              "form": j, "nodes": nodes}
            return True, {"kind": "value", "chart": chart, "x": c, "level": k, "nodes": nodes}
        for d in range(p - 1, -1, -1):
            stack.append((chart, c + d * p**k, k + 1))
    return False, {"kind": "exhausted", "nodes": nodes, "depth": deepest, "bound": bound}


def real_search(forms: Sequence[Sequence], degs: Sequence[int]) -> tuple[bool, dict]:
    """Decide whether some x in P^1(R) makes every form nonnegative."""
    forms = [poly.trim([Fraction(c) for c in f]) for f in forms]
    at_inf = [f[d] if len(f) > d else Fraction(0) for f, d in zip(forms, degs)]
    if all(v >= 0 for v in at_inf):
        return True, {"kind": "value", "chart": "infinity", "x": "0"}
    prod = poly.prod(forms)
    samples: list[Fraction] = []
    if poly.degree(prod) < 1:
        samples.append(Fraction(0))
    else:
        intervals = poly.isolate_real_roots(prod)
        b = poly.root_bound(prod)
        samples += [-b, b]
        for i in range(len(intervals) - 1):
            hi = intervals[i][1]
            lo2, hi2 = intervals[i + 1]
            while lo2 <= hi:
                mid = (lo2 + hi2) / 2
                if poly.count_real_roots(prod, mid, hi2) > 0:
                    lo2 = mid
                else:
                    hi2 = mid
            samples.append((hi + lo2) / 2)
    for x in samples:
        if all(poly.evaluate(f, x) > 0 for f in forms):
            return True, {"kind": "value", "chart": "affine", "x": str(x)}
    return False, {"kind": "exhausted", "samples": len(samples)}


# ---------------------------------------------------------------------------
# witnesses


def padic_sqrt(u: int, p: int, prec: int) -> int:
    """A square root of the p-adic unit ``u`` modulo p**prec."""
    mod = p**prec
    if p == 2:
        if u % 8 != 1:
            raise ValueError("not a 2-adic square")
        y, j = 1, 3
        while j < prec:
            y = (y + (u - y * y) // 2 * pow(y, -1, 2**(j + 1))) % 2**(j + 1)
            j += 1
        return y % mod
    y = next(r for r in range(1, p) if (r * r - u) % p == 0)
    j = 1
    while j < prec:
        j = min(2 * j, prec)
        m = p**j
        y = (y - (y * y - u) * pow(2 * y, -1, m)) % m
    return y % mod


def _value_witness(f: Sequence[int], x: int, p: int) -> dict:
    val = poly.evaluate(f, x)
    v = int_valuation(val, p)
    half = v // 2
    u = val // p ** (2 * half)
    prec = 2 * (1 if p == 2 else 0) + 4
    y = p**half * padic_sqrt(u % p**prec, p, prec)
    return {"y": y, "modulus": p ** (half + prec), "value_valuation": v}


def verify_witness(f: Sequence[int], deg: int, p: int, witness: dict, iterations: int = 3) -> bool:
    """Re-check a positive witness of :func:`has_Qp_point` from scratch.

    A "value" witness carries y with y^2 - F(x) small enough for Hensel's
    lemma in Y; a "root" witness carries x with F(x) small against F'(x)^2.
    Three Newton steps must then shrink the residual quadratically.
    """
    g = list(f) if witness["chart"] == "affine" else poly.reverse(f, deg)
    x = witness["x"]
    v2 = 1 if p == 2 else 0
    if witness["kind"] == "root":
        dg = poly.derivative(g)
        xr = Fraction(x)
        resid = valuation(poly.evaluate(g, xr), p) if poly.evaluate(g, xr) else _INF
        dv = valuation(poly.evaluate(dg, xr), p)
        if not resid > 2 * dv:
            return False
        for _ in range(iterations):
            fx = poly.evaluate(g, xr)
            if fx == 0:
                return True
            xr = xr - fx / poly.evaluate(dg, xr)
            nxt = poly.evaluate(g, xr)
            new = valuation(nxt, p) if nxt else _INF
            if new < 2 * resid - 2 * dv:
                return False
            resid = new
        return True
    val = poly.evaluate(g, x)
    y = Fraction(witness["y"])
    if val == 0:
        return y == 0
    dv = valuation(2 * y, p) if y else _INF
    diff = y * y - val
    resid = valuation(diff, p) if diff else _INF
    if not resid > 2 * dv:
        return False
    for _ in range(iterations):
        if y * y == val:
            return True
        y = y - (y * y - val) / (2 * y)
        diff = y * y - val
        new = valuation(diff, p) if diff else _INF
        if new < 2 * resid - 2 * (dv - v2) - 2 * v2:
            return False
        resid = new
    return True


# ---------------------------------------------------------------------------
# the curve-level API


def _integral_sextic(C) -> list[int]:
    return poly.content_integral(C.coeffs)


def relevant_primes(C) -> set[int]:
    """Primes that must be checked; good primes >= 17 always have points."""
    out = {2, 3, 5, 7, 11, 13}
    disc = C.discriminant()
    out |= prime_divisors(disc.numerator) | prime_divisors(disc.denominator)
    out |= prime_divisors(C.coeffs[6].numerator) | prime_divisors(C.coeffs[6].denominator)
    for c in C.coeffs:
        if c:
            out |= prime_divisors(c.denominator)
    return out


def has_real_point(C) -> bool:
    return _real_report(C).solvable


def _real_report(C) -> LocalReport:
    if C.coeffs[6] > 0:
        return LocalReport(REAL, True, "leading-coefficient", {"kind": "value", "chart": "infinity"})
    ok, ev = real_search([C.coeffs], [6])
    return LocalReport(REAL, ok, "sturm", ev)


def has_Qp_point(C, p: int) -> LocalReport:
    f = _integral_sextic(C)
    ok, ev = p1_search([f], [6], p)
    if ok:
        g = f if ev["chart"] == "affine" else poly.reverse(f, 6)
        if ev["kind"] == "value":
            ev.update(_value_witness(g, ev["x"], p))
        else:
            ev["y"] = 0
        assert verify_witness(f, 6, p, ev), (p, ev)
    return LocalReport(p, ok, "disc-search", ev)


def family_fast_path(p: int, a: int, q: Place) -> bool | None:
    """True when 2, -p or -2p is a square at q, giving one of the points
    infinity^+ or a Weierstrass point (sqrt(-p), 0), (sqrt(-2p), 0)."""
    for val in (2, -p, -2 * p):
        if is_square_in_Qp(val, q):
            return True
    return None


def is_everywhere_locally_solvable(C, family: tuple[int, int] | None = None):
    """Return ``(solvable_everywhere, reports)`` with reports sorted by place."""
    places: list[Place] = [REAL] + sorted(relevant_primes(C))
    reports = []
    for q in places:
        if family is not None and family_fast_path(family[0], family[1], q):
            reports.append(LocalReport(q, True, "family-fast-path", {"squares": _fast_square(family, q)}))
            continue
        if q == REAL:
            reports.append(_real_report(C))
        else:
            reports.append(has_Qp_point(C, q))
    return all(r.solvable for r in reports), reports


def _fast_square(family, q) -> int:
    p = family[0]
    return next(v for v in (2, -p, -2 * p) if is_square_in_Qp(v, q))


def weil_bound_ok(p: int) -> bool:
    """p + 1 - 4 sqrt(p) > 0, so a smooth genus-2 curve over F_p has a point."""
    return p + 1 > 4 * math.sqrt(p)
