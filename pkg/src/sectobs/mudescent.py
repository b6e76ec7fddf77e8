"""The descent map mu on the Jacobian and the kernel certificate.

For D = {(x1, y1), (x2, y2)} and each irreducible factor F_i of F with
root theta_i in L_i = Q(theta_i), mu(D)_i is the class of
(x1 - theta_i)(x2 - theta_i) = u_D(theta_i) in L_i*/L_i*^2, where u_D is the
monic polynomial with roots x1, x2.  The target is taken modulo the
diagonal action of Q*.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import poly
from .algebra import (
    QuadElement,
    SquareClass,
    field_is_square,
    field_is_zero,
    field_norm,
    field_support,
    rational_sqrt,
    squarefree_int,
    squarefree_part,
)
from .curve import DivisorClass, FactoredSextic, Genus2Curve

# Replacement for a vanishing factor (x_j - theta_i) at a Weierstrass point.
#   "derivative":      F'(theta_i)
#   "derivative_lead": F'(theta_i) / f6
WEIERSTRASS_RULES = ("derivative", "derivative_lead")
DEFAULT_RULE = "derivative"

MAX_GENERATORS = 8


class DescentMapError(ValueError):
    pass


@dataclass(frozen=True)
class BooleanClass:
    """An element of (prod L_i*/L_i*^2) / Q*, one SquareClass per factor."""

    components: tuple[SquareClass, ...]

    @property
    def fields(self) -> tuple[int, ...]:
        return tuple(c.d for c in self.components)

    @property
    def support(self) -> set[int]:
        out = {2}
        for c in self.components:
            out |= c.support
            out |= {q for q in _primes_of_tag(c.d)}
        return out

    def to_json(self) -> list[dict]:
        out = []
        for c in self.components:
            r = c.rep
            rep = {"a": str(r.a), "b": str(r.b)} if isinstance(r, QuadElement) else {"a": str(r), "b": "0"}
            out.append({"d": c.d, "rep": rep, "support": sorted(c.support)})
        return out

    @classmethod
    def from_json(cls, data: list[dict]) -> "BooleanClass":
        comps = []
        for item in data:
            d = int(item["d"])
            a, b = Fraction(item["rep"]["a"]), Fraction(item["rep"]["b"])
            comps.append(SquareClass(d, QuadElement(a, b, d) if d != 1 else a))
        return cls(tuple(comps))


def _primes_of_tag(d: int) -> set[int]:
    from .algebra import prime_divisors
    return prime_divisors(d) if d not in (1, -1) else set()


def _in_field(x, d: int):
    if d == 1:
        if isinstance(x, QuadElement):
            if not x.is_rational():
                raise DescentMapError("irrational value in a rational component")
            return x.a
        return Fraction(x)
    if isinstance(x, QuadElement):
        if x.d != d and not x.is_rational():
            raise DescentMapError("value outside the component field")
        return QuadElement(x.a, x.b if x.d == d else Fraction(0), d)
    return QuadElement.rational(Fraction(x), d)


def trivial_class(fs: FactoredSextic) -> BooleanClass:
    return BooleanClass(tuple(SquareClass(f.d, _in_field(1, f.d)) for f in fs.factors))


def mu(C: Genus2Curve, fs: FactoredSextic, D: DivisorClass, rule: str = DEFAULT_RULE) -> BooleanClass:
    """Image of D under mu, with the Weierstrass correction ``rule``."""
    if rule not in WEIERSTRASS_RULES:
        raise DescentMapError(f"unknown Weierstrass rule {rule!r}")
    fs.require_supported()
    D.check(C)
    if D.is_identity:
        return trivial_class(fs)
    u = [Fraction(c) for c in D.u_poly()]
    dF = poly.derivative(list(C.coeffs))
    comps = []
    for f in fs.factors:
        d = f.d
        theta = _in_field(f.root(), d)
        val = poly.evaluate(u, theta)
        if field_is_zero(val):
            # u = (X - theta)(X - other), with other = (x1 + x2) - theta
            other = -u[1] - theta
            if field_is_zero(other - theta):
                raise DescentMapError("divisor {P, P} at a Weierstrass point")
            repl = poly.evaluate(dF, theta)
            if rule == "derivative_lead":
                repl = repl / C.f6
            val = (other - theta) * repl
        comps.append(SquareClass(d, val))
    return BooleanClass(tuple(comps))


def classes_product(c: BooleanClass, c2: BooleanClass) -> BooleanClass:
    if c.fields != c2.fields:
        raise DescentMapError("field mismatch")
    return BooleanClass(tuple(a * b for a, b in zip(c.components, c2.components)))


def _rational_cosets(c: BooleanClass):
    """For each component the squarefree w with w * c_i a square in L_i.

    Q: the single class c_i.  Q(sqrt d): empty unless N(c_i) is a square n^2,
    else {w0, w0 d} with w0 = 2(a + n), using (c + n)^2 = 2(a + n) c.
    Returns None as soon as some component admits no w.
    """
    out = []
    for comp in c.components:
        r = comp.rep
        if comp.d == 1:
            out.append({squarefree_part(r)[0]})
            continue
        n = rational_sqrt(r.norm())
        if n is None:
            return None
        t = r.a + n if r.a + n != 0 else r.a - n
        w0 = squarefree_part(2 * t)[0]
        out.append({w0, squarefree_int(w0 * comp.d)})
    return out


def trivializing_w(c: BooleanClass) -> int | None:
    """A squarefree w with w * c_i a square in every L_i, or None."""
    cosets = _rational_cosets(c)
    if cosets is None:
        return None
    common = set.intersection(*cosets) if cosets else {1}
    return min(common, key=lambda w: (abs(w), w)) if common else None


def support_bound(c: BooleanClass) -> list[int]:
    """Primes that can divide a trivializing w (see class_is_trivial)."""
    out = {2}
    for comp in c.components:
        out |= _primes_of_tag(comp.d)
        out |= field_support(comp.rep)
    return sorted(out)


def class_is_trivial(c: BooleanClass, method: str = "cosets") -> bool:
    """Is c trivial modulo squares and the diagonal Q*?

    "cosets" intersects the per-field solution sets exactly; "exhaustive"
    tries every squarefree w = +-prod(S') for S' inside :func:`support_bound`.
    """
    if method == "cosets":
        return trivializing_w(c) is not None
    if method == "exhaustive":
        return exhaustive_w(c) is not None
    raise DescentMapError(f"unknown method {method!r}")


def exhaustive_w(c: BooleanClass) -> int | None:
    S = support_bound(c)
    if len(S) > 20:
        raise DescentMapError(f"support of size {len(S)} is too large to exhaust")
    for k in range(len(S) + 1):
        for sub in itertools.combinations(S, k):
            base = 1
            for q in sub:
                base *= q
            for w in (base, -base):
                if all(field_is_square(comp.rep * w) for comp in c.components):
                    return w
    return None


def classes_equal(c: BooleanClass, c2: BooleanClass) -> bool:
    return class_is_trivial(classes_product(c, c2))


def f2_rank(classes: Sequence[BooleanClass]) -> int:
    """Dimension of the span, from the number of trivial subset products."""
    n = len(classes)
    if n > MAX_GENERATORS:
        raise DescentMapError(f"at most {MAX_GENERATORS} classes (got {n})")
    if n == 0:
        return 0
    kernel = 0
    for mask in range(1 << n):
        prod = None
        for i in range(n):
            if mask >> i & 1:
                prod = classes[i] if prod is None else classes_product(prod, classes[i])
        if prod is None or class_is_trivial(prod):
            kernel += 1
    k = kernel.bit_length() - 1
    if 1 << k != kernel:
        raise DescentMapError("kernel size is not a power of 2")
    return n - k


def norm_product(c: BooleanClass) -> Fraction:
    out = Fraction(1)
    for comp in c.components:
        out *= field_norm(comp.rep)
    return out


# ---------------------------------------------------------------------------
# kernel certificate


@dataclass
class KernelCertificate:
    """mu-images of a spanning set of J(Q)/2J(Q) and the evidence for their rank.

    ``selected`` indexes an independent subset; every other image is shown
    to be a product of selected ones through ``dependencies``.
    """

    labels: list[str]
    images: list[BooleanClass]
    selected: list[int]
    dependencies: list[dict]
    jacobian_rank: int | None
    t2dim: int
    complete: bool = True
    trivial_subsets: list[dict] = field(default_factory=list)

    @property
    def image_rank(self) -> int:
        return len(self.selected)

    @property
    def predicted_log2_size(self) -> int | None:
        """log2 |J(Q)/2J(Q)| = rank + dim J(Q)[2]."""
        return None if self.jacobian_rank is None else self.jacobian_rank + self.t2dim

    @property
    def verdict(self) -> bool:
        return self.predicted_log2_size is not None and self.image_rank == self.predicted_log2_size

    def to_json(self) -> dict:
        return {
            "generators": self.labels,
            "selected": self.selected,
            "dependencies": self.dependencies,
            "image_rank": self.image_rank,
            "jacobian_rank": self.jacobian_rank,
            "t2dim": self.t2dim,
            "generators_complete": self.complete,
            "log2_J_mod_2J": self.predicted_log2_size,
            "subset_checks": self.trivial_subsets,
            "kernel_is_2J": self.verdict,
        }


def _subset_product(classes: Sequence[BooleanClass], mask: int) -> BooleanClass | None:
    prod = None
    for i, c in enumerate(classes):
        if mask >> i & 1:
            prod = c if prod is None else classes_product(prod, c)
    return prod


def independent_subset(classes: Sequence[BooleanClass]) -> tuple[list[int], list[dict]]:
    """Greedy basis of the span of ``classes``.

    Returns the chosen indices and, for every other index, a mask over the
    chosen ones and the w making the combined product trivial.
    """
    chosen: list[int] = []
    span_elems: list[tuple[int, BooleanClass | None]] = [(0, None)]
    deps = []
    for i, c in enumerate(classes):
        hit = None
        for mask, s in span_elems:
            w = trivializing_w(c if s is None else classes_product(c, s))
            if w is not None:
                hit = (mask, w)
                break
        if hit is not None:
            deps.append({"index": i, "mask": hit[0], "w": hit[1]})
            continue
        if len(chosen) == MAX_GENERATORS:
            raise DescentMapError(f"more than {MAX_GENERATORS} independent classes")
        bit = 1 << len(chosen)
        chosen.append(i)
        span_elems += [(m | bit, c if s is None else classes_product(s, c)) for m, s in span_elems]
    return chosen, deps


def subset_evidence(classes: Sequence[BooleanClass]) -> list[dict]:
    """Replayable evidence for every nonempty subset product: a trivializing
    w, or the component where no w exists (non-square norm or empty coset
    intersection) together with the prime support an exhaustive check needs."""
    out = []
    for mask in range(1, 1 << len(classes)):
        prod = _subset_product(classes, mask)
        w = trivializing_w(prod)
        entry = {"mask": mask, "trivial": w is not None}
        if w is not None:
            entry["w"] = w
        else:
            entry["reason"] = _nontrivial_reason(prod)
            entry["support"] = support_bound(prod)
        out.append(entry)
    return out


def _nontrivial_reason(c: BooleanClass) -> str:
    for i, comp in enumerate(c.components):
        if comp.d != 1 and rational_sqrt(comp.rep.norm()) is None:
            return f"norm of component {i} is not a square"
    return "no common w across components"


def certify_kernel(C: Genus2Curve, fs: FactoredSextic, generators: Sequence[DivisorClass],
                   jac_rank: int | None, t2dim: int, rule: str = DEFAULT_RULE,
                   complete: bool = True) -> KernelCertificate:
    """ker mu = 2J(Q) once the images of a spanning set of J(Q)/2J(Q) span a
    space of size |J(Q)/2J(Q)|.  ``complete`` says whether ``generators``
    is known to span."""
    images = [mu(C, fs, D, rule) for D in generators]
    chosen, deps = independent_subset(images)
    return KernelCertificate([D.label for D in generators], images, chosen, deps, jac_rank, t2dim,
                             complete, subset_evidence([images[i] for i in chosen]))


def no_rational_divisor_class_deg1(lemma_conds: dict, kernel_cert: KernelCertificate | None) -> bool:
    return bool(lemma_conds.get("cond_i") and lemma_conds.get("cond_ii")
                and kernel_cert is not None and kernel_cert.verdict)
