"""Per-curve analysis, certificates, the family sweep and offline verification.

A certificate is a plain JSON tree.  Arithmetic values (coefficients,
coordinates, square-class representatives) are exact fraction strings;
counts, dimensions, masks and flags stay JSON integers and booleans.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import SCHEMA_VERSION, __version__, _accel, poly
from .algebra import (
    REAL,
    QuadElement,
    field_is_square,
    is_prime,
    is_square_in_Qp,
    rational_sqrt,
    squarefree_part,
)
from .curve import (
    CurveError,
    DivisorClass,
    Genus2Curve,
    factor_sextic,
    family_curve,
    lemma_conditions,
    two_torsion,
    two_torsion_classes,
)
from .ellrank import (
    DEFAULT_HEIGHT_BOUND,
    DescentError,
    bielliptic_quotients,
    certify_rank,
    delta,
    integralize,
    jacobian_rank,
    pullback,
    span,
    two_descent,
)
from .jacobian import JacobianError, class_from_match, matched_models, matched_pairs
from .localpoints import (
    LocalReport,
    has_Qp_point,
    is_everywhere_locally_solvable,
    real_search,
    verify_witness,
)
from .mudescent import (
    DEFAULT_RULE,
    BooleanClass,
    KernelCertificate,
    certify_kernel,
    classes_product,
    exhaustive_w,
    mu,
    trivializing_w,
)

TOP_KEYS = ("schema_version", "curve", "local", "lemma", "torsion", "quotients", "mu", "kernel",
            "verdicts", "assumptions", "meta")
STATUSES = ("certified", "failed-local", "failed-independence", "inconclusive")
CURVE_POINT_BOUND = 40
EXHAUSTIVE_SUPPORT_LIMIT = 12


class CertificateError(ValueError):
    """A certificate file that cannot be read: bad JSON, schema or field."""


class InputError(ValueError):
    """User input that does not describe a supported curve or search."""


# ---------------------------------------------------------------------------
# JSON helpers


def _canon(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, QuadElement):
        return {"a": str(obj.a), "b": str(obj.b), "d": obj.d}
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _digest(data: dict) -> str:
    body = {k: v for k, v in data.items() if k != "meta"}
    return hashlib.sha256(dumps(body).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# certificate


@dataclass
class CurveCertificate:
    data: dict

    @property
    def verdicts(self) -> dict:
        return self.data["verdicts"]

    @property
    def status(self) -> str:
        return self.verdicts["status"]

    @property
    def digest(self) -> str:
        return _digest(self.data)

    def to_json(self) -> dict:
        return self.data

    def __eq__(self, other) -> bool:
        return isinstance(other, CurveCertificate) and dumps(self.data) == dumps(other.data)


def emit_certificate(cert: CurveCertificate, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dumps(cert.data))
    tmp.replace(path)
    return path


def load_certificate(path) -> CurveCertificate:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CertificateError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"{path}: not valid JSON ({exc})") from exc
    return CurveCertificate(validate_schema(data))


def validate_schema(data) -> dict:
    if not isinstance(data, dict):
        raise CertificateError("certificate root must be an object")
    if "schema_version" not in data:
        raise CertificateError("missing field 'schema_version'")
    if data["schema_version"] != SCHEMA_VERSION:
        raise CertificateError(f"unsupported version {data['schema_version']!r} "
                               f"(this tool reads {SCHEMA_VERSION})")
    for key in TOP_KEYS:
        if key not in data:
            raise CertificateError(f"missing field {key!r}")
    extra = set(data) - set(TOP_KEYS)
    if extra:
        raise CertificateError(f"unknown field {sorted(extra)[0]!r}")
    try:
        _curve_from_json(data["curve"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise CertificateError(f"field 'curve' is malformed: {exc}") from exc
    v = data["verdicts"]
    for key in ("everywhere_locally_solvable", "no_rational_deg1_class", "obstruction_certified", "status"):
        if not isinstance(v, dict) or key not in v:
            raise CertificateError(f"missing field 'verdicts.{key}'")
    if v["status"] not in STATUSES:
        raise CertificateError(f"field 'verdicts.status' has unknown value {v['status']!r}")
    return data


def _curve_from_json(d: dict) -> Genus2Curve:
    coeffs = [Fraction(c) for c in d["coeffs"]]
    return Genus2Curve(tuple(coeffs), d.get("label", ""))


# ---------------------------------------------------------------------------
# input parsing


def parse_family(text: str) -> tuple[int, int]:
    try:
        p, a = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"--family expects 'p,a' with integers, got {text!r}") from exc
    return p, a


def parse_coeffs(text: str) -> Genus2Curve:
    """f6,f5,...,f0 as integers or fractions."""
    try:
        high = [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse coefficients {text!r}") from exc
    if len(high) != 7:
        raise InputError(f"expected 7 coefficients f6..f0, got {len(high)}")
    try:
        return Genus2Curve.from_high(high)
    except CurveError as exc:
        raise InputError(str(exc)) from exc


def make_family_curve(p: int, a: int) -> Genus2Curve:
    try:
        return family_curve(p, a)
    except CurveError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# analysis


def rational_points(C: Genus2Curve, bound: int = CURVE_POINT_BOUND) -> list:
    """Affine points with x = m/n, |m|, n <= bound, and the points at infinity."""
    den = math.lcm(*(c.denominator for c in C.coeffs))
    f = [int(c * den * den) for c in C.coeffs]  # same square class as F
    out = []
    y_inf = rational_sqrt(C.coeffs[6])
    if y_inf is not None:
        out.append({"infinity": True, "y_over_x3": str(y_inf)})
    for n in range(1, bound + 1):
        for m in range(-bound, bound + 1):
            if math.gcd(m, n) != 1:
                continue
            val = sum(c * m**i * n ** (6 - i) for i, c in enumerate(f))
            if val >= 0 and math.isqrt(val) ** 2 == val:
                x = Fraction(m, n)
                y = rational_sqrt(C.F(x))
                assert y is not None
                out.append({"x": str(x), "y": str(y)})
    return out


def _assumptions() -> list[dict]:
    return [
        {
            "name": "kolyvagin",
            "kind": "cited",
            "statement": "For an elliptic curve of analytic rank at most 1 the Mordell-Weil rank "
                         "equals the analytic rank and Sha is finite.",
            "use": "finiteness of Sha for quotients of rank 1, given that their analytic rank is 1 "
                   "(analytic ranks are not computed here); the ranks themselves come from a "
                   "complete 2-descent matched by explicit points",
        },
        {
            "name": "finite-sha",
            "kind": "cited",
            "statement": "The Tate-Shafarevich group of the Jacobian is finite.",
            "use": "required to pass from 'no rational divisor class of degree 1' and positive "
                   "quotient ranks to the absence of a global section; status 'certified' is "
                   "only given when both quotients have rank 1, where this follows from kolyvagin",
            "corroboration": "Sha[2] of both elliptic quotients is computed to be 0",
        },
        {
            "name": "sections-criterion",
            "kind": "cited",
            "statement": "A curve with points over R and every Q_p, no rational divisor class of "
                         "degree 1, and elliptic quotients of positive rank with finite Sha has "
                         "sections of the fundamental exact sequence everywhere locally but none "
                         "globally.",
            "use": "turns the computed verdicts into the section statement",
        },
        {
            "name": "degree-one-lemma",
            "kind": "computed-criterion",
            "statement": "If F has no rational root, no Galois-compatible split of its roots into "
                         "two triples exists, and ker(mu) = 2J(Q), then there is no rational "
                         "divisor class of degree 1.",
            "use": "no_rational_deg1_class",
        },
    ]


def analyze(C: Genus2Curve, family: tuple[int, int] | None = None,
            height_bound: int = DEFAULT_HEIGHT_BOUND, rule: str = DEFAULT_RULE) -> CurveCertificate:
    """Run curve -> local points -> quotient ranks -> descent map on C.

    Later stages are skipped once an earlier one decides the outcome, but a
    complete certificate is produced either way.
    """
    t0 = time.perf_counter()
    data: dict = {k: None for k in TOP_KEYS}
    data["schema_version"] = SCHEMA_VERSION
    data["assumptions"] = _assumptions()
    reasons: list[str] = []

    # curve
    fs = factor_sextic(C, strict=False)
    pts = rational_points(C)
    data["curve"] = {
        "label": C.label,
        "coeffs": [str(c) for c in C.coeffs],
        "equation": C.describe(),
        "family": list(family) if family else None,
        "even": C.is_even(),
        "factorization": {
            "unit": str(fs.unit),
            "factors": [[str(c) for c in f.coeffs] for f in fs.factors],
            "profile": sorted(f.degree for f in fs.factors),
        },
        "rational_points": pts,
        "point_search_bound": CURVE_POINT_BOUND,
    }

    # local
    els, reports = is_everywhere_locally_solvable(C, family)
    data["local"] = {
        "everywhere_locally_solvable": els,
        "failures": [r.place for r in reports if not r.solvable],
        "reports": [_canon(r.to_json()) for r in reports],
    }

    # lemma and torsion
    lemma = None
    t2dim = None
    torsion_classes: list[DivisorClass] = []
    if fs.supported:
        lemma = lemma_conditions(fs)
        t2dim = two_torsion(fs).dim
        torsion_classes = two_torsion_classes(fs, C)
        data["lemma"] = _canon(lemma)
        data["torsion"] = {"dim": t2dim, "classes": [_canon(D.to_json()) for D in torsion_classes]}
    else:
        data["lemma"] = {"supported": False, "reason": "F has an irreducible factor of degree > 2"}
        data["torsion"] = {"dim": None, "classes": []}

    data["quotients"] = {"computed": False}
    data["mu"] = {"rule": rule, "generators": []}
    ranks: list = [None, None]
    complete = False
    generators: list[DivisorClass] = []

    if not els:
        reasons.append("no point over " + ", ".join(str(p) for p in data["local"]["failures"]))
    elif pts:
        reasons.append("C has a rational point")
    elif lemma is None:
        reasons.append("the descent map needs F to split into factors of degree <= 2")
    elif not (lemma["cond_i"] and lemma["cond_ii"]):
        reasons.append("root configuration hypotheses fail")
    elif not C.is_even():
        reasons.append("C is not bielliptic in the even form")
    else:
        try:
            qdata, ranks, generators, complete = _quotients(C, height_bound)
            data["quotients"] = qdata
        except (DescentError, JacobianError) as exc:
            data["quotients"] = {"computed": False, "error": str(exc)}
            reasons.append(f"quotient analysis unavailable: {exc}")

    kernel: KernelCertificate | None = None
    if data["quotients"].get("computed"):
        gens = torsion_classes + generators
        jr = jacobian_rank(ranks)
        kernel = certify_kernel(C, fs, gens, jr, t2dim, rule, complete=complete and jr is not None)
        data["mu"]["generators"] = [
            {"label": D.label, "divisor": _canon(D.to_json()), "image": _canon(img.to_json())}
            for D, img in zip(gens, kernel.images)
        ]
        data["kernel"] = _canon(kernel.to_json())

    # verdicts
    no_deg1: bool | None = None
    if pts:
        no_deg1 = False
    elif lemma is not None and lemma["cond_i"] and lemma["cond_ii"] and kernel is not None and kernel.verdict:
        no_deg1 = True
    positive = all(r is not None and r >= 1 for r in ranks)
    obstruction = bool(els and no_deg1 and positive)
    rank_one = ranks == [1, 1]
    status = _status(els, obstruction, rank_one, lemma, ranks, kernel, pts, reasons)
    data["verdicts"] = {
        "everywhere_locally_solvable": els,
        "no_rational_deg1_class": no_deg1,
        "quotient_ranks_positive": positive if all(r is not None for r in ranks) else None,
        "obstruction_certified": obstruction,
        "quotient_ranks_one": rank_one if all(r is not None for r in ranks) else None,
        "conditional_on": ["finite-sha", "sections-criterion"],
        "status": status,
        "reasons": reasons,
        "evidence": {
            "everywhere_locally_solvable": "local",
            "no_rational_deg1_class": "lemma, kernel, curve.rational_points",
            "quotient_ranks_positive": "quotients",
        },
    }
    data["meta"] = {
        "tool": "sectobs",
        "version": __version__,
        "height_bound": height_bound,
        "backend": _accel.BACKEND,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    return CurveCertificate(data)


def _status(els, obstruction, rank_one, lemma, ranks, kernel, pts, reasons) -> str:
    """Search status.  "certified" also needs both quotient ranks equal to 1,
    the case where finiteness of Sha follows from the cited rank-one theorem."""
    if not els:
        return "failed-local"
    if obstruction and rank_one:
        return "certified"
    if obstruction:
        reasons.append("a quotient has rank > 1, outside the cited finiteness of Sha")
        return "inconclusive"
    if pts or (lemma is not None and not (lemma["cond_i"] and lemma["cond_ii"])):
        return "failed-independence"
    if any(r == 0 for r in ranks):
        reasons.append("an elliptic quotient has rank 0")
        return "failed-independence"
    if kernel is not None and kernel.complete and not kernel.verdict:
        reasons.append(f"mu has rank {kernel.image_rank} on J(Q)/2J(Q) of dimension "
                       f"{kernel.predicted_log2_size}")
        return "failed-independence"
    if kernel is not None and not kernel.complete:
        reasons.append("quotient ranks not certified")
    return "inconclusive"


def _quotients(C: Genus2Curve, height_bound: int):
    g1, g2 = bielliptic_quotients(C)
    E1 = integralize(g1, "E1")
    E2 = matched_models(E1, integralize(g2, "E2"))
    R1 = certify_rank(E1, height_bound)
    R2 = certify_rank(E2, height_bound)
    ranks = [R1.certified, R2.certified]
    gens = [pullback(C, E1.to_raw(P), 1) for P in R1.generators]
    gens += [pullback(C, E2.to_raw(P), 2) for P in R2.generators]
    matched = []
    for m in matched_pairs(R1, R2):
        D = class_from_match(C, E1, E2, m)
        gens.append(D)
        matched.append({"image": list(m.image), "P1": _pt(m.P1), "P2": _pt(m.P2),
                        "divisor": _canon(D.to_json())})
    complete = all(r is not None for r in ranks)
    qdata = {
        "computed": True,
        "E1": dict(R1.to_json(), raw=[str(c) for c in g1]),
        "E2": dict(R2.to_json(), raw=[str(c) for c in g2]),
        "jacobian_rank": jacobian_rank(ranks),
        "matched_pairs": matched,
        "generators_complete": complete,
    }
    return qdata, ranks, gens, complete


def _pt(P):
    return None if P is None else [str(P[0]), str(P[1])]


# ---------------------------------------------------------------------------
# family search


@dataclass(frozen=True)
class SearchRow:
    p: int
    a: int
    status: str
    reason: str
    certificate: str
    digest: str

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "status": self.status, "reason": self.reason,
                "certificate": self.certificate, "digest": self.digest}


def family_pairs(pmax: int, amin: int, amax: int) -> list[tuple[int, int]]:
    if pmax < 7:
        raise InputError("pmax must be at least 7")
    if amin > amax:
        raise InputError("amin must not exceed amax")
    out = []
    for p in range(7, pmax + 1, 8):
        if not is_prime(p):
            continue
        out += [(p, a) for a in range(amin, amax + 1) if a not in (0, p, 2 * p)]
    return out


def default_cache_dir() -> Path:
    env = os.environ.get("SECTOBS_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "sectobs"


def _cache_name(p: int, a: int, height_bound: int) -> str:
    return f"C_{p}_{a}.h{height_bound}.v{SCHEMA_VERSION}-{__version__}.json"


def _analyze_pair(args) -> dict:
    p, a, height_bound = args
    return analyze(family_curve(p, a), (p, a), height_bound).data


def search_family(pmax: int, amin: int, amax: int, jobs: int = 1, cache: str | Path | None = None,
                  out: str | Path | None = None, height_bound: int = DEFAULT_HEIGHT_BOUND,
                  use_cache: bool = True) -> list[SearchRow]:
    """Analyze every C_{p,a} with p = 7 mod 8 prime, p <= pmax, amin <= a <= amax.

    Per-pair failures are recorded in the rows; they never stop the sweep.
    """
    pairs = family_pairs(pmax, amin, amax)
    cache_dir = Path(cache) if cache else (default_cache_dir() if use_cache else None)
    results: dict[tuple[int, int], dict] = {}
    todo = []
    for p, a in pairs:
        hit = cache_dir / _cache_name(p, a, height_bound) if cache_dir else None
        if hit is not None and hit.exists():
            try:
                results[(p, a)] = load_certificate(hit).data
                continue
            except CertificateError:
                pass
        todo.append((p, a, height_bound))
    if todo:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                done = list(ex.map(_safe_analyze_pair, todo))
        else:
            done = [_safe_analyze_pair(t) for t in todo]
        for (p, a, _), data in zip(todo, done):
            results[(p, a)] = data
            if cache_dir is not None and not data["meta"].get("error"):
                emit_certificate(CurveCertificate(data), cache_dir / _cache_name(p, a, height_bound))
    rows = []
    out_dir = Path(out) if out else None
    for p, a in pairs:
        data = results[(p, a)]
        name = f"C_{p}_{a}.json"
        if out_dir is not None:
            emit_certificate(CurveCertificate(data), out_dir / name)
        v = data["verdicts"]
        rows.append(SearchRow(p, a, v["status"], "; ".join(v.get("reasons", [])), name, _digest(data)))
    if out_dir is not None:
        (out_dir / "rows.json").write_text(json.dumps([r.to_json() for r in rows], indent=2) + "\n")
    return rows


def _safe_analyze_pair(args) -> dict:
    try:
        return _analyze_pair(args)
    except Exception as exc:  # recorded in the row; the sweep continues
        p, a, h = args
        data = {k: None for k in TOP_KEYS}
        data.update(schema_version=SCHEMA_VERSION, assumptions=[],
                    curve={"label": f"C_{{{p},{a}}}", "family": [p, a],
                           "coeffs": [str(c) for c in family_curve(p, a).coeffs]},
                    verdicts={"everywhere_locally_solvable": None, "no_rational_deg1_class": None,
                              "obstruction_certified": False, "status": "inconclusive",
                              "reasons": [f"analysis error: {type(exc).__name__}: {exc}"]},
                    meta={"tool": "sectobs", "version": __version__, "height_bound": h, "error": True})
        return data


def certified_pairs(rows: Iterable[SearchRow]) -> set[tuple[int, int]]:
    return {(r.p, r.a) for r in rows if r.status == "certified"}


# ---------------------------------------------------------------------------
# offline verification


@dataclass
class VerifyReport:
    checks: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify(cert: CurveCertificate | dict) -> VerifyReport:
    """Re-check every witness in a certificate.

    Positive local reports, points, descent images, mu-images and the
    subset evidence are checked directly.  Negative local reports and the
    Selmer listing are re-derived, since their evidence is an exhaustion.
    """
    data = cert.data if isinstance(cert, CurveCertificate) else validate_schema(cert)
    fails: list[str] = []
    n = 0

    def check(cond: bool, msg: str):
        nonlocal n
        n += 1
        if not cond:
            fails.append(msg)

    if (data.get("meta") or {}).get("error"):
        return VerifyReport(1, ["certificate records an analysis error, there is nothing to verify"])

    C = _curve_from_json(data["curve"])
    fam = data["curve"].get("family")
    if fam:
        check(family_curve(*fam).coeffs == C.coeffs, "curve does not match its family parameters")

    for pt in data["curve"].get("rational_points") or []:
        if pt.get("infinity"):
            y = Fraction(pt["y_over_x3"])
            check(y * y == C.coeffs[6], "point at infinity does not lie on C")
        else:
            check(Fraction(pt["y"]) ** 2 == C.F(Fraction(pt["x"])), f"point {pt} is not on C")

    # local
    loc = data["local"]
    for rep in loc["reports"]:
        r = LocalReport.from_json(rep)
        check(_verify_local(C, r, fam), f"local report at {r.place} does not re-check")
    check(loc["everywhere_locally_solvable"] == all(r["solvable"] for r in loc["reports"]),
          "local verdict disagrees with the reports")

    fs = factor_sextic(C, strict=False)
    if fs.supported:
        lemma = _canon(lemma_conditions(fs))
        check(lemma == data["lemma"], "lemma conditions do not re-derive")
        check(two_torsion(fs).dim == data["torsion"]["dim"], "2-torsion dimension does not re-derive")
    for d in data["torsion"]["classes"]:
        check(DivisorClass.from_json(d).on_curve(C), f"torsion class {d['label']} is not on C")

    q = data["quotients"]
    if q and q.get("computed"):
        n0 = len(fails)
        _verify_quotients(C, q, check)
        if len(fails) > n0:
            q = None

    # mu images and kernel evidence
    gens = data["mu"]["generators"]
    images = []
    for g in gens:
        D = DivisorClass.from_json(g["divisor"])
        check(D.on_curve(C), f"generator {g['label']} is not on C")
        img = BooleanClass.from_json(g["image"])
        images.append(img)
        if fs.supported and D.on_curve(C):
            fresh = mu(C, fs, D, data["mu"]["rule"])
            check(_same_class(fresh, img), f"mu-image of {g['label']} does not re-derive")
    k = data["kernel"]
    if k is not None:
        _verify_kernel(k, images, check)

    _verify_verdicts(data, check)
    return VerifyReport(n, fails)


def _same_class(a: BooleanClass, b: BooleanClass) -> bool:
    if a.fields != b.fields:
        return False
    return all(field_is_square(x.rep * y.rep) for x, y in zip(a.components, b.components))


def _verify_local(C: Genus2Curve, r: LocalReport, fam) -> bool:
    w = r.witness
    if r.method == "family-fast-path":
        v = Fraction(w["squares"])
        if not is_square_in_Qp(v, r.place):
            return False
        if squarefree_part(v)[0] == squarefree_part(C.coeffs[6])[0]:
            return True  # points at infinity
        return not poly.divmod_poly(list(C.coeffs), [-v, 0, 1])[1]  # (sqrt v, 0) on C
    if r.place == REAL:
        if r.method == "leading-coefficient":
            return C.coeffs[6] > 0
        return real_search([C.coeffs], [6])[0] == r.solvable
    if r.solvable:
        f = poly.content_integral(C.coeffs)
        return verify_witness(f, 6, r.place, w)
    return has_Qp_point(C, r.place).solvable is False


def _verify_quotients(C: Genus2Curve, q: dict, check) -> None:
    g1, g2 = bielliptic_quotients(C)
    E1 = integralize(g1, "E1")
    E2 = matched_models(E1, integralize(g2, "E2"))
    for name, E, raw in (("E1", E1, g1), ("E2", E2, g2)):
        d = q[name]
        check(d["raw"] == [str(c) for c in raw], f"{name}: quotient model does not re-derive")
        check(d["model"]["e"] == list(E.e) and d["model"]["c"] == str(E.c) and d["model"]["s"] == str(E.s),
              f"{name}: integral model does not re-derive")
        fresh = two_descent(E)
        sel = {tuple(x) for x in d["selmer"]}
        check(sel == set(fresh.selmer), f"{name}: Selmer group does not re-derive")
        imgs = []
        for P, img in zip(d["generators"], d["generator_images"]):
            Pf = (Fraction(P[0]), Fraction(P[1]))
            check(E.contains(Pf), f"{name}: generator {P} is not on the curve")
            check(list(delta(E, Pf)) == img, f"{name}: delta-image of {P} does not re-derive")
            check(tuple(img) in sel, f"{name}: delta-image {img} is outside Selmer")
            imgs.append(tuple(img))
        known = span(imgs + [tuple(t) for t in d["torsion_image"]])
        lower = len(known).bit_length() - 1 - 2
        check(lower == d["rank_lower"], f"{name}: rank lower bound does not re-derive")
        check(fresh.upper == d["rank_upper"], f"{name}: rank upper bound does not re-derive")
        certified = lower if lower == fresh.upper else None
        check(certified == d["certified_rank"], f"{name}: certified rank does not re-derive")
    for m in q["matched_pairs"]:
        D = DivisorClass.from_json(m["divisor"])
        check(D.on_curve(C), "matched-pair divisor is not on C")


def _verify_kernel(k: dict, images: Sequence[BooleanClass], check) -> None:
    sel = k["selected"]
    chosen = [images[i] for i in sel]

    def product(mask: int, base: BooleanClass | None = None) -> BooleanClass | None:
        out = base
        for j, c in enumerate(chosen):
            if mask >> j & 1:
                out = c if out is None else classes_product(out, c)
        return out

    for dep in k["dependencies"]:
        prod = product(dep["mask"], images[dep["index"]])
        w = int(dep["w"])
        check(all(field_is_square(c.rep * w) for c in prod.components),
              f"dependency of generator {dep['index']} does not re-check")
    checks = {e["mask"]: e for e in k["subset_checks"]}
    check(len(checks) == (1 << len(sel)) - 1, "subset evidence is incomplete")
    for mask, e in checks.items():
        prod = product(mask)
        if e["trivial"]:
            w = int(e["w"])
            check(all(field_is_square(c.rep * w) for c in prod.components),
                  f"subset {mask}: w = {w} does not trivialize")
        elif len(e.get("support", [])) <= EXHAUSTIVE_SUPPORT_LIMIT:
            check(exhaustive_w(prod) is None, f"subset {mask}: found a trivializing w")
        else:
            check(trivializing_w(prod) is None, f"subset {mask}: found a trivializing w")
    n_sel = len(sel)
    check(k["image_rank"] == n_sel, "image rank disagrees with the selected generators")
    check(k["kernel_is_2J"] == (k["log2_J_mod_2J"] is not None and n_sel == k["log2_J_mod_2J"]),
          "kernel verdict disagrees with its evidence")


def _verify_verdicts(data: dict, check) -> None:
    v = data["verdicts"]
    els = data["local"]["everywhere_locally_solvable"]
    check(v["everywhere_locally_solvable"] == els, "verdict disagrees with the local section")
    lemma = data["lemma"] or {}
    k = data["kernel"]
    if v["no_rational_deg1_class"] is True:
        check(bool(lemma.get("cond_i") and lemma.get("cond_ii") and k and k["kernel_is_2J"]),
              "no_rational_deg1_class lacks its evidence")
        check(not data["curve"]["rational_points"], "a rational point contradicts no_rational_deg1_class")
    if v["obstruction_certified"]:
        q = data["quotients"] or {}
        ranks = [q.get(n, {}).get("certified_rank") for n in ("E1", "E2")]
        check(els and v["no_rational_deg1_class"] is True and all(r is not None and r >= 1 for r in ranks),
              "obstruction verdict lacks its evidence")
    if v["status"] == "certified":
        check(v["obstruction_certified"] and v.get("quotient_ranks_one") is True,
              "certified status lacks its verdicts")
    if v["status"] == "failed-local":
        check(not els, "failed-local status on a locally solvable curve")
