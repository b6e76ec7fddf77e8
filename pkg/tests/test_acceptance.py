"""Acceptance criteria 1-7.  A summary line per criterion is printed at the
end of the pytest run (see conftest.py)."""

import os
import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NO_Q2_POINT
from oracles import class_span, delta as delta_oracle, elliptic_points, qp_point_brute
from sectobs import poly
from sectobs.algebra import REAL, QuadElement
from sectobs.curve import Genus2Curve, factor_sextic, family_curve, two_torsion_classes
from sectobs.ellrank import EllipticCurve, certify_rank, pullback, two_descent
from sectobs.localpoints import has_Qp_point
from sectobs.mudescent import f2_rank, mu, norm_product
from sectobs.pipeline import analyze, certified_pairs, search_family

F = Fraction
acceptance = pytest.mark.acceptance

LISTED_PAIRS = {(7, -19), (7, -11), (23, 13), (31, -14), (31, -11), (31, 5), (31, 13), (47, 13)}


# 1 ---------------------------------------------------------------------------

@pytest.mark.slow
@acceptance(1, "search --pmax 50 --amin -20 --amax 20 certifies exactly the eight listed pairs")
def test_criterion_1_eight_pairs(tmp_path):
    jobs = min(8, os.cpu_count() or 1)
    t0 = time.perf_counter()
    rows = search_family(50, -20, 20, jobs=jobs, cache=tmp_path / "cache")
    got = certified_pairs(rows)
    print(f"\nsweep: {len(rows)} pairs in {time.perf_counter() - t0:.0f}s with {jobs} worker(s)")
    print(f"certified: {sorted(got)}")
    print(f"missing: {sorted(LISTED_PAIRS - got)}  extra: {sorted(got - LISTED_PAIRS)}")
    for r in rows:
        if (r.p, r.a) in LISTED_PAIRS ^ got:
            print(f"  ({r.p},{r.a}) {r.status}: {r.reason}")
    assert got == LISTED_PAIRS


# 2 ---------------------------------------------------------------------------

@acceptance(2, "C_{7,-11} end to end: ELS, 2-torsion dim 2, ranks 1+1, J rank 2, mu-rank 4, no degree-1 class, < 60 s")
def test_criterion_2_c711():
    t0 = time.perf_counter()
    C = family_curve(7, -11)
    cert = analyze(C, (7, -11))
    elapsed = time.perf_counter() - t0
    d = cert.data
    assert d["verdicts"]["everywhere_locally_solvable"] is True
    assert d["torsion"]["dim"] == 2
    assert d["quotients"]["E1"]["certified_rank"] == 1
    assert d["quotients"]["E2"]["certified_rank"] == 1
    assert d["kernel"]["jacobian_rank"] == 2

    fs = factor_sextic(C)
    T1, T2 = [t for t in two_torsion_classes(fs, C) if t.u_poly()[0] in (7, -11)]
    D1 = pullback(C, (F(-23, 2), F(45, 2)), 1)
    D2 = pullback(C, (F(-23, 77), F(60, 11)), 2)
    assert f2_rank([mu(C, fs, D) for D in (T1, T2, D1, D2)]) == 4
    assert d["kernel"]["image_rank"] == 4

    assert d["verdicts"]["no_rational_deg1_class"] is True
    assert d["verdicts"]["obstruction_certified"] is True
    assert elapsed < 60
    print(f"\nC_{{7,-11}} analyzed in {elapsed:.2f}s")


# 3 ---------------------------------------------------------------------------

@acceptance(3, "3x^6 + 8x^4 + 2x^2 - 6 fails locally exactly at p = 2")
def test_criterion_3_no_q2():
    cert = analyze(Genus2Curve.from_high(NO_Q2_POINT))
    reps = cert.data["local"]["reports"]
    failing = [r["place"] for r in reps if not r["solvable"]]
    assert failing == [2]
    assert any(r["place"] == REAL and r["solvable"] for r in reps)
    assert cert.verdicts["everywhere_locally_solvable"] is False
    assert cert.verdicts["obstruction_certified"] is False


# 4 ---------------------------------------------------------------------------

_c4_seen: list = []


@acceptance(4, "2-descent vs brute force to height 1e6 on 20 random curves")
@settings(max_examples=20, derandomize=True, database=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=3, unique=True))
def test_criterion_4_descent_oracle(e):
    E = EllipticCurve(tuple(e))
    upper = two_descent(E).upper
    res = certify_rank(E)
    assert res.lower <= res.upper == upper
    selmer = set(res.selmer)
    brute = elliptic_points(e, 10**6)
    images = class_span([delta_oracle(e, P) for P in brute])
    assert images <= selmer
    brute_rank = len(images).bit_length() - 1 - 2
    assert brute_rank <= upper
    for P in res.points:
        assert delta_oracle(e, P) in selmer
    saturated = len(images) == len(selmer)
    if saturated:
        assert res.lower == upper == brute_rank
    _c4_seen.append((tuple(e), saturated))


@acceptance(4, "2-descent vs brute force to height 1e6 on 20 random curves")
def test_criterion_4_sample_size():
    curves = dict(_c4_seen)
    print(f"\n{len(curves)} curves, {sum(curves.values())} saturated by brute force")
    assert len(curves) >= 20


# 5 ---------------------------------------------------------------------------

@acceptance(5, "mu: homomorphism law, norm-product invariant, class_is_trivial vs brute force")
def test_criterion_5_mu_suite():
    import test_mudescent as tm

    C = family_curve(7, -11)
    fs = factor_sextic(C)
    from sectobs.ellrank import quotient_models
    from sectobs.mudescent import class_is_trivial, classes_equal, classes_product

    for which in (1, 2):
        E = quotient_models(C)[which - 1]
        pts = tm._points(E, certify_rank(E))
        rng = random.Random(50 + which)
        for _ in range(50):
            P, Q = rng.choice(pts), rng.choice(pts)
            a = mu(C, fs, tm._pull(C, E, which, P))
            b = mu(C, fs, tm._pull(C, E, which, Q))
            c = mu(C, fs, tm._pull(C, E, which, E.add(P, Q)))
            assert classes_equal(classes_product(a, b), c)

    for T in two_torsion_classes(fs, C):
        n = norm_product(mu(C, fs, T))
        assert _square(n)

    rng = random.Random(2024)
    from sectobs.algebra import SquareClass
    from sectobs.mudescent import BooleanClass
    checked = 0
    while checked < 100:
        vals = tm.random_class(rng)
        if any(a == 0 and b == 0 for a, b in vals):
            continue
        c = BooleanClass(tuple(SquareClass(d, QuadElement(F(a), F(b), d)) for (a, b), d in zip(vals, tm.FIELDS)))
        assert class_is_trivial(c) == tm.brute_trivial(vals)
        checked += 1


def _square(q):
    from oracles import rational_is_square
    return rational_is_square(q)


# 6 ---------------------------------------------------------------------------

@acceptance(6, "has_Qp_point agrees with mod p^6 brute force on 50 sextics for p = 2, 3, 5, 7")
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_criterion_6_local_oracle(p):
    from test_localpoints import random_sextic

    rng = random.Random(1000 + p)
    escalated = 0
    for _ in range(50):
        f, C = random_sextic(rng, p)
        expected = qp_point_brute(f, p, 6)
        if expected is None:  # residues mod p^6 do not decide: raise the precision
            escalated += 1
            expected = qp_point_brute(f, p, 8)
        assert expected is not None, f
        assert has_Qp_point(C, p).solvable == expected, f
    print(f"\np={p}: 50 sextics agree ({escalated} needed precision p^8)")


# 7 ---------------------------------------------------------------------------

@acceptance(7, "D1 check: y = (45/2)sqrt(-23/2) is off the curve, (sqrt(-23/2), 45/2) is on it and pulls back from E1")
def test_criterion_7_d1_correction():
    C = family_curve(7, -11)
    d = -46  # sqrt(-23/2) = sqrt(-46) / 2
    x = QuadElement(F(0), F(1, 2), d)
    assert x * x == QuadElement.rational(F(-23, 2), d)
    Fx = poly.evaluate(list(C.coeffs), x)

    bad_y = x * F(45, 2)
    assert bad_y * bad_y != Fx

    corrected_y = QuadElement.rational(F(45, 2), d)
    assert corrected_y * corrected_y == Fx

    D1 = pullback(C, (F(-23, 2), F(45, 2)), 1)
    expected = {(x, corrected_y), (-x, corrected_y)}
    assert set(D1.points) == expected
