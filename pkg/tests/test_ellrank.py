import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import class_span, delta as delta_oracle, elliptic_points
from sectobs import poly
from sectobs.curve import Genus2Curve, family_curve
from sectobs.ellrank import (
    DescentError,
    EllipticCurve,
    bielliptic_quotients,
    certify_rank,
    delta,
    integralize,
    jacobian_rank,
    models_isomorphic,
    point_search,
    pullback,
    quotient_models,
    two_descent,
)

F = Fraction


def test_quotients_of_c711(c711):
    g1, g2 = bielliptic_quotients(c711)
    assert poly.trim(g1) == poly.scale(poly.prod([[7, 1], [14, 1], [-11, 1]]), F(2))
    assert poly.trim(g2) == poly.scale(poly.prod([[1, 7], [1, 14], [1, -11]]), F(2))


def test_quotient_of_x6_plus_1():
    g1, _ = bielliptic_quotients(Genus2Curve((1, 0, 0, 0, 0, 0, 1)))
    assert poly.trim(g1) == [1, 0, 0, 1]


def test_quotients_reject_odd_sextic():
    with pytest.raises(DescentError):
        bielliptic_quotients(Genus2Curve((1, 1, 0, 0, 0, 0, 1)))


def test_no_q2_quotient_matches_known_factor(no_q2):
    g1, g2 = bielliptic_quotients(no_q2)
    target = [-27, -15, -1, 1]  # y^2 = x^3 - x^2 - 15x - 27
    assert models_isomorphic(g1, target)
    assert not models_isomorphic(g2, target)


def test_integralize_family_e1(c711):
    E1, _ = quotient_models(c711)
    assert sorted(E1.e) == [-28, -14, 22]
    assert E1.c == 2 and E1.s == 1
    assert E1.from_raw((F(-23, 2), F(45, 2))) == (F(-23), F(45))


def test_integralize_identity():
    E = integralize([0, -1, 0, 1])
    assert sorted(E.e) == [-1, 0, 1] and E.c == 1 and E.s == 1


def test_integralize_e2_round_trip(c711):
    _, g2 = bielliptic_quotients(c711)
    E2 = integralize(g2)
    for r in poly.rational_roots(g2):
        X, Y = E2.from_raw((r, F(0)))
        assert Y == 0 and X in E2.e
    res = certify_rank(E2)
    for Q in res.generators:
        raw = E2.to_raw(Q)
        assert poly.evaluate(g2, raw[0]) == raw[1] ** 2
        assert E2.from_raw(raw) == Q


def test_integralize_rejects_irrational_roots():
    with pytest.raises(DescentError):
        integralize([1, 0, 0, 1])


def test_delta_examples():
    E = EllipticCurve((-14, -28, 22))
    assert delta(E, (F(-14), F(0))) == (-14, 14)
    assert delta(E, None) == (1, 1)


def test_e1_selmer_bound(c711):
    E1, _ = quotient_models(c711)
    assert two_descent(E1).upper == 1


def test_point_search_examples(c711):
    E1, _ = quotient_models(c711)
    pts = point_search(E1, 100)
    assert (F(-23), F(45)) in [(x, abs(y)) for x, y in pts]
    assert {x for x, y in pts if y == 0} == {F(-28), F(-14), F(22)}
    assert all(y == 0 for _, y in point_search(E1, 1))


@pytest.mark.parametrize("which", [0, 1])
def test_c711_quotients_rank_one(c711, which):
    res = certify_rank(quotient_models(c711)[which])
    assert res.certified == 1 and res.sha2_dim == 0


def test_rank_zero_curve():
    res = certify_rank(EllipticCurve((1, 0, -1)))
    assert res.certified == 0
    assert sorted(res.selmer) == sorted(res.torsion_image)


def test_jacobian_rank():
    assert jacobian_rank([1, 1]) == 2
    assert jacobian_rank([0, 0]) == 0
    assert jacobian_rank([1, None]) is None


def _rat(v):
    """A QuadElement with zero irrational part as a Fraction."""
    if isinstance(v, Fraction):
        return v
    assert v.is_rational()
    return v.a


def test_pullback_d1(c711):
    x, y = pullback(c711, (F(-23, 2), F(45, 2)), 1).points[0]
    assert _rat(x * x) == F(-23, 2) and _rat(y) == F(45, 2)


def test_pullback_d2(c711):
    # x^2 = -77/23 corresponds to u0 = 1/x^2 = -23/77 on the raw E2 model
    _, g2 = bielliptic_quotients(c711)
    assert poly.evaluate(g2, F(-23, 77)) == F(60, 11) ** 2
    D2 = pullback(c711, (F(-23, 77), F(60, 11)), 2)
    for x, y in D2.points:
        assert _rat(x * x) == F(-77, 23)
        assert _rat(y * y) == F(420, 23) ** 2 * F(-77, 23)
        assert _rat(y / x) in (F(420, 23), F(-420, 23))


def test_pullback_square_u_gives_rational_points():
    C = Genus2Curve((17, 0, 0, 0, 0, 0, 1))
    D = pullback(C, (F(4), F(9)), 1)
    assert set(D.points) == {(F(2), F(9)), (F(-2), F(9))}


def test_pullback_rejects_u_zero_on_e2(c711):
    with pytest.raises(DescentError):
        pullback(c711, (F(0), F(1)), 2)


# ---------------------------------------------------------------------------
# properties

roots = st.lists(st.integers(-50, 50), min_size=3, max_size=3, unique=True)


@settings(max_examples=25)
@given(roots, st.integers(-6, 6))
def test_group_law_and_delta_homomorphism(e, k):
    E = EllipticCurve(tuple(e))
    pts = [P for P in point_search(E, 400) if P[1] != 0][:3]
    for P in pts:
        for Q in pts:
            R = E.add(P, Q)
            assert E.contains(R)
            if R is not None:
                a, b, c = delta(E, P), delta(E, Q), delta(E, R)
                assert class_span([a, b]) >= {c} and (c in class_span([a, b]))
                assert _prod(a, b) == c
        assert E.mul(k, P) == E.neg(E.mul(-k, P))


def _prod(a, b):
    from oracles import squarefree
    return (squarefree(a[0] * b[0]), squarefree(a[1] * b[1]))


@settings(max_examples=30)
@given(st.lists(st.integers(-30, 30).filter(lambda r: r != 0), min_size=3, max_size=3, unique=True),
       st.sampled_from([1, 2, -3, 5, F(1, 2), F(-7, 4)]))
def test_integralize_round_trip(r, c):
    g = poly.scale(poly.prod([[-F(x), 1] for x in r]), F(c))
    E = integralize(g)
    for x in r:
        assert E.from_raw((F(x), F(0)))[0] in E.e
    res = point_search(E, 200)
    for P in res:
        raw = E.to_raw(P)
        assert poly.evaluate(g, raw[0]) == raw[1] ** 2
        assert E.from_raw(raw) == P


def test_family_quotients_are_split():
    for p, a in [(7, -19), (23, 13), (31, 5), (47, 13)]:
        E1, E2 = quotient_models(family_curve(p, a))
        assert len(set(E1.e)) == 3 and len(set(E2.e)) == 3


@settings(max_examples=6)
@given(roots)
def test_descent_against_brute_force(e):
    E = EllipticCurve(tuple(e))
    res = certify_rank(E)
    assert res.lower <= res.upper
    sel = set(res.selmer)
    brute = elliptic_points(e, 10**4)
    images = class_span([delta_oracle(e, P) for P in brute])
    assert images <= sel
    assert {delta(E, P) for P in brute} == {delta_oracle(e, P) for P in brute}
