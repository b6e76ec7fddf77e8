from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectobs.curve import factor_sextic, family_curve
from sectobs.ellrank import certify_rank, pullback, quotient_models
from sectobs.jacobian import (
    JacobianError,
    MultiQuadField,
    _as_divisor,
    class_from_match,
    halves,
    matched_models,
    matched_pairs,
    reduce_sum,
)
from sectobs.mudescent import classes_equal, classes_product, mu

F = Fraction


def test_field_basis_drops_dependent_radicands():
    K = MultiQuadField([2, 8, 3, 6, F(1, 2)])
    assert K.r == 2


@pytest.mark.parametrize("q", [2, 3, 6, F(3, 8), -1, F(-1, 6), 49])
def test_field_sqrt(q):
    K = MultiQuadField([-1, 2, 3])
    r = K.sqrt(q)
    assert (r * r).is_rational() and (r * r).rational() == q


def test_field_sqrt_outside_raises():
    with pytest.raises(JacobianError):
        MultiQuadField([2, 3]).sqrt(5)
    with pytest.raises(JacobianError):
        MultiQuadField([2, 3]).sqrt(-2)


coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=40)
@given(st.lists(coef, min_size=8, max_size=8), st.lists(coef, min_size=8, max_size=8), st.integers(0, 7))
def test_field_arithmetic(a, b, sigma):
    K = MultiQuadField([-1, 2, 7])
    x = K.element(dict(enumerate(a)))
    y = K.element(dict(enumerate(b)))
    assert (x * y).act(sigma) == x.act(sigma) * y.act(sigma)
    assert (x + y).act(sigma) == x.act(sigma) + y.act(sigma)
    if not x.is_zero():
        assert (x * x.inverse()) == K.element(1)
        assert (y / x) * x == y


@pytest.fixture(scope="module")
def c711_models():
    C = family_curve(7, -11)
    E1, E2 = quotient_models(C)
    E2m = matched_models(E1, E2)
    return C, E1, E2m, certify_rank(E1), certify_rank(E2m)


def test_matched_models_roots_correspond(c711_models):
    _, E1, E2m, _, _ = c711_models
    for e1, e2 in zip(E1.e, E2m.e):
        r1 = F(e1) / (E1.s**2 * E1.c)
        r2 = F(e2) / (E2m.s**2 * E2m.c)
        assert r1 * r2 == 1


def test_halves_of_a_double(c711_models):
    _, E1, _, R1, _ = c711_models
    G = R1.generators[0]
    P = E1.add(G, G)
    K = MultiQuadField([a - b for a in E1.e for b in E1.e if a != b])
    H = halves(E1, P, K)
    assert len(H) == 4
    assert any(R[0].is_rational() and R[0].rational() == G[0] for R in H)
    for R in H:
        assert R[1] * R[1] == E1.rhs(R[0])


def test_reduce_sum_is_additive_for_mu(c711_models):
    C, E1, E2m, R1, R2 = c711_models
    fs = factor_sextic(C)
    K = MultiQuadField([2])
    for n1 in (1, 2, -1):
        P = E1.mul(n1, R1.generators[0])
        for n2 in (1, -2):
            Q = E2m.mul(n2, R2.generators[0])
            p1, q2 = E1.to_raw(P), E2m.to_raw(Q)
            u, v = reduce_sum(C, K.element(p1[0]), K.element(p1[1]), K.element(q2[0]), K.element(q2[1]))
            D = _as_divisor(C, u, v, "sum")
            assert D is not None
            lhs = classes_product(mu(C, fs, pullback(C, p1, 1)), mu(C, fs, pullback(C, q2, 2)))
            assert classes_equal(lhs, mu(C, fs, D))


def test_no_matches_on_c711(c711_models):
    _, _, _, R1, R2 = c711_models
    assert matched_pairs(R1, R2) == []


def test_class_from_match_7_m7():
    C = family_curve(7, -7)
    E1, E2 = quotient_models(C)
    E2m = matched_models(E1, E2)
    ms = matched_pairs(certify_rank(E1), certify_rank(E2m))
    assert [m.image for m in ms] == [(2, 1)]
    D = class_from_match(C, E1, E2m, ms[0])
    assert D.on_curve(C)
    assert D.u_poly() == (F(8), F(3), F(1))  # x = (-3 +- sqrt(-23)) / 2


def test_match_through_a_torsion_image():
    # the common image is that of an E1 2-torsion point, but the E2 side is not
    # the matching torsion point, so the class is new
    from sectobs.ellrank import delta

    C = family_curve(7, 15)
    E1, E2 = quotient_models(C)
    E2m = matched_models(E1, E2)
    ms = matched_pairs(certify_rank(E1), certify_rank(E2m))
    assert [m.image for m in ms] == [(1, 14)]
    assert ms[0].image in {delta(E1, T) for T in E1.two_torsion()}
    assert class_from_match(C, E1, E2m, ms[0]).on_curve(C)
