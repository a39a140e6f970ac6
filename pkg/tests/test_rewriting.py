from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from linrew import (
    MonomialOrder,
    NoStepError,
    Polygraph2,
    QQ,
    Quiver,
    Rule,
    RewriteError,
    certify_termination,
    check_confluence,
    find_redexes,
    ideal_member,
    leftmost_step,
    monomial_poly,
    monomialize,
    nf,
    normal_form,
    pbw_check,
    quotient_dimension,
    rightmost_step,
    standard_basis,
)

from conftest import make_poly


def certified(P):
    P.termination_certificate = certify_termination(P, P.order)
    check_confluence(P)
    return P


@pytest.fixture
def sys_ab():
    """ba -> ab over two letters; convergent, commutative polynomial ring."""
    Q = Quiver.free("ab")
    order = MonomialOrder("deglex", "ab")
    rule = Rule("s", Q.monomial(("b", "a")), make_poly(Q, QQ, [(1, "ab")]))
    return certified(Polygraph2(Q, QQ, [rule], order))


def test_rule_validation():
    Q = Quiver.free("xy")
    with pytest.raises(RewriteError):
        # Source monomial may not reappear in the target.
        Rule("r", Q.monomial(("x", "y")), make_poly(Q, QQ, [(1, "xy")]))
    with pytest.raises(RewriteError):
        Rule("r", Q.identity("*"), make_poly(Q, QQ, [(1, "xy")]))


def test_occurrences_overlapping(sys_ab):
    m = sys_ab.quiver.monomial(tuple("bba"))
    assert sys_ab.occurrences(m) == [(0, 1)]
    m2 = sys_ab.quiver.monomial(tuple("baba"))
    assert sys_ab.occurrences(m2) == [(0, 0), (0, 2)]


def test_step_soundness(sys_ab):
    Q = sys_ab.quiver
    f = make_poly(Q, QQ, [(2, "bab")])
    steps = find_redexes(f, sys_ab)
    assert len(steps) == 1
    g = steps[0].apply(f)
    # f' = f - lam * u (source - target) v
    assert g == make_poly(Q, QQ, [(2, "abb")])


def test_rightmost_vs_leftmost(sys_ab):
    m = sys_ab.quiver.monomial(tuple("baba"))
    assert rightmost_step(m, sys_ab).left.weight == 2
    assert leftmost_step(m, sys_ab).left.weight == 0
    with pytest.raises(NoStepError):
        rightmost_step(sys_ab.quiver.monomial(tuple("aab")), sys_ab)


def test_normal_form_sorts_letters(sys_ab):
    Q = sys_ab.quiver
    result = nf(make_poly(Q, QQ, [(1, "bbaa")]), sys_ab)
    assert result == make_poly(Q, QQ, [(1, "aabb")])


def test_normal_form_idempotent(sys_ab):
    Q = sys_ab.quiver
    f = make_poly(Q, QQ, [(1, "baba"), (3, "ba"), (-2, "b")])
    r1, trace = normal_form(f, sys_ab)
    assert trace.check()
    r2, trace2 = normal_form(r1, sys_ab)
    assert r1 == r2 and len(trace2) == 0


words_ab = st.lists(st.sampled_from("ab"), min_size=0, max_size=6).map(tuple)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@given(st.lists(st.tuples(coeffs, words_ab), min_size=0, max_size=4))
@settings(max_examples=60, deadline=None)
def test_normal_form_linear(pairs):
    Q = Quiver.free("ab")
    order = MonomialOrder("deglex", "ab")
    rule = Rule("s", Q.monomial(("b", "a")), make_poly(Q, QQ, [(1, "ab")]))
    P = certified(Polygraph2(Q, QQ, [rule], order))
    f = Q.poly(QQ, [(c, Q.monomial(w)) for c, w in pairs])
    total = nf(f, P)
    by_parts = Q.zero(QQ)
    for c, w in pairs:
        by_parts = by_parts + nf(monomial_poly(QQ, Q.monomial(w), QQ.coerce(c)), P)
    assert total == by_parts


def test_trace_replay(sys_xyz):
    Q = sys_xyz.quiver
    f = make_poly(Q, QQ, [(1, "xyzxyz")])
    result, trace = normal_form(f, sys_xyz)
    assert trace.check()
    assert all(not sys_xyz.is_reducible(m) for m in result.terms)


def test_standard_basis_counts(sys_ab):
    counts = standard_basis(sys_ab, 5).counts()
    # Commutative in two variables: d+1 monomials per degree.
    assert counts == {d: d + 1 for d in range(6)}


def test_quotient_dimension_matches_standard_basis(sys_ab):
    for d in range(5):
        assert quotient_dimension(sys_ab, d) == d + 1


def test_ideal_member(sys_ab):
    Q = sys_ab.quiver
    rel = make_poly(Q, QQ, [(1, "ba"), (-1, "ab")])
    emb = rel.whisker(Q.monomial(("a",)), Q.monomial(("b",)))
    assert ideal_member(rel + emb.scale(Fraction(3)), sys_ab)
    assert not ideal_member(make_poly(Q, QQ, [(1, "ab")]), sys_ab)
    assert ideal_member(Q.zero(QQ), sys_ab)


def test_ideal_member_needs_certificate(sys_xy):
    with pytest.raises(RewriteError):
        ideal_member(make_poly(sys_xy.quiver, QQ, [(1, "xy")]), sys_xy)


def test_monomialize(sys_xyz):
    M = monomialize(sys_xyz)
    assert all(r.target.is_zero() for r in M.rules)
    assert [r.source for r in M.rules] == [r.source for r in sys_xyz.rules]


def test_pbw_xy_example():
    Q = Quiver.free("xy")
    order = MonomialOrder("deglex", "xy")
    rule = Rule("a", Q.monomial(("x", "y")), make_poly(Q, QQ, [(1, "xx")]))
    P = certified(Polygraph2(Q, QQ, [rule], order))
    cand = [
        Q.monomial(tuple("y" * i + "x" * j))
        for d in range(1, 5)
        for i in range(d + 1)
        for j in [d - i]
    ]
    report = pbw_check(P, cand, 4)
    assert report["passed"] and report["N"] == 2

    bad = cand + [Q.monomial(tuple("xy"))]
    report2 = pbw_check(P, bad, 4)
    assert not report2["passed"]
    assert report2["failures"]


def test_pbw_builds_quadratic_polygraph():
    Q = Quiver.free("xy")
    order = MonomialOrder("deglex", "xy")
    rule = Rule("a", Q.monomial(("x", "y")), make_poly(Q, QQ, [(1, "xx")]))
    P = certified(Polygraph2(Q, QQ, [rule], order))
    cand = [
        Q.monomial(tuple("y" * i + "x" * j))
        for d in range(1, 5)
        for i in range(d + 1)
        for j in [d - i]
    ]
    report = pbw_check(P, cand, 4, build_xi=True)
    assert report["passed"]
    assert report["xi"]["rules"] == ["xi0 : x y => x^2"]
    assert report["xi"]["convergent"]
