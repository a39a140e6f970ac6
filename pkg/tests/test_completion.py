from fractions import Fraction

import pytest

from linrew import (
    MonomialOrder,
    PatternMeasure,
    Polygraph2,
    QQ,
    Quiver,
    certify_termination,
    check_confluence,
    complete,
    enumerate_critical_branchings,
    groebner_view,
    interreduce,
    local_branchings,
    monomial_poly,
    orient,
    s_polynomial,
)

from conftest import make_poly


def test_order_certificate(sys_xy):
    cert = certify_termination(sys_xy, sys_xy.order)
    assert cert.ok and cert.kind == "order-compatible"


def test_order_certificate_failure(sys_xyz):
    # deglex x < y < z does not orient xyz => ... + z^3.
    cert = certify_termination(sys_xyz, MonomialOrder("deglex", "xyz"))
    assert not cert.ok
    assert "not below" in cert.notes


def test_pattern_measure_certificate(sys_xyz):
    measure = PatternMeasure((("y", 1),), ((("x", "y", "z"), 3),), 3)
    cert = certify_termination(sys_xyz, measure)
    assert cert.ok and cert.kind == "pattern-measure"
    assert "semi-sound" in cert.notes


def test_pattern_measure_counts_overlaps():
    m = PatternMeasure((), ((("a", "a"), 1),), 3)
    assert m.measure(("a", "a", "a")) == 2


def test_critical_branchings_xy(sys_xy):
    words = sorted(str(b.word) for b in enumerate_critical_branchings(sys_xy))
    assert words == ["x y^2", "y^3"]
    for b in enumerate_critical_branchings(sys_xy):
        assert b.classification == "critical"


def test_classify_peiffer(sys_xy):
    Q = sys_xy.quiver
    w = monomial_poly(QQ, Q.monomial(tuple("xyyy")))
    kinds = {b.classification for b in local_branchings(w, sys_xy)}
    assert "Peiffer" in kinds


def test_s_polynomial_sign(sys_xy):
    b = next(
        b for b in enumerate_critical_branchings(sys_xy) if str(b.word) == "x y^2"
    )
    sp = s_polynomial(b)
    # Convention: one-step target of the leftmost leg minus the rightmost's.
    assert sp.poly == make_poly(sys_xy.quiver, QQ, [(1, "xxy"), (-1, "xxx")])


def test_completion_xy(sys_xy):
    done = complete(sys_xy, sys_xy.order)
    added = [r for r in done.rules if r.name not in ("a", "b")]
    assert len(added) == 1
    assert str(added[0].source) == "y x^2"
    assert added[0].target == make_poly(sys_xy.quiver, QQ, [(1, "xxx")])
    assert done.certified_convergent and done.left_reduced and done.right_reduced


def test_completion_pp(sys_pp):
    done = complete(sys_pp, sys_pp.order)
    by_source = {str(r.source): r for r in done.rules}
    assert set(by_source) == {"y z", "z y", "y x^2", "z x^2"}
    assert by_source["y x^2"].target == make_poly(
        sys_pp.quiver, QQ, [(2, "xxy")]
    )
    assert by_source["z x^2"].target == make_poly(
        sys_pp.quiver, QQ, [(Fraction(1, 2), "xxz")]
    )
    assert len(enumerate_critical_branchings(done)) == 4


def test_completed_system_confluent(sys_pp):
    done = complete(sys_pp, sys_pp.order)
    report = check_confluence(done)
    assert report["convergent"]
    assert all(e["joinable"] for e in report["entries"])


def test_orient():
    Q = Quiver.free("xy")
    order = MonomialOrder("deglex", "xy")
    f = make_poly(Q, QQ, [(2, "yy"), (-4, "xx")])
    r = orient(f, order, "r")
    assert str(r.source) == "y^2"
    assert r.target == make_poly(Q, QQ, [(2, "xx")])
    assert orient(Q.zero(QQ), order, "z") is None


def test_interreduce_idempotent(sys_xy):
    done = complete(sys_xy, sys_xy.order)
    again = interreduce(done)
    assert [r.relation() for r in again.rules] == [r.relation() for r in done.rules]


def test_groebner_view(sys_xy):
    done = complete(sys_xy, sys_xy.order)
    for g in groebner_view(done):
        lead = done.order.max_monomial(g)
        assert g.terms[lead] == QQ.one


def test_confluence_requires_certificate(sys_xy):
    with pytest.raises(Exception):
        check_confluence(Polygraph2(sys_xy.quiver, QQ, sys_xy.rules, None))


def test_sys_xyz_no_criticals(sys_xyz):
    assert enumerate_critical_branchings(sys_xyz) == []
    assert check_confluence(sys_xyz)["convergent"]

def test_threaded_confluence_matches_serial(sys_pp, monkeypatch):
    done = complete(sys_pp, sys_pp.order)
    serial = check_confluence(done)
    monkeypatch.setenv("LINREW_THREADS", "4")
    threaded = check_confluence(done)
    strip = lambda e: {k: v for k, v in e.items() if not k.startswith("_")}
    assert threaded["convergent"] == serial["convergent"]
    assert [strip(e) for e in threaded["entries"]] == [
        strip(e) for e in serial["entries"]
    ]
