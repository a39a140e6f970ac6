import os
from fractions import Fraction
from pathlib import Path

import pytest

from linrew import (
    MonomialOrder,
    PatternMeasure,
    Polygraph2,
    QQ,
    Quiver,
    Rule,
    certify_termination,
    check_confluence,
)

FIXTURES = Path(__file__).parent / "fixtures"


def corpus_seed() -> int:
    return int(os.environ.get("LINREW_SEED", "0"))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def make_poly(quiver, field, terms):
    return quiver.poly(
        field, [(c, quiver.monomial(tuple(w))) for c, w in terms]
    )


@pytest.fixture
def sys_xyz():
    """xyz -> x^3 + y^3 + z^3, certified by the pattern measure."""
    Q = Quiver.free("xyz")
    rule = Rule(
        "g",
        Q.monomial(tuple("xyz")),
        make_poly(Q, QQ, [(1, "xxx"), (1, "yyy"), (1, "zzz")]),
    )
    P = Polygraph2(Q, QQ, [rule], MonomialOrder("deglex", "xyz"))
    measure = PatternMeasure((("y", 1),), ((("x", "y", "z"), 3),), 3)
    P.termination_certificate = certify_termination(P, measure)
    check_confluence(P)
    return P


@pytest.fixture
def sys_xy():
    """xy -> x^2, y^2 -> x^2 under deglex x < y (not yet completed)."""
    Q = Quiver.free("xy")
    order = MonomialOrder("deglex", "xy")
    rules = [
        Rule("a", Q.monomial(tuple("xy")), make_poly(Q, QQ, [(1, "xx")])),
        Rule("b", Q.monomial(tuple("yy")), make_poly(Q, QQ, [(1, "xx")])),
    ]
    return Polygraph2(Q, QQ, rules, order)


@pytest.fixture
def sys_pp(request):
    """yz -> -x^2, zy -> -(1/a) x^2 with a = 2 (not yet completed)."""
    Q = Quiver.free("xyz")
    order = MonomialOrder("deglex", "xyz")
    a = Fraction(2)
    rules = [
        Rule("alpha", Q.monomial(tuple("yz")), make_poly(Q, QQ, [(-1, "xx")])),
        Rule("beta", Q.monomial(tuple("zy")), make_poly(Q, QQ, [(-1 / a, "xx")])),
    ]
    return Polygraph2(Q, QQ, rules, order)
