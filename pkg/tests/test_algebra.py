from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from linrew import (
    CompositionError,
    Generator,
    MonomialOrder,
    QQ,
    Quiver,
    leading_data,
    monomial_poly,
)

Q3 = Quiver.free("xyz")

words = st.lists(st.sampled_from("xyz"), min_size=0, max_size=6).map(tuple)
nonempty_words = st.lists(st.sampled_from("xyz"), min_size=1, max_size=6).map(tuple)
coeffs = st.fractions(min_value=-9, max_value=9, max_denominator=7)


def poly_from(pairs):
    return Q3.poly(QQ, [(c, Q3.monomial(w)) for c, w in pairs])


polys = st.lists(st.tuples(coeffs, words), min_size=0, max_size=5).map(poly_from)


def test_free_quiver_shape():
    assert Q3.objects == ("*",)
    assert set(Q3.generators) == {"x", "y", "z"}
    m = Q3.monomial(("x", "y"))
    assert m.degree == 2 and str(m) == "x y"


def test_monomial_str_power_sugar():
    m = Q3.monomial(tuple("xxxyzz"))
    assert str(m) == "x^3 y z^2"


def test_composition_boundaries():
    quiver = Quiver(
        ["o1", "o2"],
        [Generator("f", "o1", "o2"), Generator("g", "o2", "o1")],
    )
    fg = quiver.monomial(("f", "g"))
    assert (fg.source, fg.target) == ("o1", "o1")
    with pytest.raises(CompositionError):
        quiver.monomial(("f", "f"))


@given(polys, polys, polys)
@settings(max_examples=50, deadline=None)
def test_polynomial_module_laws(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f + g == g + f
    assert f - f == Q3.zero(QQ)
    assert f.scale(Fraction(2)) == f + f


@given(polys, polys, polys)
@settings(max_examples=50, deadline=None)
def test_multiplication_distributes(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert f * (g + h) == f * g + f * h


@given(polys, polys, polys)
@settings(max_examples=30, deadline=None)
def test_multiplication_associates(f, g, h):
    assert (f * g) * h == f * (g * h)


@given(nonempty_words, nonempty_words)
@settings(max_examples=100, deadline=None)
def test_deglex_total_on_parallel(w1, w2):
    order = MonomialOrder("deglex", "xyz")
    m1, m2 = Q3.monomial(w1), Q3.monomial(w2)
    c = order.compare(m1, m2)
    assert c in (-1, 0, 1)
    assert (c == 0) == (m1 == m2)
    assert c == -order.compare(m2, m1)


@given(nonempty_words, nonempty_words, nonempty_words)
@settings(max_examples=100, deadline=None)
def test_orders_compatible_with_composition(w1, w2, c):
    for order in (
        MonomialOrder("deglex", "xyz"),
        MonomialOrder("weighted-deglex", "xyz", weights={"x": 2, "y": 1, "z": 3}),
        MonomialOrder("elimination-block-deglex", "xyz", blocks=[["x", "y"], ["z"]]),
    ):
        m1, m2 = Q3.monomial(w1), Q3.monomial(w2)
        ctx = Q3.monomial(c)
        if order.less(m1, m2):
            assert order.less(ctx * m1, ctx * m2)
            assert order.less(m1 * ctx, m2 * ctx)


@given(nonempty_words)
@settings(max_examples=60, deadline=None)
def test_degree_dominates(w):
    # Degree-first comparison is what makes every kind well-founded.
    order = MonomialOrder("deglex", "xyz")
    m = Q3.monomial(w)
    longer = Q3.monomial(w + ("x",))
    assert order.less(m, longer)


def test_leading_data():
    order = MonomialOrder("deglex", "xyz")
    f = poly_from([(Fraction(2), tuple("zz")), (Fraction(1), tuple("xy"))])
    lm, lc, lt = leading_data(f, order)
    assert str(lm) == "z^2" and lc == 2
    assert lt == monomial_poly(QQ, lm, Fraction(2))
    lm0, lc0, _ = leading_data(Q3.zero(QQ), order)
    assert lm0 is None and lc0 == 0


def test_whisker():
    f = poly_from([(Fraction(1), tuple("xy")), (Fraction(3), tuple("z"))])
    u = Q3.monomial(("z",))
    g = f.whisker(u, None)
    assert set(str(m) for m in g.terms) == {"z x y", "z^2"}
