from fractions import Fraction

import pytest

from linrew import complete
from linrew import lpformat
from linrew.lpformat import LpError, parse, parse_file, print_polygraph


XYZ_TEXT = """\
field Q
generators x y z
order deglex x < y < z
rule g : x y z -> x x x + y y y + z z z
"""


def test_parse_xyz():
    P, meta = parse(XYZ_TEXT)
    assert [g.name for g in P.quiver.generators.values()] == ["x", "y", "z"]
    assert len(P.rules) == 1
    rule = P.rules[0]
    assert str(rule.source) == "x y z"
    assert sorted(str(m) for m in rule.target.terms) == ["x^3", "y^3", "z^3"]
    assert P.order.kind == "deglex"


def test_parse_bound_parameter():
    P, meta = parse(
        "field Q\nparam a = 2\ngenerators x y z\n"
        "rule beta : z y -> (-1/a) x x\n"
    )
    coeff = next(iter(P.rules[0].target.terms.values()))
    assert coeff == Fraction(-1, 2)


def test_parse_symbolic_parameter():
    P, meta = parse(
        "field Q\nparam a nonzero\ngenerators x y\n"
        "rule r : x y -> (1/a) x x\n"
    )
    coeff = next(iter(P.rules[0].target.terms.values()))
    assert str(coeff) == "1/a"
    assert meta["symbolic_params"] == ["a"]


def test_parse_power_sugar():
    P, _ = parse("field Q\ngenerators x y\nrule r : x^2 y -> y^3\n")
    assert P.rules[0].source.word == ("x", "x", "y")


def test_parse_gf():
    P, _ = parse("field GF(7)\ngenerators x y\nrule r : x y -> 3 x x\n")
    assert next(iter(P.rules[0].target.terms.values())) == 3
    assert P.field.p == 7


def test_unknown_generator_has_position():
    with pytest.raises(LpError) as e:
        parse("field Q\ngenerators x\nrule r : x w -> x\n")
    assert e.value.line == 3 and e.value.col > 0


def test_duplicate_rule_name():
    with pytest.raises(LpError):
        parse(
            "field Q\ngenerators x y\n"
            "rule r : x y -> x x\nrule r : y y -> x x\n"
        )


def test_unbalanced_paren():
    with pytest.raises(LpError):
        parse("field Q\ngenerators x\nrule r : x x -> (1/2 x\n")


def test_unknown_directive():
    with pytest.raises(LpError):
        parse("florble Q\n")


def test_round_trip_fixtures(fixtures_dir):
    for name in sorted(p.name for p in fixtures_dir.glob("*.lp")):
        P, meta = parse_file(str(fixtures_dir / name))
        text = print_polygraph(P, meta)
        P2, meta2 = parse(text)
        assert print_polygraph(P2, meta2) == text, name
        assert [str(r.source) for r in P2.rules] == [str(r.source) for r in P.rules]
        assert [r.target for r in P2.rules] == [r.target for r in P.rules]


def test_certificate_round_trip(sys_xy, tmp_path):
    done = complete(sys_xy, sys_xy.order)
    path = tmp_path / "done.lp"
    lpformat.write_file(str(path), done)
    text = path.read_text()
    assert "certified convergent" in text
    loaded, meta = parse_file(str(path))
    assert loaded.certified_convergent
    assert meta["certified"]


def test_certificate_revalidated(tmp_path):
    bogus = (
        "field Q\ngenerators x y\norder deglex y < x\n"
        "rule r : x x -> x y\ncertified convergent\n"
    )
    with pytest.raises(LpError):
        parse(bogus)


def test_measure_lines():
    P, meta = parse(
        "field Q\ngenerators x y z\n"
        "measure letter y 1\nmeasure pattern x y z 3\nmeasure bound 3\n"
        "rule g : x y z -> x^3 + y^3 + z^3\n"
    )
    m = meta["measure"]
    assert m.letter_weights == (("y", 1),)
    assert m.pattern_weights == ((("x", "y", "z"), 3),)
    assert m.context_bound == 3


def test_comments_and_blanks():
    P, _ = parse(
        "# a comment\n\nfield Q\ngenerators x y  # trailing\n"
        "rule r : x y -> y x\n"
    )
    assert len(P.rules) == 1
