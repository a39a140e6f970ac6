from fractions import Fraction

import pytest

from linrew import FieldError, GF, ParameterField, QQ


def test_rational_basics():
    assert QQ.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert QQ.inv(Fraction(3, 4)) == Fraction(4, 3)
    assert QQ.is_zero(QQ.sub(QQ.one, QQ.one))
    assert QQ.coerce(7) == Fraction(7)
    with pytest.raises(FieldError):
        QQ.inv(QQ.zero)


def test_prime_field():
    F = GF(32003)
    a = F.coerce(-1)
    assert a == 32002
    assert F.mul(F.inv(F.coerce(17)), F.coerce(17)) == F.one
    assert F.coerce(Fraction(1, 2)) == F.div(F.one, F.coerce(2))
    with pytest.raises(FieldError):
        F.inv(F.zero)


def test_prime_field_requires_prime():
    with pytest.raises(FieldError):
        GF(10)


def test_parameter_field_inverts_only_declared_units():
    F = ParameterField(("a",), ("a",))
    a = F.symbols["a"]
    assert F.is_zero(F.sub(F.mul(F.inv(a), a), F.one))
    # a + 1 was not declared non-vanishing, so division must refuse.
    with pytest.raises(FieldError):
        F.inv(a + 1)
    # Internal linear algebra may still pivot on it.
    assert F.is_zero(F.sub(F.mul(F.generic_inv(a + 1), a + 1), F.one))


def test_parameter_field_canonical_equality():
    F = ParameterField(("a",), ("a",))
    a = F.symbols["a"]
    left = F.mul(F.inv(a), F.mul(a, a))
    assert F.is_zero(F.sub(left, a))
