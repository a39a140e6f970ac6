"""Exact coefficient fields: rationals, prime fields, and parameter fields.

Coefficients are plain canonical values (Fraction, int mod p, or a
canonicalized sympy expression); the field object supplies the arithmetic.
Canonical representation means ``==`` and ``hash`` decide equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any


class FieldError(ArithmeticError):
    pass


class Field:
    """Abstract exact field. Elements are immutable canonical values."""

    zero: Any
    one: Any

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def generic_inv(self, a):
        """Inverse for internal linear algebra; same as inv except for
        parameter fields, where any nonzero rational function is invertible
        generically (no non-vanishing declaration required)."""
        return self.inv(a)

    def is_zero(self, a) -> bool:
        return a == self.zero

    def coerce(self, x):
        """Build an element from an int, Fraction, or string like '-1/2'."""
        raise NotImplementedError

    def to_str(self, a) -> str:
        return str(a)


class RationalField(Field):
    """The rationals, backed by fractions.Fraction."""

    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise FieldError("division by zero")
        return 1 / a

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise FieldError(f"cannot coerce {x!r} into Q")

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class PrimeField(Field):
    """GF(p); elements are ints in [0, p)."""

    def __init__(self, p: int):
        if p < 2:
            raise FieldError(f"bad characteristic {p}")
        # A tiny primality check is enough at desk scale.
        d = 2
        while d * d <= p:
            if p % d == 0:
                raise FieldError(f"{p} is not prime")
            d += 1
        self.p = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise FieldError("division by zero")
        return pow(a, -1, self.p)

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            return self.div(x.numerator % self.p, x.denominator % self.p)
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        raise FieldError(f"cannot coerce {x!r} into {self.name}")

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


class ParameterField(Field):
    """Rational functions in named parameters over Q, via sympy.

    Elements are sympy expressions normalized with ``cancel`` so equality is
    decidable.  Division is only allowed by expressions whose non-constant
    factors all belong to the declared non-vanishing set.
    """

    def __init__(self, params: tuple[str, ...], nonvanishing: tuple[str, ...] = ()):
        import sympy

        self._sympy = sympy
        self.params = tuple(params)
        self.symbols = {name: sympy.Symbol(name) for name in params}
        self.name = "Q(" + ", ".join(params) + ")"
        self.zero = sympy.Integer(0)
        self.one = sympy.Integer(1)
        self.nonvanishing = tuple(
            sympy.cancel(sympy.sympify(s, locals=self.symbols)) for s in nonvanishing
        )

    def _canon(self, e):
        return self._sympy.cancel(e)

    def add(self, a, b):
        return self._canon(a + b)

    def neg(self, a):
        return self._canon(-a)

    def mul(self, a, b):
        return self._canon(a * b)

    def _monic(self, poly_expr):
        sympy = self._sympy
        syms = sorted(poly_expr.free_symbols, key=str)
        return sympy.cancel(poly_expr / sympy.LC(poly_expr, syms[0]))

    def _check_invertible(self, a):
        sympy = self._sympy
        num, _ = sympy.fraction(sympy.cancel(a))
        const, factors = sympy.factor_list(num)
        if const == 0:
            raise FieldError("division by zero")
        allowed = set()
        for nv in self.nonvanishing:
            _, nvf = sympy.factor_list(nv)
            for base, _ in nvf:
                if base.free_symbols:
                    allowed.add(self._monic(base))
        for base, _ in factors:
            if not base.free_symbols:
                continue
            if self._monic(base) not in allowed:
                raise FieldError(
                    f"division by possibly-vanishing expression {a} "
                    f"(factor {base} not declared non-vanishing)"
                )

    def inv(self, a):
        self._check_invertible(a)
        return self._canon(1 / a)

    def generic_inv(self, a):
        if self.is_zero(a):
            raise FieldError("division by zero")
        return self._canon(1 / a)

    def is_zero(self, a) -> bool:
        return self._canon(a) == 0

    def coerce(self, x):
        if isinstance(x, Fraction):
            return self._sympy.Rational(x.numerator, x.denominator)
        if isinstance(x, int):
            return self._sympy.Integer(x)
        if isinstance(x, str):
            return self._canon(self._sympy.sympify(x, locals=self.symbols))
        return self._canon(self._sympy.sympify(x))

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return (
            isinstance(other, ParameterField)
            and other.params == self.params
            and other.nonvanishing == self.nonvanishing
        )

    def __hash__(self):
        return hash(("Qparam", self.params))


QQ = RationalField()

DEFAULT_PRIME = 32003


def GF(p: int = DEFAULT_PRIME) -> PrimeField:
    return PrimeField(p)
