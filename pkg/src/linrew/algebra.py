"""Quivers, path monomials, noncommutative polynomials, and monomial orders.

Monomials are composable words of quiver generators; polynomials are exact
field-coefficient combinations of parallel monomials.  All values are
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Mapping

from .scalars import Field


class CompositionError(ValueError):
    """Raised when boundaries do not match."""


@dataclass(frozen=True)
class Generator:
    name: str
    source: str
    target: str
    degree: int = 1

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"generator {self.name} must have positive degree")


class Quiver:
    """A finite quiver: objects and typed generators with degrees."""

    def __init__(self, objects: Iterable[str], generators: Iterable[Generator]):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object ids")
        self.generators: dict[str, Generator] = {}
        for g in generators:
            if g.name in self.generators:
                raise ValueError(f"duplicate generator id {g.name}")
            if g.source not in self.objects or g.target not in self.objects:
                raise ValueError(f"generator {g.name} references unknown object")
            self.generators[g.name] = g

    @classmethod
    def free(cls, names: Iterable[str], degrees: Mapping[str, int] | None = None) -> "Quiver":
        """One-object quiver (ordinary free algebra) over the given letters."""
        degrees = degrees or {}
        return cls(["*"], [Generator(n, "*", "*", degrees.get(n, 1)) for n in names])

    def identity(self, obj: str) -> "Monomial":
        if obj not in self.objects:
            raise ValueError(f"unknown object {obj}")
        return Monomial((), obj, obj, 0)

    def monomial(self, word: Iterable[str], at: str | None = None) -> "Monomial":
        word = tuple(word)
        if not word:
            if at is None:
                if len(self.objects) != 1:
                    raise CompositionError("identity monomial needs an object")
                at = self.objects[0]
            return self.identity(at)
        degree = 0
        prev: Generator | None = None
        for name in word:
            g = self.generators.get(name)
            if g is None:
                raise ValueError(f"unknown generator {name}")
            if prev is not None and prev.target != g.source:
                raise CompositionError(
                    f"non-composable word: {prev.name}:{prev.source}->{prev.target} "
                    f"then {g.name}:{g.source}->{g.target}"
                )
            degree += g.degree
            prev = g
        src = self.generators[word[0]].source
        tgt = self.generators[word[-1]].target
        m = Monomial(word, src, tgt, degree)
        if at is not None and src != at:
            raise CompositionError(f"word starts at {src}, expected {at}")
        return m

    def zero(self, field: Field, source: str | None = None, target: str | None = None) -> "Polynomial":
        if source is None or target is None:
            if len(self.objects) != 1:
                raise CompositionError("zero polynomial needs boundary objects")
            source = target = self.objects[0]
        return Polynomial(field, {}, source, target)

    def poly(self, field: Field, terms, source: str | None = None, target: str | None = None) -> "Polynomial":
        """Build a polynomial from (coeff, monomial) pairs; prunes zeros."""
        acc: dict[Monomial, object] = {}
        for coeff, m in terms:
            acc[m] = field.add(acc.get(m, field.zero), field.coerce(coeff))
        acc = {m: c for m, c in acc.items() if not field.is_zero(c)}
        if acc:
            any_m = next(iter(acc))
            source, target = any_m.source, any_m.target
        return Polynomial(field, acc, *_boundary_or_default(self, source, target))


def _boundary_or_default(quiver: Quiver, source, target):
    if source is None or target is None:
        if len(quiver.objects) != 1:
            raise CompositionError("boundary objects required")
        source = target = quiver.objects[0]
    return source, target


@total_ordering
@dataclass(frozen=True)
class Monomial:
    """A path in the quiver: a composable word of generator names."""

    word: tuple[str, ...]
    source: str
    target: str
    degree: int

    @property
    def weight(self) -> int:
        return len(self.word)

    def is_identity(self) -> bool:
        return not self.word

    def compose(self, other: "Monomial") -> "Monomial":
        if self.target != other.source:
            raise CompositionError(
                f"cannot compose {self} : ->{self.target} with {other} : {other.source}->"
            )
        return Monomial(
            self.word + other.word, self.source, other.target, self.degree + other.degree
        )

    __mul__ = compose

    def factor_positions(self, factor: tuple[str, ...]) -> list[int]:
        """All start indices where factor occurs as a subword."""
        n, k = len(self.word), len(factor)
        return [i for i in range(n - k + 1) if self.word[i : i + k] == factor]

    def __str__(self):
        if not self.word:
            return f"1_{self.source}"
        out = []
        i = 0
        while i < len(self.word):
            j = i
            while j < len(self.word) and self.word[j] == self.word[i]:
                j += 1
            out.append(self.word[i] if j - i == 1 else f"{self.word[i]}^{j - i}")
            i = j
        return " ".join(out)

    def __lt__(self, other):
        # Canonical (order-independent) word order, used for deterministic
        # storage; semantic comparisons go through MonomialOrder.
        return (self.degree, self.source, self.target, self.word) < (
            other.degree,
            other.source,
            other.target,
            other.word,
        )


class Polynomial:
    """Finite linear combination of parallel monomials with exact coefficients."""

    __slots__ = ("field", "terms", "source", "target", "_hash")

    def __init__(self, field: Field, terms: Mapping[Monomial, object], source: str, target: str):
        for m in terms:
            if (m.source, m.target) != (source, target):
                raise CompositionError(
                    f"term {m} has boundary ({m.source},{m.target}), expected ({source},{target})"
                )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "terms", dict(terms))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def monomials(self) -> list[Monomial]:
        return sorted(self.terms)

    def items(self):
        """Reduced expression: (coefficient, monomial) pairs, canonically sorted."""
        return [(self.terms[m], m) for m in self.monomials]

    def coefficient(self, m: Monomial):
        return self.terms.get(m, self.field.zero)

    def _require_parallel(self, other: "Polynomial"):
        if (self.source, self.target) != (other.source, other.target):
            raise CompositionError("boundary mismatch in polynomial addition")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._require_parallel(other)
        f = self.field
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = f.add(acc.get(m, f.zero), c)
            if f.is_zero(s):
                acc.pop(m, None)
            else:
                acc[m] = s
        return Polynomial(f, acc, self.source, self.target)

    def __neg__(self) -> "Polynomial":
        f = self.field
        return Polynomial(f, {m: f.neg(c) for m, c in self.terms.items()}, self.source, self.target)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, coeff) -> "Polynomial":
        f = self.field
        if f.is_zero(coeff):
            return Polynomial(f, {}, self.source, self.target)
        return Polynomial(
            f, {m: f.mul(coeff, c) for m, c in self.terms.items()}, self.source, self.target
        )

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        """0-composition (concatenation product), distributing over terms."""
        if self.target != other.source:
            raise CompositionError("boundary mismatch in polynomial product")
        f = self.field
        acc: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = f.add(acc.get(m, f.zero), f.mul(c1, c2))
                if f.is_zero(s):
                    acc.pop(m, None)
                else:
                    acc[m] = s
        return Polynomial(f, acc, self.source, other.target)

    def whisker(self, left: Monomial | None, right: Monomial | None) -> "Polynomial":
        out = self
        if left is not None and not left.is_identity():
            out = monomial_poly(self.field, left) * out
        if right is not None and not right.is_identity():
            out = out * monomial_poly(self.field, right)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.field == other.field
            and (self.source, self.target) == (other.source, other.target)
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            h = hash((self.source, self.target, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __str__(self):
        if not self.terms:
            return "0"
        f = self.field
        parts = []
        for c, m in self.items():
            cs = f.to_str(c)
            ms = str(m)
            if m.is_identity():
                parts.append(cs)
            elif cs == "1":
                parts.append(ms)
            elif cs == "-1":
                parts.append(f"-{ms}")
            else:
                if any(op in cs for op in "+-*/") and not _is_simple_neg(cs):
                    cs = f"({cs})"
                parts.append(f"{cs} {ms}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:].lstrip()}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__


def _is_simple_neg(s: str) -> bool:
    return s.startswith("-") and not any(op in s[1:] for op in "+-*/")


def monomial_poly(field: Field, m: Monomial, coeff=None) -> Polynomial:
    c = field.one if coeff is None else coeff
    if field.is_zero(c):
        return Polynomial(field, {}, m.source, m.target)
    return Polynomial(field, {m: c}, m.source, m.target)


class MonomialOrder:
    """Degree-first well-founded orders on parallel monomials.

    kinds: 'deglex', 'weighted-deglex' (letter weights compared before
    degree), 'elimination-block-deglex' (degree, then block-degree vector,
    then lex).  All compare degree first, so every kind is well-founded and
    compatible with composition.
    """

    KINDS = ("deglex", "weighted-deglex", "elimination-block-deglex")

    def __init__(
        self,
        kind: str,
        precedence: Iterable[str],
        weights: Mapping[str, int] | None = None,
        blocks: Iterable[Iterable[str]] | None = None,
    ):
        if kind not in self.KINDS:
            raise ValueError(f"unknown order kind {kind}")
        self.kind = kind
        self.precedence = tuple(precedence)
        self.rank = {g: i for i, g in enumerate(self.precedence)}
        self.weights = dict(weights or {})
        self.blocks = tuple(tuple(b) for b in (blocks or ()))
        if kind == "weighted-deglex" and not self.weights:
            raise ValueError("weighted-deglex needs letter weights")
        if kind == "elimination-block-deglex" and not self.blocks:
            raise ValueError("elimination-block-deglex needs blocks")
        self._block_of = {}
        for i, b in enumerate(self.blocks):
            for g in b:
                self._block_of[g] = i

    def key(self, m: Monomial):
        lex = tuple(self.rank[g] for g in m.word)
        if self.kind == "deglex":
            return (m.degree, m.weight, lex)
        if self.kind == "weighted-deglex":
            w = sum(self.weights.get(g, 1) for g in m.word)
            return (w, m.degree, m.weight, lex)
        counts = [0] * len(self.blocks)
        for g in m.word:
            counts[self._block_of[g]] += 1
        return (m.degree, m.weight, tuple(counts), lex)

    def compare(self, m1: Monomial, m2: Monomial) -> int:
        if (m1.source, m1.target) != (m2.source, m2.target):
            raise CompositionError("cannot compare non-parallel monomials")
        k1, k2 = self.key(m1), self.key(m2)
        return -1 if k1 < k2 else (1 if k1 > k2 else 0)

    def less(self, m1: Monomial, m2: Monomial) -> bool:
        return self.compare(m1, m2) < 0

    def max_monomial(self, f: Polynomial) -> Monomial | None:
        best = None
        for m in f.terms:
            if best is None or self.key(m) > self.key(best):
                best = m
        return best


def compose(m1: Monomial, m2: Monomial) -> Monomial:
    return m1 * m2


def leading_data(f: Polynomial, order: MonomialOrder):
    """(leading monomial, leading coefficient, leading term); zeros for f = 0."""
    lm = order.max_monomial(f)
    if lm is None:
        return None, f.field.zero, f
    lc = f.terms[lm]
    return lm, lc, monomial_poly(f.field, lm, lc)
