"""Rules, linear 2-polygraphs, rewriting steps with traces, normal forms,
standard bases, monomialization, and PBW verification.

A rule is a monic oriented relation m => h with monomial source and
polynomial target.  A rewriting step replaces one occurrence of a rule
source inside one term: f' = f - lam * m1 (m - h) m2.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Literal, Optional

from .algebra import (
    CompositionError,
    Monomial,
    MonomialOrder,
    Polynomial,
    Quiver,
    monomial_poly,
)
from .scalars import Field
from . import linalg

DEFAULT_STEP_BUDGET = 10**6


class RewriteError(ValueError):
    pass


class NoStepError(RewriteError):
    pass


class NotCertifiedError(RewriteError):
    pass


class StepBudgetExceeded(RewriteError):
    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


@dataclass(frozen=True)
class Rule:
    name: str
    source: Monomial
    target: Polynomial

    def __post_init__(self):
        if self.source.is_identity():
            raise RewriteError(f"rule {self.name}: source must be a non-identity monomial")
        if (self.source.source, self.source.target) != (self.target.source, self.target.target):
            raise CompositionError(f"rule {self.name}: source and target are not parallel")
        if self.source in self.target.terms:
            raise RewriteError(
                f"rule {self.name}: source monomial occurs in target (not in normal shape)"
            )

    @property
    def degree(self) -> int:
        return self.source.degree

    @property
    def homogeneous(self) -> bool:
        return all(m.degree == self.source.degree for m in self.target.terms)

    def relation(self) -> Polynomial:
        """source - target, as an element of the ideal."""
        return monomial_poly(self.target.field, self.source) - self.target

    def __str__(self):
        return f"{self.name} : {self.source} => {self.target}"


class _Automaton:
    """Aho-Corasick factor matcher over the rule sources."""

    def __init__(self, rules: list[Rule]):
        self.goto: list[dict[str, int]] = [{}]
        self.fail: list[int] = [0]
        self.out: list[list[int]] = [[]]
        for idx, rule in enumerate(rules):
            state = 0
            for letter in rule.source.word:
                nxt = self.goto[state].get(letter)
                if nxt is None:
                    nxt = len(self.goto)
                    self.goto[state][letter] = nxt
                    self.goto.append({})
                    self.fail.append(0)
                    self.out.append([])
                state = nxt
            self.out[state].append(idx)
        queue = deque()
        for s in self.goto[0].values():
            queue.append(s)
        while queue:
            s = queue.popleft()
            for letter, t in self.goto[s].items():
                queue.append(t)
                f = self.fail[s]
                while f and letter not in self.goto[f]:
                    f = self.fail[f]
                self.fail[t] = self.goto[f].get(letter, 0) if self.goto[f].get(letter, 0) != t else 0
                self.out[t] = self.out[t] + self.out[self.fail[t]]

    def step(self, state: int, letter: str) -> int:
        while state and letter not in self.goto[state]:
            state = self.fail[state]
        return self.goto[state].get(letter, 0)

    def matches_ending_at(self, state: int) -> list[int]:
        return self.out[state]


@dataclass(frozen=True)
class RewriteStep:
    """One rewriting step: coefficient, left context, rule, right context."""

    coeff: object
    left: Monomial
    rule: Rule
    right: Monomial

    @property
    def redex(self) -> Monomial:
        return self.left * self.rule.source * self.right

    def delta(self) -> Polynomial:
        """lam * m1 (source - target) m2; applying the step subtracts this."""
        return self.rule.relation().whisker(self.left, self.right).scale(self.coeff)

    def apply(self, f: Polynomial) -> Polynomial:
        return f - self.delta()

    def scaled(self, c) -> "RewriteStep":
        field = self.rule.target.field
        return RewriteStep(field.mul(c, self.coeff), self.left, self.rule, self.right)

    def whiskered(self, left: Optional[Monomial], right: Optional[Monomial]) -> "RewriteStep":
        l = self.left if left is None else left * self.left
        r = self.right if right is None else self.right * right
        return RewriteStep(self.coeff, l, self.rule, r)


@dataclass(frozen=True)
class Trace:
    """A recorded positive rewriting sequence."""

    start: Polynomial
    steps: tuple[RewriteStep, ...]
    end: Polynomial

    def __len__(self):
        return len(self.steps)

    def check(self) -> bool:
        f = self.start
        for s in self.steps:
            f = s.apply(f)
        return f == self.end


class Polygraph2:
    """A linear 2-polygraph: quiver, ordered rules, optional monomial order.

    Reducedness and homogeneity flags are recomputed, never trusted from
    input.  Certificates (termination, convergence) are attached by the
    completion module; the system is treated as immutable once certified.
    """

    def __init__(
        self,
        quiver: Quiver,
        field: Field,
        rules: Iterable[Rule],
        order: Optional[MonomialOrder] = None,
    ):
        self.quiver = quiver
        self.field = field
        self.rules = list(rules)
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise RewriteError("duplicate rule names")
        self.order = order
        self.termination_certificate = None
        self.convergence_certificate = None
        self._automaton = _Automaton(self.rules)
        self._nf_cache: dict[tuple[str, Monomial], tuple[Polynomial, tuple[RewriteStep, ...]]] = {}
        self.left_reduced = self._compute_left_reduced()
        self.right_reduced = self._compute_right_reduced()
        self.homogeneous = all(r.homogeneous for r in self.rules)
        self.homogeneity_degree = (
            min((r.degree for r in self.rules), default=None) if self.homogeneous else None
        )

    # -- flags ---------------------------------------------------------------

    def _compute_left_reduced(self) -> bool:
        for i, r in enumerate(self.rules):
            for j, other in enumerate(self.rules):
                if i == j:
                    continue
                if r.source.factor_positions(other.source.word):
                    return False
        return True

    def _compute_right_reduced(self) -> bool:
        return all(
            not self.occurrences(m) for r in self.rules for m in r.target.terms
        )

    @property
    def certified_terminating(self) -> bool:
        cert = self.termination_certificate
        return cert is not None and getattr(cert, "ok", False)

    @property
    def certified_convergent(self) -> bool:
        return self.certified_terminating and bool(self.convergence_certificate)

    def replaced(self, rules: Iterable[Rule], order: Optional[MonomialOrder] = None) -> "Polygraph2":
        return Polygraph2(self.quiver, self.field, rules, order if order is not None else self.order)

    # -- redex search --------------------------------------------------------

    def occurrences(self, m: Monomial) -> list[tuple[int, int]]:
        """All (rule index, start) occurrences of rule sources in m,
        sorted by start position then rule index."""
        found = []
        state = 0
        for i, letter in enumerate(m.word):
            state = self._automaton.step(state, letter)
            for idx in self._automaton.matches_ending_at(state):
                start = i + 1 - len(self.rules[idx].source.word)
                found.append((idx, start))
        found.sort(key=lambda t: (t[1], t[0]))
        return found

    def is_reducible(self, m: Monomial) -> bool:
        state = 0
        for letter in m.word:
            state = self._automaton.step(state, letter)
            if self._automaton.matches_ending_at(state):
                return True
        return False

    def contexts(self, m: Monomial, rule_idx: int, start: int) -> tuple[Monomial, Monomial]:
        rule = self.rules[rule_idx]
        k = len(rule.source.word)
        left = self.quiver.monomial(m.word[:start], at=m.source)
        right_word = m.word[start + k :]
        if right_word:
            right = self.quiver.monomial(right_word)
        else:
            right = self.quiver.identity(m.target)
        return left, right


# -- operations --------------------------------------------------------------


def find_redexes(f: Polynomial, P: Polygraph2) -> list[RewriteStep]:
    """One step per (term, occurrence, rule), deterministically ordered."""
    steps = []
    for coeff, m in f.items():
        for idx, start in P.occurrences(m):
            left, right = P.contexts(m, idx, start)
            steps.append(RewriteStep(coeff, left, P.rules[idx], right))
    return steps


def rightmost_step(m: Monomial, P: Polygraph2) -> RewriteStep:
    """The step on m whose left context has maximal length (ties broken by
    lowest rule id; only possible on non-left-reduced systems)."""
    occ = P.occurrences(m)
    if not occ:
        raise NoStepError(f"{m} is irreducible")
    best_start = max(start for _, start in occ)
    idx = min(i for i, start in occ if start == best_start)
    left, right = P.contexts(m, idx, best_start)
    return RewriteStep(P.field.one, left, P.rules[idx], right)


def leftmost_step(m: Monomial, P: Polygraph2) -> RewriteStep:
    occ = P.occurrences(m)
    if not occ:
        raise NoStepError(f"{m} is irreducible")
    idx, start = occ[0]
    left, right = P.contexts(m, idx, start)
    return RewriteStep(P.field.one, left, P.rules[idx], right)


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise StepBudgetExceeded("step budget exhausted; nontermination suspected")


def _nf_monomial(
    m: Monomial, P: Polygraph2, strategy: str, budget: _Budget
) -> tuple[Polynomial, tuple[RewriteStep, ...]]:
    cached = P._nf_cache.get((strategy, m))
    if cached is not None:
        return cached
    field = P.field
    if not P.is_reducible(m):
        result = (monomial_poly(field, m), ())
        P._nf_cache[(strategy, m)] = result
        return result
    budget.spend()
    step = rightmost_step(m, P) if strategy == "rightmost" else leftmost_step(m, P)
    h = step.rule.target.whisker(step.left, step.right)
    nf, tail = _nf_polynomial(h, P, strategy, budget)
    result = (nf, (step,) + tail)
    P._nf_cache[(strategy, m)] = result
    return result


def _nf_polynomial(
    f: Polynomial, P: Polygraph2, strategy: str, budget: _Budget
) -> tuple[Polynomial, tuple[RewriteStep, ...]]:
    field = P.field
    nf = P.quiver.zero(field, f.source, f.target)
    steps: list[RewriteStep] = []
    for coeff, m in f.items():
        mnf, msteps = _nf_monomial(m, P, strategy, budget)
        nf = nf + mnf.scale(coeff)
        steps.extend(s.scaled(coeff) for s in msteps)
    return nf, tuple(steps)


def normal_form(
    f: Polynomial,
    P: Polygraph2,
    strategy: Literal["rightmost", "leftmost"] = "rightmost",
    step_budget: Optional[int] = None,
) -> tuple[Polynomial, Trace]:
    """Normalize f; under 'rightmost' the trace is the rightmost
    normalisation strategy applied monomial by monomial (linear in f)."""
    if step_budget is None:
        if not P.certified_terminating:
            step_budget = DEFAULT_STEP_BUDGET
        else:
            step_budget = DEFAULT_STEP_BUDGET * 10
    budget = _Budget(step_budget)
    try:
        nf, steps = _nf_polynomial(f, P, strategy, budget)
    except StepBudgetExceeded as e:
        raise StepBudgetExceeded(
            f"step budget exhausted while normalizing {f}"
            + ("" if P.certified_terminating else " (no termination certificate)"),
        ) from e
    return nf, Trace(f, steps, nf)


def nf(f: Polynomial, P: Polygraph2) -> Polynomial:
    return normal_form(f, P)[0]


def ideal_member(f: Polynomial, P: Polygraph2) -> bool:
    if not P.certified_convergent:
        raise NotCertifiedError("ideal membership requires a certified-convergent system")
    return nf(f, P).is_zero()


@dataclass
class StandardBasis:
    """Irreducible monomials per internal degree; counts give the Hilbert
    function of the presented algebra when the system is convergent."""

    by_degree: dict[int, list[Monomial]] = dc_field(default_factory=dict)

    def counts(self) -> dict[int, int]:
        return {d: len(ms) for d, ms in sorted(self.by_degree.items())}


def standard_basis(P: Polygraph2, dmax: int) -> StandardBasis:
    basis = StandardBasis({d: [] for d in range(dmax + 1)})
    frontier: list[tuple[Monomial, int]] = []
    for obj in P.quiver.objects:
        ident = P.quiver.identity(obj)
        basis.by_degree[0].append(ident)
        frontier.append((ident, 0))
    while frontier:
        new_frontier = []
        for m, state in frontier:
            for g in P.quiver.generators.values():
                if g.source != m.target or m.degree + g.degree > dmax:
                    continue
                nstate = P._automaton.step(state, g.name)
                if P._automaton.matches_ending_at(nstate):
                    continue
                nm = Monomial(m.word + (g.name,), m.source, g.target, m.degree + g.degree)
                basis.by_degree[nm.degree].append(nm)
                new_frontier.append((nm, nstate))
        frontier = new_frontier
    for d in basis.by_degree:
        basis.by_degree[d].sort()
    return basis


def all_words(quiver: Quiver, degree: int) -> list[Monomial]:
    """All composable words of the given internal degree."""
    out = []
    frontier = [quiver.identity(obj) for obj in quiver.objects]
    while frontier:
        nxt = []
        for m in frontier:
            if m.degree == degree:
                out.append(m)
                continue
            for g in quiver.generators.values():
                if g.source == m.target and m.degree + g.degree <= degree:
                    nxt.append(Monomial(m.word + (g.name,), m.source, g.target, m.degree + g.degree))
        frontier = nxt
    return sorted(out)


def monomialize(P: Polygraph2) -> Polygraph2:
    rules = [
        Rule(r.name, r.source, P.quiver.zero(P.field, r.source.source, r.source.target))
        for r in P.rules
    ]
    return P.replaced(rules)


def words_up_to(quiver: Quiver, dmax: int) -> list[Monomial]:
    out = []
    for d in range(dmax + 1):
        out.extend(all_words(quiver, d))
    return out


def _row(f: Polynomial, index: dict[Monomial, int], field: Field) -> list:
    row = [field.zero] * len(index)
    for m, c in f.terms.items():
        row[index[m]] = c
    return row


def ideal_spanning(P: Polygraph2, dmax: int):
    """All context embeddings u (source - target) v whose top monomial has
    degree <= dmax, as rows over the basis of all words of degree <= dmax.
    Returns (rows, index)."""
    field = P.field
    words = words_up_to(P.quiver, dmax)
    index = {m: i for i, m in enumerate(words)}
    contexts = words  # identity contexts included
    rows = []
    for rule in P.rules:
        rel = rule.relation()
        for u in contexts:
            if u.target != rule.source.source or u.degree + rule.degree > dmax:
                continue
            for v in contexts:
                if v.source != rule.source.target:
                    continue
                if u.degree + rule.source.degree + v.degree > dmax:
                    continue
                emb = rel.whisker(u, v)
                if any(m.degree > dmax for m in emb.terms):
                    continue
                rows.append(_row(emb, index, field))
    return rows, index


def ideal_rows_in_degree(P: Polygraph2, degree: int):
    """Homogeneous-degree slice of the relation ideal spanning set.
    Requires homogeneous rules.  Returns (rows, index over words of that
    degree)."""
    if not P.homogeneous:
        raise RewriteError("degreewise ideal slices need homogeneous rules")
    field = P.field
    words = all_words(P.quiver, degree)
    index = {m: i for i, m in enumerate(words)}
    rows = []
    for rule in P.rules:
        rest = degree - rule.degree
        if rest < 0:
            continue
        for du in range(rest + 1):
            for u in all_words(P.quiver, du):
                if u.target != rule.source.source:
                    continue
                for v in all_words(P.quiver, rest - du):
                    if v.source != rule.source.target:
                        continue
                    emb = rule.relation().whisker(u, v)
                    if not emb.is_zero():
                        rows.append(_row(emb, index, field))
    return rows, index


def quotient_dimension(P: Polygraph2, degree: int) -> int:
    """dim of the presented algebra in one degree, by brute-force row
    reduction of the relation ideal slice."""
    rows, index = ideal_rows_in_degree(P, degree)
    return len(index) - linalg.rank(rows, P.field)


def pbw_check(P: Polygraph2, candidate: Iterable[Monomial], dmax: int, build_xi: bool = False) -> dict:
    """Verify the three PBW-basis conditions degree by degree up to dmax.

    (i) candidate is a linear basis of the algebra per degree (brute-force
        quotient by the relation ideal);
    (ii) composites of candidates are candidates or reducible;
    (iii) a word is a candidate iff all its N-letter windows are.
    The check is bounded by dmax; the report records the bound.
    """
    if not P.homogeneous or P.homogeneity_degree is None:
        raise RewriteError("PBW check needs an N-homogeneous system")
    N = P.homogeneity_degree
    field = P.field
    cand = sorted(set(candidate))
    for m in cand:
        P.quiver.monomial(m.word, at=m.source)  # re-validate composability
    cand_set = set(cand)
    by_degree: dict[int, list[Monomial]] = {}
    for m in cand:
        by_degree.setdefault(m.degree, []).append(m)
    if 0 not in by_degree:
        for obj in P.quiver.objects:
            by_degree.setdefault(0, []).append(P.quiver.identity(obj))
            cand_set.add(P.quiver.identity(obj))
    failures: list[dict] = []

    for d in range(1, dmax + 1):
        rows, index = ideal_rows_in_degree(P, d)
        rank_ideal = linalg.rank(rows, field)
        dim_a = len(index) - rank_ideal
        cd = by_degree.get(d, [])
        if len(cd) != dim_a:
            failures.append(
                {"condition": "i", "degree": d, "detail": f"{len(cd)} candidates vs dim {dim_a}"}
            )
            continue
        cand_rows = [_row(monomial_poly(field, m), index, field) for m in cd]
        if linalg.rank(rows + cand_rows, field) != rank_ideal + len(cd):
            failures.append(
                {"condition": "i", "degree": d, "detail": "candidates linearly dependent mod ideal"}
            )

    for u in cand:
        if u.is_identity():
            continue
        for v in cand:
            if v.is_identity() or u.target != v.source:
                continue
            uv = u * v
            if uv.degree > dmax:
                continue
            if uv not in cand_set and not P.is_reducible(uv):
                failures.append(
                    {"condition": "ii", "degree": uv.degree, "detail": f"{uv} neither candidate nor reducible"}
                )

    for d in range(N, dmax + 1):
        for w in all_words(P.quiver, d):
            if w.weight < N:
                continue
            windows_ok = all(
                Monomial(
                    w.word[k : k + N],
                    P.quiver.generators[w.word[k]].source,
                    P.quiver.generators[w.word[k + N - 1]].target,
                    sum(P.quiver.generators[g].degree for g in w.word[k : k + N]),
                )
                in cand_set
                for k in range(w.weight - N + 1)
            )
            if (w in cand_set) != windows_ok:
                failures.append(
                    {"condition": "iii", "degree": d, "detail": f"window condition fails on {w}"}
                )

    report = {
        "passed": not failures,
        "dmax": dmax,
        "N": N,
        "failures": failures,
    }
    if build_xi and not failures:
        report["xi"] = _build_xi(P, cand, N)
    return report


def _build_xi(P: Polygraph2, cand: list[Monomial], N: int) -> dict:
    """Construct the polygraph with rules uv => [uv] over the candidate basis
    and report its convergence under the ambient order, if any."""
    from . import completion  # local import; completion depends on this module

    field = P.field
    rows, index = ideal_rows_in_degree(P, N)
    cand_n = [m for m in cand if m.degree == N]
    rules = []
    k = 0
    for u in cand:
        for v in cand:
            if u.is_identity() or v.is_identity() or u.target != v.source:
                continue
            uv = u * v
            if uv.degree != N or uv in set(cand_n):
                continue
            coeffs = _decompose_mod_ideal(uv, cand_n, rows, index, field)
            if coeffs is None:
                continue
            target = P.quiver.poly(
                field, [(c, b) for c, b in zip(coeffs, cand_n)], uv.source, uv.target
            )
            rules.append(Rule(f"xi{k}", uv, target))
            k += 1
    xi = Polygraph2(P.quiver, field, rules, P.order)
    result = {"rules": [str(r) for r in rules], "convergent": None}
    if P.order is not None:
        cert = completion.certify_termination(xi, hint=P.order)
        xi.termination_certificate = cert
        if cert.ok:
            result["convergent"] = completion.check_confluence(xi)["convergent"]
    return result


def _decompose_mod_ideal(m: Monomial, basis: list[Monomial], ideal_rows, index, field):
    """Coefficients of m in the candidate basis modulo the ideal, or None."""
    cols = list(ideal_rows) + [
        _row(monomial_poly(field, b), index, field) for b in basis
    ]
    target = _row(monomial_poly(field, m), index, field)
    sol = linalg.solve_rows(cols, target, field)
    if sol is None:
        return None
    return sol[len(ideal_rows) :]
