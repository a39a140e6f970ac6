"""Termination certificates, branchings, S-polynomials, confluence decision,
completion, and interreduction.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Optional

from .algebra import Monomial, MonomialOrder, Polynomial, monomial_poly
from .rewriting import (
    NotCertifiedError,
    Polygraph2,
    RewriteError,
    RewriteStep,
    Rule,
    all_words,
    find_redexes,
    normal_form,
)

DEFAULT_CONTEXT_BOUND = 3
DEFAULT_MAX_DEGREE = 12
DEFAULT_MAX_RULES = 512


def worker_count() -> int:
    try:
        n = int(os.environ.get("LINREW_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


@dataclass(frozen=True)
class PatternMeasure:
    """Letter weights plus subword-pattern weights; the measure of a monomial
    is the weighted count of letters and (possibly overlapping) pattern
    occurrences."""

    letter_weights: tuple[tuple[str, int], ...]
    pattern_weights: tuple[tuple[tuple[str, ...], int], ...]
    context_bound: int = DEFAULT_CONTEXT_BOUND

    def measure(self, word: tuple[str, ...]) -> int:
        letters = dict(self.letter_weights)
        total = sum(letters.get(g, 0) for g in word)
        for pattern, w in self.pattern_weights:
            k = len(pattern)
            total += w * sum(
                1 for i in range(len(word) - k + 1) if word[i : i + k] == pattern
            )
        return total


@dataclass
class TerminationCertificate:
    kind: str  # 'order-compatible' | 'pattern-measure' | 'user-asserted'
    ok: bool
    order: Optional[MonomialOrder] = None
    measure: Optional[PatternMeasure] = None
    notes: str = ""

    def summary(self) -> dict:
        out = {"kind": self.kind, "ok": self.ok, "notes": self.notes}
        if self.measure is not None:
            out["context_bound"] = self.measure.context_bound
        return out


@dataclass(frozen=True)
class Branching:
    """Two rewriting steps out of the same source."""

    word: Monomial
    step1: RewriteStep
    step2: RewriteStep
    classification: str  # aspherical | Peiffer | additive-Peiffer | overlapping | critical
    positions: tuple[int, int] = (0, 0)

    @property
    def rules(self) -> tuple[Rule, Rule]:
        return (self.step1.rule, self.step2.rule)


@dataclass(frozen=True)
class SPolynomial:
    poly: Polynomial
    rule1: Rule
    rule2: Rule
    overlap_word: Monomial


def certify_termination(P: Polygraph2, hint=None) -> TerminationCertificate:
    """Order-compatible or pattern-measure certificate; failure is a report
    naming the first violating rule, never an exception."""
    if hint is None:
        hint = P.order
    if isinstance(hint, MonomialOrder):
        for rule in P.rules:
            for t in rule.target.terms:
                if not hint.less(t, rule.source):
                    return TerminationCertificate(
                        "order-compatible",
                        False,
                        order=hint,
                        notes=f"rule {rule.name}: target monomial {t} not below source {rule.source}",
                    )
        return TerminationCertificate("order-compatible", True, order=hint)
    if isinstance(hint, PatternMeasure):
        L = hint.context_bound
        contexts = [w for d in range(L + 1) for w in all_words(P.quiver, d) if w.weight <= L]
        for rule in P.rules:
            src = rule.source
            for u in contexts:
                if u.target != src.source:
                    continue
                for v in contexts:
                    if v.source != src.target:
                        continue
                    base = hint.measure(u.word + src.word + v.word)
                    for t in rule.target.terms:
                        if hint.measure(u.word + t.word + v.word) >= base:
                            return TerminationCertificate(
                                "pattern-measure",
                                False,
                                measure=hint,
                                notes=(
                                    f"rule {rule.name}: measure does not decrease in "
                                    f"context ({u}, {v}) on target monomial {t}"
                                ),
                            )
        return TerminationCertificate(
            "pattern-measure",
            True,
            measure=hint,
            notes=(
                f"bounded check, contexts up to length {L}; semi-sound "
                "(decrease verified only in bounded contexts)"
            ),
        )
    return TerminationCertificate(
        "user-asserted", False, notes="no usable hint (give an order or a measure)"
    )


def classify_branching(f: Polynomial, a: RewriteStep, b: RewriteStep) -> str:
    """Classification of a local branching (a, b) on f."""
    if a == b:
        return "aspherical"
    if a.redex != b.redex:
        return "additive-Peiffer"
    pa, pb = a.left.weight, b.left.weight
    ea, eb = pa + a.rule.source.weight, pb + b.rule.source.weight
    if ea <= pb or eb <= pa:
        return "Peiffer"
    return "overlapping"


def local_branchings(f: Polynomial, P: Polygraph2) -> list[Branching]:
    steps = find_redexes(f, P)
    out = []
    for a, b in itertools.combinations(steps, 2):
        cls = classify_branching(f, a, b)
        lm = a.redex
        out.append(Branching(lm, a, b, cls, (a.left.weight, b.left.weight)))
    return out


def enumerate_critical_branchings(P: Polygraph2) -> list[Branching]:
    """One branching per proper overlap of two rule sources (nonempty proper
    suffix of source(r1) = prefix of source(r2)); on non-left-reduced systems
    inclusion overlaps are also emitted."""
    field = P.field
    out = []
    for i, r1 in enumerate(P.rules):
        w1 = r1.source.word
        for j, r2 in enumerate(P.rules):
            w2 = r2.source.word
            for o in range(1, min(len(w1), len(w2))):
                if w1[len(w1) - o :] != w2[:o]:
                    continue
                word = P.quiver.monomial(w1 + w2[o:], at=r1.source.source)
                start2 = len(w1) - o
                left2, right2 = P.contexts(word, j, start2)
                left1, right1 = P.contexts(word, i, 0)
                step1 = RewriteStep(field.one, left1, r1, right1)
                step2 = RewriteStep(field.one, left2, r2, right2)
                out.append(Branching(word, step1, step2, "critical", (0, start2)))
            if not P.left_reduced and i != j and len(w2) <= len(w1):
                for start2 in r1.source.factor_positions(w2):
                    if start2 == 0 and len(w2) == len(w1):
                        continue
                    word = r1.source
                    left2, right2 = P.contexts(word, j, start2)
                    step1 = RewriteStep(field.one, P.quiver.identity(word.source), r1,
                                        P.quiver.identity(word.target))
                    step2 = RewriteStep(field.one, left2, r2, right2)
                    out.append(Branching(word, step1, step2, "critical", (0, start2)))
    out.sort(key=lambda b: (_rule_index(P, b.step1.rule), _rule_index(P, b.step2.rule),
                            b.word.weight))
    return out


def _rule_index(P: Polygraph2, rule: Rule) -> int:
    return next(i for i, r in enumerate(P.rules) if r.name == rule.name)


def s_polynomial(b: Branching) -> SPolynomial:
    """t1(leftmost leg) - t1(rightmost leg) of a critical branching."""
    if b.classification != "critical":
        raise RewriteError("S-polynomial is only defined for critical branchings")
    field = b.step1.rule.target.field
    w = monomial_poly(field, b.word)
    t1 = b.step1.apply(w)
    t2 = b.step2.apply(w)
    return SPolynomial(t1 - t2, b.step1.rule, b.step2.rule, b.word)


def check_confluence(P: Polygraph2) -> dict:
    """Convergence report: every critical S-polynomial must normalize to 0.
    Attaches a convergence certificate to P when convergent."""
    if not P.certified_terminating:
        raise NotCertifiedError("confluence check requires a termination certificate")
    branchings = enumerate_critical_branchings(P)

    def handle(b: Branching):
        sp = s_polynomial(b)
        field = P.field
        w = monomial_poly(field, b.word)
        nf1, trace1 = normal_form(b.step1.apply(w), P)
        nf2, trace2 = normal_form(b.step2.apply(w), P)
        spnf, _ = normal_form(sp.poly, P)
        return {
            "word": str(b.word),
            "rules": (sp.rule1.name, sp.rule2.name),
            "s_polynomial": str(sp.poly),
            "s_polynomial_nf": str(spnf),
            "joinable": spnf.is_zero(),
            "nf1": str(nf1),
            "nf2": str(nf2),
            "_spnf": spnf,
            "_traces": (trace1, trace2),
        }

    n = worker_count()
    if n > 1 and len(branchings) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n) as pool:
            entries = list(pool.map(handle, branchings))
    else:
        entries = [handle(b) for b in branchings]
    convergent = all(e["joinable"] for e in entries)
    report = {
        "convergent": convergent,
        "critical_branchings": len(branchings),
        "entries": entries,
    }
    if convergent:
        P.convergence_certificate = {
            "method": "critical-pair lemma + Newman",
            "criticals_checked": len(branchings),
        }
    return report


def orient(f: Polynomial, order: MonomialOrder, name: str) -> Optional[Rule]:
    """Orient a nonzero polynomial as lm => lm - f/lc under the order."""
    if f.is_zero():
        return None
    from .algebra import leading_data

    lm, lc, _ = leading_data(f, order)
    field = f.field
    monic = f.scale(field.generic_inv(lc))
    target = monomial_poly(field, lm) - monic
    return Rule(name, lm, target)


class CompletionBoundExceeded(RewriteError):
    def __init__(self, message, partial: Polygraph2):
        super().__init__(message)
        self.partial = partial


def complete(
    P: Polygraph2,
    order: Optional[MonomialOrder] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    max_rules: int = DEFAULT_MAX_RULES,
) -> Polygraph2:
    """Knuth-Bendix/Buchberger completion: returns a reduced convergent
    polygraph presenting the same algebra, carrying order-compatible
    termination and convergence certificates.  Raises
    CompletionBoundExceeded (carrying the partial, non-certified system)
    when a bound trips."""
    if order is None:
        order = P.order
    if order is None:
        raise RewriteError("completion needs a monomial order")
    rules: list[Rule] = []
    fresh = itertools.count()
    for r in P.rules:
        rel = r.relation()
        if rel.is_zero():
            raise RewriteError(f"rule {r.name} is a zero relation; not orientable")
        rules.append(orient(rel, order, r.name))

    while True:
        cur = Polygraph2(P.quiver, P.field, rules, order)
        cert = certify_termination(cur, order)
        if not cert.ok:
            raise RewriteError(f"orientation broke the termination order: {cert.notes}")
        cur.termination_certificate = cert
        # Fair queue: ascending overlap-word degree, then discovery order.
        pending = sorted(
            enumerate(enumerate_critical_branchings(cur)),
            key=lambda t: (t[1].word.degree, t[0]),
        )
        added = False
        for _, b in pending:
            sp = s_polynomial(b)
            spnf, _ = normal_form(sp.poly, cur)
            if spnf.is_zero():
                continue
            new_rule = orient(spnf, order, f"c{next(fresh)}")
            if new_rule.degree > max_degree:
                raise CompletionBoundExceeded(
                    f"completion exceeded max degree {max_degree}", cur
                )
            if len(rules) + 1 > max_rules:
                raise CompletionBoundExceeded(
                    f"completion exceeded max rule count {max_rules}", cur
                )
            rules.append(new_rule)
            added = True
            break
        if added:
            continue
        reduced = _interreduce_rules(cur, order)
        if [r.relation() for r in reduced.rules] != [r.relation() for r in cur.rules]:
            rules = list(reduced.rules)
            continue
        cert = certify_termination(reduced, order)
        reduced.termination_certificate = cert
        report = check_confluence(reduced)
        if report["convergent"]:
            return reduced
        # Interreduction may expose new obligations; loop again.
        rules = list(reduced.rules)


def interreduce(P: Polygraph2) -> Polygraph2:
    """Left- and right-reduce a terminating system (Tietze-equivalent,
    idempotent)."""
    if not P.certified_terminating and P.order is None:
        raise NotCertifiedError("interreduction requires a termination certificate or order")
    order = P.order
    if order is None and P.termination_certificate is not None:
        order = P.termination_certificate.order
    if order is None:
        raise NotCertifiedError("interreduction needs an order-compatible certificate")
    out = _interreduce_rules(P, order)
    cert = certify_termination(out, order)
    if cert.ok:
        out.termination_certificate = cert
    if P.convergence_certificate:
        check_confluence(out)
    return out


def _interreduce_rules(P: Polygraph2, order: MonomialOrder) -> Polygraph2:
    rules = list(P.rules)
    changed = True
    while changed:
        changed = False
        for i, r in enumerate(rules):
            others = rules[:i] + rules[i + 1 :]
            sub = Polygraph2(P.quiver, P.field, others, order)
            sub.termination_certificate = certify_termination(sub, order)
            relnf, _ = normal_form(r.relation(), sub)
            new = orient(relnf, order, r.name) if not relnf.is_zero() else None
            if new is None:
                rules = others
                changed = True
                break
            if new.relation() != r.relation():
                rules = rules[:i] + [new] + rules[i + 1 :]
                changed = True
                break
        if changed:
            continue
        # Right-reduce targets against the full system.
        full = Polygraph2(P.quiver, P.field, rules, order)
        full.termination_certificate = certify_termination(full, order)
        for i, r in enumerate(rules):
            tnf, _ = normal_form(r.target, full)
            if tnf != r.target:
                rules = rules[:i] + [Rule(r.name, r.source, tnf)] + rules[i + 1 :]
                changed = True
                break
    # Drop duplicate relations, keeping first occurrences.
    seen = set()
    unique = []
    for r in rules:
        key = r.relation()
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return Polygraph2(P.quiver, P.field, unique, order)


def groebner_view(P: Polygraph2, order: Optional[MonomialOrder] = None) -> list[Polynomial]:
    """The set {source - target} per rule, with unit leading coefficients."""
    if order is None:
        order = P.order
    out = []
    for r in P.rules:
        rel = r.relation()
        if order is not None:
            from .algebra import leading_data

            _, lc, _ = leading_data(rel, order)
            rel = rel.scale(P.field.generic_inv(lc))
        out.append(rel)
    return out
