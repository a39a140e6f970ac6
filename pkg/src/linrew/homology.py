"""The K-reduced right-module complex, Tor dimension tables, homotopical
collapses, and Koszulity verdicts.

Cells of dimension k sit in homological degree k (objects at 0, generators
at 1, rules at 2, overlap chains above).  delta[k] maps (k+1)-cells to
k-cells; Tor_k per internal degree is dim ker delta[k-1] - rank delta[k].
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional

from . import linalg
from .rewriting import Polygraph2, RewriteError, Trace
from .resolution import (
    ChainCell,
    boundary4,
    ell,
    enumerate_chains,
    generating_confluence,
)
from .completion import enumerate_critical_branchings


def trace_bracket(t: Trace) -> dict[str, object]:
    """The K-reduced bracket of a positive 2-cell: only whole-word steps
    (identity left context and augmentation-surviving right context)
    contribute their coefficient on the rule basis."""
    out: dict[str, object] = {}
    for step in t.steps:
        if not step.left.is_identity() or step.right.degree != 0:
            continue
        field = step.rule.target.field
        name = step.rule.name
        out[name] = field.add(out.get(name, field.zero), step.coeff)
    return out


class ReducedComplex:
    """Truncated reduced complex: graded bases of cells and the boundary
    matrices delta[k] : C_{k+1} -> C_k, stored as sparse columns."""

    def __init__(self, field, kmax: int, dmax: int, N: Optional[int]):
        self.field = field
        self.kmax = kmax
        self.dmax = dmax
        self.N = N
        self.cells: dict[int, list] = {}
        self.degrees: dict[tuple[int, object], int] = {}
        self.delta: dict[int, dict] = {}
        self.exact: dict[int, bool] = {}
        self.boundary_steps: dict[tuple[int, object], list] = {}

    def add_cell(self, k: int, cell_id, degree: int):
        self.cells.setdefault(k, []).append(cell_id)
        self.degrees[(k, cell_id)] = degree

    def set_column(self, k: int, cell_id, column: dict):
        f = self.field
        self.delta.setdefault(k, {})[cell_id] = {
            r: c for r, c in column.items() if not f.is_zero(c)
        }

    def basis(self, k: int, degree: Optional[int] = None) -> list:
        cells = self.cells.get(k, [])
        if degree is None:
            return list(cells)
        return [c for c in cells if self.degrees[(k, c)] == degree]

    def matrix(self, k: int, degree: int):
        """Rows over C_k(degree), one row per C_{k+1}(degree) column cell."""
        rows_basis = self.basis(k, degree)
        index = {c: i for i, c in enumerate(rows_basis)}
        f = self.field
        rows = []
        for col_cell in self.basis(k + 1, degree):
            col = self.delta.get(k, {}).get(col_cell, {})
            row = [f.zero] * len(rows_basis)
            for r, c in col.items():
                if r in index:
                    row[index[r]] = c
            rows.append(row)
        return rows, rows_basis

    def rank(self, k: int, degree: int) -> int:
        rows, _ = self.matrix(k, degree)
        return linalg.rank(rows, self.field)

    def kernel_dim(self, k: int, degree: int) -> int:
        """dim ker of delta[k-1] restricted to C_k(degree)."""
        if k == 0:
            return len(self.basis(0, degree))
        rows, _ = self.matrix(k - 1, degree)
        return len(self.basis(k, degree)) - linalg.rank(rows, self.field)

    def check_dd_zero(self) -> bool:
        f = self.field
        for k in (2, 3):
            for col_cell, col in self.delta.get(k, {}).items():
                acc: dict = {}
                for mid, c in col.items():
                    for r, c2 in self.delta.get(k - 1, {}).get(mid, {}).items():
                        acc[r] = f.add(acc.get(r, f.zero), f.mul(c, c2))
                if any(not f.is_zero(v) for v in acc.values()):
                    return False
        return True

    # -- homotopical reduction ------------------------------------------------

    def collapse(self, k: int, gamma, A):
        """Remove the k-cell gamma and the (k+1)-cell A by the Gaussian
        elimination this collapse induces (homology is unchanged)."""
        f = self.field
        colA = self.delta.get(k, {}).get(A, {})
        mu = colA.get(gamma)
        if mu is None or f.is_zero(mu):
            raise RewriteError(
                f"cannot collapse: {gamma} does not appear invertibly in the boundary of {A}"
            )
        mu_inv = f.generic_inv(mu)
        for other, col in list(self.delta.get(k, {}).items()):
            if other == A:
                continue
            c = col.get(gamma)
            if c is None or f.is_zero(c):
                continue
            factor = f.mul(c, mu_inv)
            new = dict(col)
            for r, v in colA.items():
                nv = f.sub(new.get(r, f.zero), f.mul(factor, v))
                if f.is_zero(nv):
                    new.pop(r, None)
                else:
                    new[r] = nv
            new.pop(gamma, None)
            self.delta[k][other] = new
        self.delta[k].pop(A, None)
        for col in self.delta.get(k + 1, {}).values():
            col.pop(A, None)
        self.delta.get(k - 1, {}).pop(gamma, None)
        self.cells[k].remove(gamma)
        self.cells[k + 1].remove(A)
        self.degrees.pop((k, gamma), None)
        self.degrees.pop((k + 1, A), None)

    def copy(self) -> "ReducedComplex":
        other = ReducedComplex(self.field, self.kmax, self.dmax, self.N)
        other.cells = {k: list(v) for k, v in self.cells.items()}
        other.degrees = dict(self.degrees)
        other.delta = {k: {c: dict(col) for c, col in cols.items()} for k, cols in self.delta.items()}
        other.exact = dict(self.exact)
        other.boundary_steps = dict(self.boundary_steps)
        return other


def collapse_pair(complexdata: ReducedComplex, k: int, gamma, A) -> ReducedComplex:
    """Paper-faithful collapse: gamma must appear exactly once in A's recorded
    boundary, identity-whiskered, with invertible coefficient.  Returns a new
    complex; homology per internal degree is unchanged."""
    occurrences = complexdata.boundary_steps.get((k + 1, A))
    if occurrences is not None:
        hits = [o for o in occurrences if o[0] == gamma]
        if len(hits) != 1:
            raise RewriteError(
                f"collapse hypothesis violated: {gamma} occurs {len(hits)} times "
                f"in the boundary of {A}"
            )
        if not hits[0][1]:
            raise RewriteError(
                f"collapse hypothesis violated: the occurrence of {gamma} in {A} is whiskered"
            )
    out = complexdata.copy()
    out.collapse(k, gamma, A)
    return out


def collapse_saturate(complexdata: ReducedComplex) -> ReducedComplex:
    """Greedy matrix-level collapse until no pair remains (deterministic)."""
    cx = complexdata.copy()
    changed = True
    while changed:
        changed = False
        for k in (3, 2, 1):
            for A in list(cx.delta.get(k, {})):
                col = cx.delta[k].get(A)
                if not col:
                    continue
                gamma = sorted(col, key=str)[0]
                if cx.field.is_zero(col[gamma]):
                    continue
                cx.collapse(k, gamma, A)
                changed = True
                break
            if changed:
                break
    return cx


def build_complex(P: Polygraph2, cells: Iterable[ChainCell], kmax: int, dmax: int) -> ReducedComplex:
    """Assemble the reduced complex: delta[2] from generating confluences,
    delta[3] from the 4-cell boundary recursion."""
    field = P.field
    N = P.homogeneity_degree if P.homogeneous else None
    cx = ReducedComplex(field, kmax, dmax, N)
    for obj in P.quiver.objects:
        cx.add_cell(0, obj, 0)
    cells = list(cells)
    rules_by_name = {r.name: r for r in P.rules}
    for c in cells:
        if c.dim == 1:
            cx.add_cell(1, c.word.word[0], c.degree)
        elif c.dim == 2:
            cx.add_cell(2, c.redexes[0][0], c.degree)
        elif c.dim in (3, 4, 5):
            cx.add_cell(c.dim, c.redexes, c.degree)

    cx.delta[0] = {g: {} for g in cx.cells.get(1, [])}

    # delta[1]: bracket of source minus target; only weight-1 monomials survive.
    cx.delta[1] = {}
    for name in cx.cells.get(2, []):
        rule = rules_by_name[name]
        col: dict = {}
        if rule.source.weight == 1:
            g = rule.source.word[0]
            col[g] = field.add(col.get(g, field.zero), field.one)
        for m, coeff in rule.target.terms.items():
            if m.weight == 1:
                g = m.word[0]
                col[g] = field.sub(col.get(g, field.zero), coeff)
        cx.set_column(1, name, col)

    cx.delta[2] = {}
    for c in cells:
        if c.dim != 3:
            continue
        conf = generating_confluence(c, P)
        src_b = trace_bracket(conf.source_trace)
        tgt_b = trace_bracket(conf.target_trace)
        col = dict(src_b)
        for r, v in tgt_b.items():
            col[r] = field.sub(col.get(r, field.zero), v)
        cx.set_column(2, c.redexes, col)
        steps = [
            (s.rule.name, s.left.is_identity() and s.right.degree == 0)
            for s in conf.source_trace.steps + conf.target_trace.steps
        ]
        cx.boundary_steps[(3, c.redexes)] = steps

    cx.delta[3] = {}
    memo: dict = {}
    for c in cells:
        if c.dim != 4:
            continue
        data = boundary4(c, P, memo)
        col: dict = {}
        occurrences = []
        for sign, instances in ((1, data.source_instances), (-1, data.target_instances)):
            for inst in instances:
                occurrences.append((inst.cell_key, inst.identity_whiskered()))
                if not inst.identity_whiskered():
                    continue
                v = inst.coeff if sign == 1 else field.neg(inst.coeff)
                col[inst.cell_key] = field.add(col.get(inst.cell_key, field.zero), v)
        cx.set_column(3, c.redexes, col)
        cx.boundary_steps[(4, c.redexes)] = occurrences

    for k in range(0, 4):
        cx.exact[k] = True
    return cx


@dataclass
class TorTable:
    """Entries (k, internal degree) -> exact dim or interval, with
    provenance ('exact' | 'interval' | 'bound' | 'hard-zero')."""

    kmax: int
    dmax: int
    entries: dict = dc_field(default_factory=dict)

    def set(self, k: int, i: int, **entry):
        self.entries[(k, i)] = entry

    def get(self, k: int, i: int):
        return self.entries.get((k, i))

    def exact_dim(self, k: int, i: int) -> Optional[int]:
        e = self.entries.get((k, i))
        if e is None:
            return 0
        if e["kind"] in ("exact", "hard-zero"):
            return e["dim"]
        return None

    def as_dict(self) -> dict:
        return {f"{k},{i}": e for (k, i), e in sorted(self.entries.items())}


def _chains_for_table(P: Polygraph2, kmax: int, dmax: int):
    depth = min(kmax + 1, 5)
    return enumerate_chains(P, depth, dmax)


def tor_table(P: Polygraph2, kmax: int, dmax: int, cells=None, cx: Optional[ReducedComplex] = None) -> TorTable:
    """Exact Tor dimensions for homological degree <= 3, intervals at 4,
    counts-only bounds beyond; hard zeros below the Koszul degree pattern."""
    if cells is None:
        cells = _chains_for_table(P, kmax, dmax)
    if cx is None:
        cx = build_complex(P, cells, kmax, dmax)
    table = TorTable(kmax, dmax)
    field = P.field
    N = cx.N
    count5: dict[int, int] = {}
    for c in cells:
        if c.dim == 5:
            count5[c.degree] = count5.get(c.degree, 0) + 1
    for k in range(0, kmax + 1):
        for i in range(0, dmax + 1):
            if N is not None and i < ell(N, k):
                table.set(k, i, kind="hard-zero", dim=0)
                continue
            if k <= 3:
                dim = cx.kernel_dim(k, i) - cx.rank(k, i)
                table.set(k, i, kind="exact", dim=dim)
            elif k == 4:
                hi = cx.kernel_dim(4, i)
                lo = max(0, hi - count5.get(i, 0))
                if lo == hi:
                    table.set(k, i, kind="exact", dim=hi)
                else:
                    table.set(k, i, kind="interval", lo=lo, hi=hi)
            else:
                cnt = len(cx.basis(k, i))
                if cnt == 0:
                    table.set(k, i, kind="exact", dim=0)
                else:
                    table.set(k, i, kind="bound", lo=0, hi=cnt)
    return table


@dataclass
class KoszulVerdict:
    status: str  # 'Koszul-certified' | 'Not-Koszul' | 'Koszul-up-to-bound'
    reason: Optional[str] = None
    witness: Optional[tuple[int, int]] = None
    kmax: int = 0
    dmax: int = 0
    notes: str = ""
    survivors: Optional[dict] = None
    tor: Optional[TorTable] = None

    def as_dict(self) -> dict:
        out = {
            "status": self.status,
            "reason": self.reason,
            "witness": list(self.witness) if self.witness else None,
            "kmax": self.kmax,
            "dmax": self.dmax,
            "notes": self.notes,
        }
        if self.survivors is not None:
            out["survivors"] = {str(k): [str(c) for c in v] for k, v in self.survivors.items()}
        if self.tor is not None:
            out["tor"] = self.tor.as_dict()
        return out


def koszul_verdict(P: Polygraph2, kmax: int = 4, dmax: int = 6) -> KoszulVerdict:
    """Decision cascade: no criticals; quadratic convergent; concentrated
    after collapse; nonzero off-diagonal Tor; otherwise up-to-bound."""
    if not P.homogeneous or P.homogeneity_degree is None:
        raise RewriteError("Koszulity verdict needs an N-homogeneous system")
    if not P.certified_convergent:
        raise RewriteError("Koszulity verdict needs a certified-convergent system")
    N = P.homogeneity_degree
    criticals = enumerate_critical_branchings(P)
    if not criticals:
        return KoszulVerdict(
            "Koszul-certified", "no-critical-branchings", kmax=kmax, dmax=dmax,
            notes=f"convergent with empty critical branching set; N={N}",
        )
    if all(r.degree == N == 2 for r in P.rules):
        return KoszulVerdict(
            "Koszul-certified", "quadratic-convergent", kmax=kmax, dmax=dmax,
            notes="quadratic convergent presentation",
        )
    cells = _chains_for_table(P, kmax, dmax)
    cx = build_complex(P, cells, kmax, dmax)
    collapsed = collapse_saturate(cx)
    # Boundary maps are exact only through delta[3], so collapse evidence is
    # conclusive for dimensions 2 and 3; higher cells are outside the window.
    survivors = {k: collapsed.basis(k) for k in (2, 3) if k in collapsed.cells}
    concentrated = all(
        collapsed.degrees[(k, c)] == ell(N, k)
        for k, cs in survivors.items()
        for c in cs
    )
    table = tor_table(P, kmax, dmax, cells=cells, cx=cx)
    for (k, i), e in sorted(table.entries.items()):
        if i == ell(N, k):
            continue
        nonzero = (e["kind"] == "exact" and e["dim"] > 0) or (
            e["kind"] == "interval" and e["lo"] > 0
        )
        if nonzero:
            return KoszulVerdict(
                "Not-Koszul", "nonzero-off-diagonal-tor", witness=(k, i),
                kmax=kmax, dmax=dmax,
                notes=f"Tor_{k},({i}) is nonzero but l_{N}({k}) = {ell(N, k)}",
                survivors=survivors,
                tor=table,
            )
    if concentrated:
        return KoszulVerdict(
            "Koszul-certified", "concentrated-after-collapse", kmax=kmax, dmax=dmax,
            notes=(
                f"collapse saturation leaves only l_{N}-concentrated cells; "
                f"certificate is scoped to the truncation (kmax={kmax}, dmax={dmax})"
            ),
            survivors=survivors,
            tor=table,
        )
    return KoszulVerdict(
        "Koszul-up-to-bound", None, kmax=kmax, dmax=dmax,
        notes="no off-diagonal Tor detected within the truncation",
        survivors=survivors,
        tor=table,
    )
