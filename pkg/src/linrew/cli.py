"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 bound exceeded or certification
failed.  Reports are JSON on stdout (``nf`` prints the bare polynomial).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import lpformat
from .completion import (
    CompletionBoundExceeded,
    certify_termination,
    check_confluence,
    complete,
    enumerate_critical_branchings,
)
from .homology import koszul_verdict, tor_table
from .lpformat import LpError
from .resolution import cell_degrees, enumerate_chains
from .rewriting import (
    NotCertifiedError,
    RewriteError,
    StepBudgetExceeded,
    normal_form,
    pbw_check,
    standard_basis,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNCERTIFIED = 3


class _Uncertified(Exception):
    def __init__(self, report):
        self.report = report


def _load(path: str, seed=None):
    try:
        P, meta = lpformat.parse_file(path)
    except FileNotFoundError:
        raise LpError(f"no such file: {path}")
    meta["path"] = path
    if seed is not None:
        meta["seed"] = seed
    return P, meta


def _base_report(P, meta) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "file": meta.get("path"),
        "field": str(P.field),
        "generators": [g.name for g in P.quiver.generators.values()],
        "rules": {r.name: {"source": str(r.source), "target": lpformat._poly_str(r.target)} for r in P.rules},
    }
    if meta.get("seed") is not None:
        out["seed"] = meta["seed"]
    return out


def _certify(P, meta) -> dict:
    """Attach termination + convergence certificates or raise _Uncertified."""
    hints = [h for h in (P.order, meta.get("measure")) if h is not None]
    cert = None
    for hint in hints:
        cert = certify_termination(P, hint)
        if cert.ok:
            break
    if cert is None:
        cert = certify_termination(P, None)
    summary = {"termination": cert.summary()}
    if not cert.ok:
        raise _Uncertified(summary)
    P.termination_certificate = cert
    report = check_confluence(P)
    summary["confluence"] = {
        "convergent": report["convergent"],
        "critical_branchings": report["critical_branchings"],
        "entries": [
            {k: v for k, v in e.items() if not k.startswith("_")}
            for e in report["entries"]
        ],
    }
    if not report["convergent"]:
        raise _Uncertified(summary)
    return summary


def _prepare(P, meta, doc):
    """Certified-convergent system for resolution-level commands, completing
    under the declared order when the input itself is not convergent."""
    try:
        _certify(P, meta)
        return P
    except _Uncertified:
        if P.order is None:
            raise
        done = complete(P, P.order)
        doc["completed"] = True
        doc["added_rules"] = {
            r.name: {"source": str(r.source), "target": lpformat._poly_str(r.target)}
            for r in done.rules
            if r.name not in {x.name for x in P.rules}
        }
        return done


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _cmd_nf(args) -> int:
    P, meta = _load(args.file, args.seed)
    quiver = P.quiver
    word = lpformat._expand_word(lpformat._tokens_with_cols(args.term), 0, quiver)
    if not word:
        raise LpError("--term needs a nonempty word")
    from .algebra import monomial_poly

    m = quiver.monomial(word)
    try:
        result, _ = normal_form(monomial_poly(P.field, m), P)
    except StepBudgetExceeded:
        _emit({"error": "step budget exceeded (system may be non-terminating)"})
        return EXIT_UNCERTIFIED
    print(lpformat._poly_str(result))
    return EXIT_OK


def _cmd_check(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    try:
        doc.update(_certify(P, meta))
    except _Uncertified as u:
        doc.update(u.report)
        doc["convergent"] = False
        _emit(doc)
        return EXIT_UNCERTIFIED
    doc["convergent"] = True
    _emit(doc)
    return EXIT_OK


def _cmd_complete(args) -> int:
    P, meta = _load(args.file, args.seed)
    order = P.order
    if order is None:
        raise LpError("complete needs an order declaration")
    doc = _base_report(P, meta)
    try:
        done = complete(P, order, max_degree=args.max_degree, max_rules=args.max_rules)
    except CompletionBoundExceeded as e:
        doc["error"] = str(e)
        doc["partial_rules"] = [str(r) for r in e.partial.rules]
        _emit(doc)
        return EXIT_UNCERTIFIED
    doc["added_rules"] = {
        r.name: {"source": str(r.source), "target": lpformat._poly_str(r.target)}
        for r in done.rules
        if r.name not in {x.name for x in P.rules}
    }
    doc["rules"] = {
        r.name: {"source": str(r.source), "target": lpformat._poly_str(r.target)}
        for r in done.rules
    }
    doc["convergent"] = done.certified_convergent
    if args.output:
        lpformat.write_file(args.output, done, meta)
        doc["output"] = args.output
    _emit(doc)
    return EXIT_OK


def _cmd_branchings(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    if args.fold <= 2:
        crits = enumerate_critical_branchings(P)
        doc["fold"] = 2
        doc["critical_branchings"] = [
            {
                "word": str(b.word),
                "rules": [b.step1.rule.name, b.step2.rule.name],
                "positions": list(b.positions),
            }
            for b in crits
        ]
        _emit(doc)
        return EXIT_OK
    try:
        P = _prepare(P, meta, doc)
    except _Uncertified as u:
        doc.update(u.report)
        _emit(doc)
        return EXIT_UNCERTIFIED
    cells = enumerate_chains(P, args.fold + 1, args.dmax)
    doc["fold"] = args.fold
    doc["branchings"] = [
        {"word": str(c.word), "redexes": [[r, s] for r, s in c.redexes]}
        for c in cells
        if c.dim == args.fold + 1
    ]
    _emit(doc)
    return EXIT_OK


def _cmd_chains(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    try:
        P = _prepare(P, meta, doc)
    except _Uncertified as u:
        doc.update(u.report)
        _emit(doc)
        return EXIT_UNCERTIFIED
    cells = enumerate_chains(P, args.kmax, args.dmax)
    N = P.homogeneity_degree if P.homogeneous else None
    doc["kmax"] = args.kmax
    doc["dmax"] = args.dmax
    stats = cell_degrees(cells, N)
    doc["counts"] = {f"{k},{d}": n for (k, d), n in stats["counts"].items()}
    if "l_N_concentrated" in stats:
        doc["l_N_concentrated"] = {str(k): v for k, v in stats["l_N_concentrated"].items()}
    doc["chains"] = [
        {"dim": c.dim, "word": str(c.word), "redexes": [[r, s] for r, s in c.redexes]}
        for c in cells
        if c.dim >= 3
    ]
    _emit(doc)
    return EXIT_OK


def _cmd_tor(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    try:
        P = _prepare(P, meta, doc)
    except _Uncertified as u:
        doc.update(u.report)
        _emit(doc)
        return EXIT_UNCERTIFIED
    table = tor_table(P, args.kmax, args.dmax)
    doc["kmax"] = args.kmax
    doc["dmax"] = args.dmax
    doc["tor"] = table.as_dict()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, default=str)
    _emit(doc)
    return EXIT_OK


def _cmd_koszul(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    try:
        P = _prepare(P, meta, doc)
        verdict = koszul_verdict(P, args.kmax, args.dmax)
    except _Uncertified as u:
        doc.update(u.report)
        _emit(doc)
        return EXIT_UNCERTIFIED
    except (NotCertifiedError, RewriteError) as e:
        doc["error"] = str(e)
        _emit(doc)
        return EXIT_UNCERTIFIED
    doc["verdict"] = verdict.as_dict()
    _emit(doc)
    return EXIT_OK


def _cmd_hilbert(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    try:
        P = _prepare(P, meta, doc)
    except _Uncertified as u:
        doc.update(u.report)
        _emit(doc)
        return EXIT_UNCERTIFIED
    basis = standard_basis(P, args.dmax)
    doc["dmax"] = args.dmax
    doc["counts"] = {str(d): n for d, n in basis.counts().items()}
    doc["basis"] = {
        str(d): [str(m) for m in ms] for d, ms in sorted(basis.by_degree.items())
    }
    _emit(doc)
    return EXIT_OK


def _cmd_pbw(args) -> int:
    P, meta = _load(args.file, args.seed)
    doc = _base_report(P, meta)
    with open(args.basis_file, encoding="utf-8") as fh:
        text = fh.read()
    candidate = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        word = lpformat._expand_word(lpformat._tokens_with_cols(line), lineno, P.quiver)
        candidate.append(
            P.quiver.monomial(word) if word else P.quiver.identity(P.quiver.objects[0])
        )
    report = pbw_check(P, candidate, args.dmax, build_xi=args.xi)
    doc["pbw"] = report
    _emit(doc)
    return EXIT_OK if report["passed"] else EXIT_UNCERTIFIED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="linrew", description="Linear rewriting: completion, resolutions, Koszulity."
    )
    ap.add_argument("--seed", type=int, default=None, help="seed echoed into reports")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", help="normal form of a term")
    p.add_argument("file")
    p.add_argument("--term", required=True, help="word, space-separated generators")
    p.set_defaults(func=_cmd_nf)

    p = sub.add_parser("check", help="termination and confluence report")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("complete", help="Knuth-Bendix/Buchberger completion")
    p.add_argument("file")
    p.add_argument("--max-degree", type=int, default=12)
    p.add_argument("--max-rules", type=int, default=512)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("branchings", help="critical (n-fold) branchings")
    p.add_argument("file")
    p.add_argument("--fold", type=int, default=2)
    p.add_argument("--dmax", type=int, default=8)
    p.set_defaults(func=_cmd_branchings)

    p = sub.add_parser("chains", help="overlap chain cells")
    p.add_argument("file")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=_cmd_chains)

    p = sub.add_parser("tor", help="Tor dimension table")
    p.add_argument("file")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--json", default=None, help="also write the report to PATH")
    p.set_defaults(func=_cmd_tor)

    p = sub.add_parser("koszul", help="Koszulity verdict")
    p.add_argument("file")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--dmax", type=int, default=6)
    p.set_defaults(func=_cmd_koszul)

    p = sub.add_parser("hilbert", help="standard-basis counts per degree")
    p.add_argument("file")
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=_cmd_hilbert)

    p = sub.add_parser("pbw", help="PBW basis conditions")
    p.add_argument("file")
    p.add_argument("--basis-file", required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--xi", action="store_true", help="build the induced quadratic polygraph")
    p.set_defaults(func=_cmd_pbw)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (LpError, FileNotFoundError) as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_INPUT
    except CompletionBoundExceeded as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_UNCERTIFIED
    except (NotCertifiedError, StepBudgetExceeded) as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_UNCERTIFIED
    except RewriteError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
