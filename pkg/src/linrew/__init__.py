"""Linear rewriting over path algebras: polygraphs, completion, resolutions."""

from .scalars import Field, FieldError, ParameterField, PrimeField, QQ, RationalField, GF
from .algebra import (
    CompositionError,
    Generator,
    Monomial,
    MonomialOrder,
    Polynomial,
    Quiver,
    compose,
    leading_data,
    monomial_poly,
)
from .rewriting import (
    NoStepError,
    NotCertifiedError,
    Polygraph2,
    RewriteError,
    RewriteStep,
    Rule,
    StepBudgetExceeded,
    Trace,
    find_redexes,
    ideal_member,
    leftmost_step,
    monomialize,
    nf,
    normal_form,
    pbw_check,
    quotient_dimension,
    rightmost_step,
    standard_basis,
)
from .completion import (
    Branching,
    CompletionBoundExceeded,
    PatternMeasure,
    SPolynomial,
    TerminationCertificate,
    certify_termination,
    check_confluence,
    classify_branching,
    complete,
    enumerate_critical_branchings,
    groebner_view,
    interreduce,
    local_branchings,
    orient,
    s_polynomial,
)
from .resolution import (
    Boundary4Data,
    CellInstance,
    ChainCell,
    Confluence3Cell,
    boundary4,
    cell_degrees,
    ell,
    enumerate_chains,
    generating_confluence,
)
from .homology import (
    KoszulVerdict,
    ReducedComplex,
    TorTable,
    build_complex,
    collapse_pair,
    collapse_saturate,
    koszul_verdict,
    tor_table,
    trace_bracket,
)

__version__ = "0.1.0"
