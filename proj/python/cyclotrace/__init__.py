"""Traces of cycle integrals of f_{k,A}, three ways."""

from ._core import (
    CyclotraceError,
    HypothesisViolated,
    NoConvergence,
    TraceReport,
    closed_formula,
    eval_fkA,
    fD_const_term,
    hurwitz,
    hyp2f1,
    hypothesis_check,
    lhs_geodesic,
    lhs_latticesum,
    rhs_trace,
    selftest,
)

__all__ = [
    "CyclotraceError",
    "HypothesisViolated",
    "NoConvergence",
    "TraceReport",
    "closed_formula",
    "eval_fkA",
    "fD_const_term",
    "hurwitz",
    "hyp2f1",
    "hypothesis_check",
    "lhs_geodesic",
    "lhs_latticesum",
    "rhs_trace",
    "selftest",
]
