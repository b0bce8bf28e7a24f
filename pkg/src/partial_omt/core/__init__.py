"""
Exact numbers and the shared logical vocabulary
"""
from .errors import (
    OmtError,
    OracleLimitError,
    ParseError,
    ReductionError,
    SoundnessError,
    StackUnderflowError,
    TheoryError,
    UnassignedVariableError,
)
from .monitor import PerformanceMonitor
from .numbers import DeltaRational, Rational, format_rational, to_rational
from .terms import (
    ArithModel,
    Atom,
    AtomKind,
    AtomTable,
    Clause,
    CnfFormula,
    LinearTerm,
    Literal,
    Relation,
    Sort,
    TruthAssignment,
    concretize,
    eval_literal,
    normalize_constraint,
)

__all__ = [
    "ArithModel",
    "Atom",
    "AtomKind",
    "AtomTable",
    "Clause",
    "CnfFormula",
    "DeltaRational",
    "LinearTerm",
    "Literal",
    "OmtError",
    "OracleLimitError",
    "ParseError",
    "PerformanceMonitor",
    "Rational",
    "ReductionError",
    "Relation",
    "SoundnessError",
    "Sort",
    "StackUnderflowError",
    "TheoryError",
    "TruthAssignment",
    "UnassignedVariableError",
    "concretize",
    "eval_literal",
    "format_rational",
    "normalize_constraint",
    "to_rational",
]
