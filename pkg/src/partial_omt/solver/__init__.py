"""
Decision and optimization engines: CDCL, Simplex, branch and bound, and
the OMT linear search on top of them
"""
from .bnb import BnbConfig, BnbMode, ConflictMinimizer, RelaxationMinimizer, minimize_mixed
from .omt import IterationRecord, OmtConfig, OmtOutcome, OmtSearch, OmtStatus, OmtTrace, solve
from .reduce import (
    ReductionReport,
    ReductionStrategy,
    reduce_assignment,
    reduce_basic,
    reduce_guided,
    reduce_none,
)
from .sat import ClauseIndex, SatResult, SatSolver, SatStatus
from .simplex import LraSolver, OptResult, OptStatus, objective_bound_literal

__all__ = [
    "BnbConfig",
    "BnbMode",
    "ClauseIndex",
    "ConflictMinimizer",
    "IterationRecord",
    "LraSolver",
    "OmtConfig",
    "OmtOutcome",
    "OmtSearch",
    "OmtStatus",
    "OmtTrace",
    "OptResult",
    "OptStatus",
    "ReductionReport",
    "ReductionStrategy",
    "RelaxationMinimizer",
    "SatResult",
    "SatSolver",
    "SatStatus",
    "minimize_mixed",
    "objective_bound_literal",
    "reduce_assignment",
    "reduce_basic",
    "reduce_guided",
    "reduce_none",
    "solve",
]
