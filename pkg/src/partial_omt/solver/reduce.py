"""
Truth-assignment reduction: shrink a total assignment to a partial one
that still propositionally satisfies the formula
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

from partial_omt.core.errors import ReductionError
from partial_omt.core.numbers import DeltaRational
from partial_omt.core.terms import CnfFormula, Literal, TruthAssignment

from .sat import ClauseIndex
from .simplex import OptResult, OptStatus

log = logging.getLogger(__name__)


class ReductionStrategy(str, Enum):
    NONE = "none"
    BASIC = "basic"
    GUIDED = "guided"


class Minimizer(Protocol):
    """Approximate theory minimizer used by guided reduction."""

    calls: int

    def minimize(self, mu: list[Literal]) -> OptResult: ...

    def propose(self) -> Literal | None: ...


@dataclass
class ReductionReport:
    reduced: TruthAssignment
    dropped: list[Literal] = field(default_factory=list)
    minimize_calls: int = 0
    final_limiting: list[Literal] = field(default_factory=list)
    values: list[DeltaRational] = field(default_factory=list)


def _require(cnf: CnfFormula, index: ClauseIndex, eta: TruthAssignment):
    if not eta.is_total(cnf.atom_ids()):
        raise ReductionError("assignment does not assign every atom of the formula")
    if not index.satisfies_all(eta):
        raise ReductionError("assignment does not satisfy the formula")


def theory_literals(cnf: CnfFormula, mu: TruthAssignment) -> list[Literal]:
    """Theory literals of ``mu`` in formula-appearance order."""
    return [
        Literal(a, mu.values[a])
        for a in cnf.appearance_order()
        if a in mu.values and cnf.atoms.is_theory(a)
    ]


def reduce_none(eta: TruthAssignment) -> ReductionReport:
    return ReductionReport(TruthAssignment(dict(eta.values)))


def reduce_basic(
    cnf: CnfFormula,
    eta: TruthAssignment,
    theory_only: bool = True,
    index: ClauseIndex | None = None,
) -> ReductionReport:
    """
    Drop literals one at a time, in the order their atoms first appear in
    the formula, whenever every clause keeps another true literal.

    With ``theory_only=False`` Boolean literals are candidates too.
    """
    index = index or ClauseIndex(cnf.clauses)
    _require(cnf, index, eta)
    counter = index.counter(eta)
    dropped: list[Literal] = []
    for atom_id in cnf.appearance_order():
        if theory_only and not cnf.atoms.is_theory(atom_id):
            continue
        lit = Literal(atom_id, eta.values[atom_id])
        if counter.can_drop(lit):
            counter.drop(lit)
            dropped.append(lit)
    log.debug("Basic reduction dropped %d of %d literals", len(dropped), len(eta))
    return ReductionReport(counter.assignment, dropped)


def reduce_guided(
    cnf: CnfFormula,
    eta: TruthAssignment,
    minimizer: Minimizer,
    index: ClauseIndex | None = None,
) -> ReductionReport:
    """
    Minimize, then repeatedly take the next limiting literal the minimizer
    proposes and drop it if the formula stays satisfied, re-minimizing
    after every drop.
    """
    index = index or ClauseIndex(cnf.clauses)
    _require(cnf, index, eta)
    counter = index.counter(eta)

    calls = 1
    result = minimizer.minimize(theory_literals(cnf, counter.assignment))
    if result.status is OptStatus.INFEASIBLE:
        raise ReductionError("assignment is inconsistent in the theory")
    values = [result.value] if result.is_optimum else []

    dropped: list[Literal] = []
    while (lit := minimizer.propose()) is not None:
        if not counter.can_drop(lit):
            continue
        counter.drop(lit)
        dropped.append(lit)
        calls += 1
        result = minimizer.minimize(theory_literals(cnf, counter.assignment))
        if result.is_optimum:
            values.append(result.value)
        log.debug("Guided reduction dropped %s, value now %s", lit, result.value)

    return ReductionReport(
        counter.assignment,
        dropped,
        minimize_calls=calls,
        final_limiting=list(result.limiting),
        values=values,
    )


def reduce_assignment(
    strategy: ReductionStrategy,
    cnf: CnfFormula,
    eta: TruthAssignment,
    minimizer: Minimizer | None = None,
    index: ClauseIndex | None = None,
    theory_only: bool = True,
) -> ReductionReport:
    strategy = ReductionStrategy(strategy)
    if strategy is ReductionStrategy.NONE:
        return reduce_none(eta)
    if strategy is ReductionStrategy.BASIC:
        return reduce_basic(cnf, eta, theory_only=theory_only, index=index)
    if minimizer is None:
        raise ReductionError("guided reduction needs a minimizer")
    return reduce_guided(cnf, eta, minimizer, index=index)
