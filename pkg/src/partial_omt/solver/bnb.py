"""
Branch-and-bound minimization over mixed integer/rational conjunctions
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from partial_omt.core.numbers import ZERO, DeltaRational
from partial_omt.core.terms import AtomTable, LinearTerm, Literal, Sort

from .simplex import LraSolver, OptResult, OptStatus, objective_bound_literal

log = logging.getLogger(__name__)


class BnbMode(str, Enum):
    FULL = "full"
    TRUNCATED = "truncated"


@dataclass
class BnbConfig:
    mode: BnbMode = BnbMode.TRUNCATED
    node_limit: int = 10_000
    branch_rule: str = "most-fractional"

    def __post_init__(self):
        self.mode = BnbMode(self.mode)
        if self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.branch_rule != "most-fractional":
            raise ValueError(f"unknown branch rule '{self.branch_rule}'")


Cut = tuple[int, bool, int]


def delta_floor(value: DeltaRational) -> int:
    """Largest integer n with n <= value."""
    fl = math.floor(value.real)
    if value.real == fl and value.delta < 0:
        return fl - 1
    return fl


def is_integral(value: DeltaRational) -> bool:
    return value.delta == 0 and value.real.denominator == 1


def _fractionality(value: DeltaRational) -> Fraction:
    fl = delta_floor(value)
    low = value.real - fl
    return min(low, 1 - low)


def branch_variable(values: Mapping[int, DeltaRational], integer_vars: Sequence[int]) -> int | None:
    """Most fractional integer variable (smallest id on ties), or None if all are integral."""
    best: tuple[Fraction, int] | None = None
    for v in sorted(integer_vars):
        if is_integral(values[v]):
            continue
        key = (-_fractionality(values[v]), v)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]


def _unique(literals: Sequence[Literal]) -> list[Literal]:
    return list(dict.fromkeys(literals))


def minimize_relaxation(
    atoms: AtomTable,
    mu: Sequence[Literal],
    objective: LinearTerm,
    var_types: Mapping[int, Sort],
) -> OptResult:
    """LRA minimization of ``mu`` with integrality ignored."""
    solver = LraSolver(atoms, len(var_types))
    result = solver.assert_all(mu)
    if not result.sat:
        return OptResult(OptStatus.INFEASIBLE, core=result.core)
    return solver.minimize(objective)


def minimize_mixed(
    atoms: AtomTable,
    mu: Sequence[Literal],
    objective: LinearTerm,
    var_types: Mapping[int, Sort],
    cfg: BnbConfig | None = None,
) -> OptResult:
    """
    Best-bound branch and bound on the LRA relaxation.

    Full mode proves optimality; its ``certificate`` collects the
    literals of ``mu`` used by every leaf (bound-pruned, infeasible or
    integral), which is what a blocking lemma may cite. Truncated mode
    stops at the first integer-feasible node.
    """
    cfg = cfg or BnbConfig()
    integer_vars = [v for v, s in var_types.items() if s is Sort.INT]
    solver = LraSolver(atoms, len(var_types))
    result = solver.assert_all(mu)
    if not result.sat:
        return OptResult(OptStatus.INFEASIBLE, core=result.core)

    counter = 0
    # (parent value, tie-break, cuts, parent limiting literals)
    heap: list[tuple[DeltaRational, int, tuple[Cut, ...], list[Literal]]] = [
        (ZERO, counter, (), []),
    ]
    incumbent: OptResult | None = None
    certificate: list[Literal] = []
    nodes = 0

    while heap:
        if nodes >= cfg.node_limit:
            log.info("Branch and bound stopped after %d nodes", nodes)
            out = OptResult(OptStatus.RESOURCE_OUT, nodes=nodes, possibly_suboptimal=True)
            if incumbent is not None:
                out.value, out.model = incumbent.value, incumbent.model
                out.limiting = incumbent.limiting
            return out

        key, _, cuts, parent_limiting = heapq.heappop(heap)
        if incumbent is not None and key >= incumbent.value:
            certificate.extend(parent_limiting)
            continue
        nodes += 1
        solver.push()
        node = _solve_node(solver, cuts, objective)
        solver.pop()

        if node.status is OptStatus.INFEASIBLE:
            certificate.extend(node.core)
            continue
        if node.status is OptStatus.UNBOUNDED:
            return OptResult(OptStatus.UNBOUNDED, nodes=nodes)
        if incumbent is not None and node.value >= incumbent.value:
            certificate.extend(node.limiting)
            continue

        values = node.values
        var = branch_variable(values, integer_vars)
        if var is None:
            incumbent = node.result
            certificate.extend(node.limiting)
            log.debug("Integer node %d with value %s", nodes, node.value)
            if cfg.mode is BnbMode.TRUNCATED:
                incumbent.possibly_suboptimal = True
                incumbent.nodes = nodes
                return incumbent
            continue

        fl = delta_floor(values[var])
        for cut in ((var, True, fl), (var, False, fl + 1)):
            counter += 1
            heapq.heappush(heap, (node.value, counter, cuts + (cut,), node.limiting))

    if incumbent is None:
        return OptResult(OptStatus.INFEASIBLE, core=_unique(certificate), nodes=nodes)
    incumbent.certificate = _unique(certificate)
    incumbent.nodes = nodes
    log.debug("Branch and bound optimum %s after %d nodes", incumbent.value, nodes)
    return incumbent


@dataclass
class _Node:
    status: OptStatus
    result: OptResult
    values: dict[int, DeltaRational]

    @property
    def value(self) -> DeltaRational:
        return self.result.value

    @property
    def core(self) -> list[Literal]:
        return self.result.core

    @property
    def limiting(self) -> list[Literal]:
        return self.result.limiting


def _solve_node(solver: LraSolver, cuts: tuple[Cut, ...], objective: LinearTerm) -> _Node:
    for var, upper, bound in cuts:
        value = DeltaRational(Fraction(bound))
        check = (solver.assert_upper if upper else solver.assert_lower)(var, value, None)
        if not check.sat:
            result = OptResult(OptStatus.INFEASIBLE, core=check.core)
            return _Node(result.status, result, {})
    result = solver.minimize(objective)
    values = solver.valuation() if result.is_optimum else {}
    return _Node(result.status, result, values)


class RelaxationMinimizer:
    """
    The approximate minimizer of guided reduction: LRA minimization of the
    relaxation with tableau-based proposals of limiting literals.
    """

    def __init__(self, atoms: AtomTable, var_types: Mapping[int, Sort], objective: LinearTerm):
        self.atoms = atoms
        self.var_types = var_types
        self.objective = objective
        self.calls = 0
        self._solver: LraSolver | None = None

    def minimize(self, mu: Sequence[Literal]) -> OptResult:
        self.calls += 1
        self._solver = LraSolver(self.atoms, len(self.var_types))
        result = self._solver.assert_all(mu)
        if not result.sat:
            self._solver = None
            return OptResult(OptStatus.INFEASIBLE, core=result.core)
        return self._solver.minimize(self.objective)

    def propose(self) -> Literal | None:
        if self._solver is None:
            return None
        return self._solver.propose_literal_to_drop()


class ConflictMinimizer(RelaxationMinimizer):
    """
    Proposals from the conflict of ``mu and (cost < value)``: works for
    any theory solver that explains unsatisfiability.
    """

    def __init__(self, atoms: AtomTable, var_types: Mapping[int, Sort], objective: LinearTerm):
        super().__init__(atoms, var_types, objective)
        self._proposals: list[Literal] = []

    def minimize(self, mu: Sequence[Literal]) -> OptResult:
        result = super().minimize(mu)
        self._proposals = []
        if result.is_optimum:
            bound = objective_bound_literal(self.atoms, self.objective, result.value)
            solver = LraSolver(self.atoms, len(self.var_types))
            solver.assert_all(mu)
            check = solver.assert_literal(bound)
            if check.sat:
                check = solver.check()
            self._proposals = [lit for lit in check.core if lit != bound]
        return result

    def propose(self) -> Literal | None:
        if not self._proposals:
            return None
        return self._proposals.pop(0)
