"""
Linear-search OMT with partial truth assignments
"""
from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from partial_omt.core.errors import SoundnessError
from partial_omt.core.monitor import PerformanceMonitor
from partial_omt.core.numbers import DeltaRational
from partial_omt.core.terms import ArithModel, Atom, Literal, TruthAssignment
from partial_omt.frontend.parser import Problem

from .bnb import BnbConfig, BnbMode, ConflictMinimizer, RelaxationMinimizer, minimize_mixed
from .reduce import ReductionReport, ReductionStrategy, reduce_assignment, theory_literals
from .sat import SatSolver
from .simplex import LraSolver, OptResult, OptStatus, minimize_literals, objective_bound_literal

log = logging.getLogger(__name__)


class OmtStatus(str, Enum):
    OPTIMUM = "optimum"
    UNSAT = "unsat"
    UNBOUNDED = "unbounded"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class OmtConfig:
    strategy: ReductionStrategy = ReductionStrategy.GUIDED
    lia_mode: BnbConfig = field(default_factory=BnbConfig)
    learn_block_lemma: bool = True
    time_budget: float = 60.0
    seed: int = 0
    max_iterations: int | None = None
    first_assignment: list[Literal] | None = None
    proposal: str = "tableau"
    basic_theory_only: bool = True

    def __post_init__(self):
        self.strategy = ReductionStrategy(self.strategy)
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.proposal not in ("tableau", "conflict"):
            raise ValueError(f"unknown proposal source '{self.proposal}'")
        if self.max_iterations is not None and self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")


@dataclass
class IterationRecord:
    index: int
    ub: DeltaRational
    dropped: list[Literal]
    minimize_calls: int
    eta_size: int
    mu_size: int
    values: list[DeltaRational] = field(default_factory=list)
    time_s: float = field(default=0.0, compare=False)


@dataclass
class OmtTrace:
    records: list[IterationRecord] = field(default_factory=list)
    sat_calls: int = 0
    theory_conflicts: int = 0
    lemmas: int = 0
    stages: dict = field(default_factory=dict, compare=False)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def upper_bounds(self) -> list[DeltaRational]:
        return [r.ub for r in self.records]

    def ub_at(self, iteration: int) -> DeltaRational | None:
        """Best bound after ``iteration`` iterations (or the last one if the run was shorter)."""
        if not self.records:
            return None
        return self.records[min(iteration, len(self.records)) - 1].ub

    def to_csv(self, path: str | Path | None = None, timings: bool = True) -> str:
        """One row per improvement; ``timings=False`` leaves ``time_s`` empty for reproducible files."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["index", "time_s", "ub", "dropped", "minimize_calls"])
        for r in self.records:
            time_s = f"{r.time_s:.6f}" if timings else ""
            writer.writerow([r.index, time_s, str(r.ub), len(r.dropped), r.minimize_calls])
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


@dataclass
class OmtOutcome:
    status: OmtStatus
    trace: OmtTrace
    value: DeltaRational | None = None
    model: ArithModel | None = None

    @property
    def has_model(self) -> bool:
        return self.model is not None


class OmtSearch:
    """
    SAT enumeration under a tightening bound assumption. Each theory
    consistent total assignment is reduced, minimized, and its optimum
    becomes the next strict upper bound.
    """

    def __init__(self, problem: Problem, cfg: OmtConfig | None = None):
        self.problem = problem
        self.cfg = cfg or OmtConfig()
        self.atoms = problem.atoms
        self.objective = problem.objective
        self.sat = SatSolver.from_cnf(problem.cnf, seed=self.cfg.seed)
        self.index = self.sat.clause_index
        self.formula_atoms = problem.cnf.atom_ids()
        self.mixed = bool(problem.integer_vars)
        self.theory = LraSolver(self.atoms, problem.num_vars)
        self.monitor = PerformanceMonitor()
        self.trace = OmtTrace()

        self.best_value: DeltaRational | None = None
        self.best_model: ArithModel | None = None
        self.bound: Literal | None = None
        self._start = 0.0

    # --- building blocks ------------------------------------------------

    def objective_bound_atom(self, ub: DeltaRational) -> Literal:
        """Assumption literal ``cost < ub`` with the objective substituted inline."""
        return objective_bound_literal(self.atoms, self.objective, ub)

    def learn_block_lemma(self, limiting: Sequence[Literal], bound: Literal | Atom, truncated: bool = False):
        """Add ``~(cost < ub) | ~l1 | ... | ~ln``; refused for models of a truncated minimization."""
        if truncated:
            raise SoundnessError("blocking lemma from a truncated minimization is unsound")
        if isinstance(bound, Atom):
            bound = Literal(bound.id)
        clause = [~bound] + [~lit for lit in limiting if lit != bound]
        self.sat.add_clause(clause, learnt=True)
        self.trace.lemmas += 1
        log.debug("Blocking lemma over %d literals", len(clause) - 1)

    def _minimizer(self) -> RelaxationMinimizer:
        cls = ConflictMinimizer if self.cfg.proposal == "conflict" else RelaxationMinimizer
        return cls(self.atoms, self.problem.var_types, self.objective)

    def _theory_check(self, eta: TruthAssignment) -> list[Literal] | None:
        """Conflict core if the theory literals of ``eta`` are inconsistent."""
        literals = [lit for lit in eta.literals() if self.atoms.is_theory(lit.atom_id)]
        self.theory.push()
        try:
            result = self.theory.assert_all(literals)
            if result.sat:
                result = self.theory.check()
        finally:
            self.theory.pop()
        return None if result.sat else result.core

    def _learn_conflict(self, core: Sequence[Literal]):
        self.sat.add_clause([~lit for lit in core], learnt=True)
        self.trace.theory_conflicts += 1

    def _reduce(self, eta: TruthAssignment) -> ReductionReport:
        return reduce_assignment(
            self.cfg.strategy,
            self.problem.cnf,
            eta,
            minimizer=self._minimizer(),
            index=self.index,
            theory_only=self.cfg.basic_theory_only,
        )

    def _minimize(self, mu: TruthAssignment) -> OptResult:
        literals = theory_literals(self.problem.cnf, mu)
        if self.bound is not None:
            literals.append(self.bound)
        if self.mixed:
            return minimize_mixed(
                self.atoms, literals, self.objective, self.problem.var_types, self.cfg.lia_mode
            )
        return minimize_literals(self.atoms, self.problem.num_vars, literals, self.objective)

    def _elapsed(self) -> float:
        return time.perf_counter() - self._start

    def _out_of_budget(self) -> bool:
        if self._elapsed() > self.cfg.time_budget:
            return True
        cap = self.cfg.max_iterations
        return cap is not None and self.trace.iterations >= cap

    def _finish(self, status: OmtStatus) -> OmtOutcome:
        self.trace.stages = self.monitor.get_summary()
        if status is OmtStatus.BUDGET_EXHAUSTED:
            log.info("Budget exhausted after %d iterations", self.trace.iterations)
        return OmtOutcome(status, self.trace, self.best_value, self.best_model)

    # --- main loop ------------------------------------------------------

    def run(self) -> OmtOutcome:
        self._start = time.perf_counter()
        forced = list(self.cfg.first_assignment or [])

        while True:
            if self._out_of_budget():
                return self._finish(OmtStatus.BUDGET_EXHAUSTED)

            assumptions = ([self.bound] if self.bound is not None else []) + forced
            with self.monitor.measure("sat"):
                answer = self.sat.solve_with_assumptions(assumptions)
            self.trace.sat_calls += 1
            if not answer.is_sat:
                if forced:
                    forced = []
                    continue
                break
            forced = []

            eta_full = answer.assignment
            core = self._theory_check(eta_full)
            if core is not None:
                self._learn_conflict(core)
                continue
            if self._elapsed() > self.cfg.time_budget:
                return self._finish(OmtStatus.BUDGET_EXHAUSTED)

            eta = eta_full.restrict(self.formula_atoms)
            with self.monitor.measure("reduce"):
                report = self._reduce(eta)
            with self.monitor.measure("minimize"):
                opt = self._minimize(report.reduced)

            if opt.status is OptStatus.UNBOUNDED:
                log.info("Objective unbounded below")
                self.best_value, self.best_model = None, None
                return self._finish(OmtStatus.UNBOUNDED)
            if opt.status is OptStatus.INFEASIBLE:
                core = opt.core or theory_literals(self.problem.cnf, report.reduced)
                if not opt.core and self.bound is not None:
                    core.append(self.bound)
                self._learn_conflict(core)
                continue
            if opt.value is None:
                return self._finish(OmtStatus.BUDGET_EXHAUSTED)

            self._improve(opt, eta_full, eta, report)

        status = OmtStatus.UNSAT if self.best_value is None else OmtStatus.OPTIMUM
        log.info("Search finished: %s after %d iterations", status.value, self.trace.iterations)
        return self._finish(status)

    def _improve(self, opt: OptResult, eta_full: TruthAssignment, eta: TruthAssignment,
                 report: ReductionReport):
        model = opt.model
        model.booleans = {
            a: v for a, v in eta_full.values.items() if not self.atoms.is_theory(a)
        }
        self.best_value, self.best_model = opt.value, model
        self.bound = self.objective_bound_atom(opt.value)

        self.trace.records.append(
            IterationRecord(
                index=self.trace.iterations + 1,
                ub=opt.value,
                dropped=list(report.dropped),
                minimize_calls=report.minimize_calls + 1,
                eta_size=len(eta),
                mu_size=len(report.reduced),
                values=list(report.values),
                time_s=self._elapsed(),
            )
        )
        log.info("Iteration %d: ub = %s (dropped %d)", self.trace.iterations, opt.value, len(report.dropped))

        if not self.cfg.learn_block_lemma:
            return
        truncated = opt.possibly_suboptimal or (
            self.mixed and self.cfg.lia_mode.mode is BnbMode.TRUNCATED
        )
        if truncated:
            return
        certificate = opt.certificate if self.mixed else opt.limiting
        if not certificate and not self.objective.is_constant:
            log.warning("Bounded optimum without limiting literals; lemma skipped")
            return
        self.learn_block_lemma(certificate, self.bound)


def solve(problem: Problem, cfg: OmtConfig | None = None) -> OmtOutcome:
    return OmtSearch(problem, cfg).run()
