"""
CDCL SAT solver over the propositional skeleton
"""
from __future__ import annotations

import heapq
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from partial_omt.core.terms import AtomTable, Clause, CnfFormula, Literal, TruthAssignment

log = logging.getLogger(__name__)


def encode(lit: Literal) -> int:
    return 2 * lit.atom_id + (0 if lit.polarity else 1)


def decode(code: int) -> Literal:
    return Literal(code >> 1, not (code & 1))


def luby(y: float, x: int) -> float:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y**seq


class SatStatus(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass
class SatResult:
    status: SatStatus
    assignment: TruthAssignment | None = None
    core: list[Literal] = field(default_factory=list)

    @property
    def is_sat(self) -> bool:
        return self.status is SatStatus.SAT


class ClauseIndex:
    """Per-literal occurrence lists over a fixed clause list."""

    def __init__(self, clauses: Sequence[Clause]):
        self.clauses = list(clauses)
        self.occurrences: dict[Literal, list[int]] = {}
        for ci, clause in enumerate(self.clauses):
            for lit in clause:
                self.occurrences.setdefault(lit, []).append(ci)

    def counter(self, mu: TruthAssignment) -> SatisfactionCounter:
        return SatisfactionCounter(self, mu)

    def satisfies_all(self, mu: TruthAssignment) -> bool:
        return all(any(lit in mu for lit in clause) for clause in self.clauses)


class SatisfactionCounter:
    """
    Number of true literals per clause under a shrinking assignment.

    ``can_drop`` and ``drop`` cost O(occurrences of the literal).
    """

    def __init__(self, index: ClauseIndex, mu: TruthAssignment):
        self.index = index
        self.assignment = TruthAssignment(dict(mu.values))
        self.true_count = [sum(lit in mu for lit in clause) for clause in index.clauses]

    @property
    def satisfied(self) -> bool:
        return all(n > 0 for n in self.true_count)

    def can_drop(self, lit: Literal) -> bool:
        if lit not in self.assignment:
            return False
        return all(self.true_count[ci] > 1 for ci in self.index.occurrences.get(lit, ()))

    def drop(self, lit: Literal):
        if lit not in self.assignment:
            return
        for ci in self.index.occurrences.get(lit, ()):
            self.true_count[ci] -= 1
        del self.assignment.values[lit.atom_id]


class SatSolver:
    """
    Incremental CDCL with watched literals, VSIDS, phase saving and Luby
    restarts. Assumptions occupy the first decision levels so that a
    failed assumption yields a core over the assumptions.
    """

    def __init__(
        self,
        atoms: AtomTable,
        seed: int = 0,
        restart_base: int = 100,
        var_decay: float = 0.95,
    ):
        self.atoms = atoms
        self.restart_base = restart_base
        self.var_decay = var_decay
        self._random = random.Random(seed)

        self._clauses: list[list[int]] = []
        self._learnt: list[bool] = []
        self._watches: list[list[int]] = []
        self._original: list[Clause] = []
        self._index: ClauseIndex | None = None

        self._assigns: list[bool | None] = []
        self._level: list[int] = []
        self._reason: list[int | None] = []
        self._active: list[bool] = []
        self._polarity: list[bool] = []
        self._activity: list[float] = []
        self._rank: list[float] = []
        self._seen: list[bool] = []
        self._heap: list[tuple[float, float, int]] = []
        self._var_inc = 1.0

        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._ok = True

        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}

    @classmethod
    def from_cnf(cls, cnf: CnfFormula, seed: int = 0) -> SatSolver:
        solver = cls(cnf.atoms, seed=seed)
        for clause in cnf.clauses:
            solver.add_clause(clause)
        return solver

    # --- variables ------------------------------------------------------

    def _ensure_vars(self, n: int):
        while len(self._assigns) < n:
            self._assigns.append(None)
            self._level.append(0)
            self._reason.append(None)
            self._active.append(False)
            self._polarity.append(False)
            self._activity.append(0.0)
            self._rank.append(self._random.random())
            self._seen.append(False)
            self._watches.append([])
            self._watches.append([])

    def _activate(self, v: int):
        if not self._active[v]:
            self._active[v] = True
            heapq.heappush(self._heap, (-self._activity[v], self._rank[v], v))

    def _value(self, code: int) -> bool | None:
        a = self._assigns[code >> 1]
        if a is None:
            return None
        return a if not code & 1 else not a

    @property
    def decision_level(self) -> int:
        return len(self._trail_lim)

    # --- clauses --------------------------------------------------------

    def add_clause(self, clause: Iterable[Literal], learnt: bool = False) -> bool:
        """
        Add a clause permanently. Original clauses (``learnt=False``) are
        the ones ``satisfies_all_clauses`` checks. Returns False once the
        database is unsatisfiable.
        """
        clause = tuple(clause)
        self._ensure_vars(len(self.atoms))
        if not learnt:
            self._original.append(clause)
            self._index = None
        if not self._ok:
            return False
        if self.decision_level > 0:
            self._cancel_until(0)

        for lit in clause:
            self._activate(lit.atom_id)
        codes: list[int] = []
        for lit in clause:
            code = encode(lit)
            if code ^ 1 in codes:
                return True
            if self._value(code) is True:
                return True
            if self._value(code) is None and code not in codes:
                codes.append(code)

        if not codes:
            self._ok = False
            return False
        if len(codes) == 1:
            self._enqueue(codes[0], None)
            self._ok = self._propagate() is None
            return self._ok
        self._attach(codes, learnt)
        return True

    def _attach(self, codes: list[int], learnt: bool) -> int:
        ci = len(self._clauses)
        self._clauses.append(codes)
        self._learnt.append(learnt)
        self._watches[codes[0]].append(ci)
        self._watches[codes[1]].append(ci)
        return ci

    @property
    def original_clauses(self) -> list[Clause]:
        return list(self._original)

    @property
    def clause_index(self) -> ClauseIndex:
        if self._index is None:
            self._index = ClauseIndex(self._original)
        return self._index

    def satisfies_all_clauses(self, mu: TruthAssignment) -> bool:
        """True iff every original clause has a literal made true by ``mu``."""
        return self.clause_index.satisfies_all(mu)

    # --- search ---------------------------------------------------------

    def _enqueue(self, code: int, reason: int | None):
        v = code >> 1
        self._assigns[v] = not code & 1
        self._level[v] = self.decision_level
        self._reason[v] = reason
        self._trail.append(code)

    def _propagate(self) -> int | None:
        while self._qhead < len(self._trail):
            p = self._trail[self._qhead]
            self._qhead += 1
            self.stats["propagations"] += 1
            false_lit = p ^ 1
            watchers = self._watches[false_lit]
            self._watches[false_lit] = kept = []
            for i, ci in enumerate(watchers):
                c = self._clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if self._value(c[0]) is True:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    if self._value(c[k]) is not False:
                        c[1], c[k] = c[k], c[1]
                        self._watches[c[1]].append(ci)
                        break
                else:
                    kept.append(ci)
                    if self._value(c[0]) is False:
                        kept.extend(watchers[i + 1:])
                        self._qhead = len(self._trail)
                        return ci
                    self._enqueue(c[0], ci)
        return None

    def _bump(self, v: int):
        self._activity[v] += self._var_inc
        if self._activity[v] > 1e100:
            self._activity = [a * 1e-100 for a in self._activity]
            self._var_inc *= 1e-100
            self._heap = [(-self._activity[w], self._rank[w], w)
                          for w in range(len(self._assigns)) if self._active[w]]
            heapq.heapify(self._heap)
        elif self._assigns[v] is None:
            heapq.heappush(self._heap, (-self._activity[v], self._rank[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        """First-UIP learning: returns the learnt clause (asserting literal first) and backjump level."""
        seen = self._seen
        learnt: list[int] = [0]
        counter = 0
        p: int | None = None
        index = len(self._trail) - 1
        ci: int | None = confl

        while True:
            c = self._clauses[ci]
            for q in c if p is None else c[1:]:
                v = q >> 1
                if not seen[v] and self._level[v] > 0:
                    self._bump(v)
                    seen[v] = True
                    if self._level[v] >= self.decision_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self._trail[index] >> 1]:
                index -= 1
            p = self._trail[index]
            index -= 1
            ci = self._reason[p >> 1]
            seen[p >> 1] = False
            counter -= 1
            if counter == 0:
                break
        learnt[0] = p ^ 1

        for q in learnt[1:]:
            seen[q >> 1] = False
        if len(learnt) == 1:
            return learnt, 0
        top = max(range(1, len(learnt)), key=lambda j: self._level[learnt[j] >> 1])
        learnt[1], learnt[top] = learnt[top], learnt[1]
        return learnt, self._level[learnt[1] >> 1]

    def _analyze_final(self, failed: int) -> list[int]:
        """Assumption literals (as asserted) that imply the negation of ``failed``."""
        core = [failed]
        if self.decision_level == 0:
            return core
        seen = self._seen
        seen[failed >> 1] = True
        for i in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            code = self._trail[i]
            x = code >> 1
            if seen[x]:
                reason = self._reason[x]
                if reason is None:
                    if code != failed:
                        core.append(code)
                else:
                    for q in self._clauses[reason][1:]:
                        if self._level[q >> 1] > 0:
                            seen[q >> 1] = True
                seen[x] = False
        seen[failed >> 1] = False
        return core

    def _cancel_until(self, level: int):
        if self.decision_level <= level:
            return
        for i in range(len(self._trail) - 1, self._trail_lim[level] - 1, -1):
            v = self._trail[i] >> 1
            self._polarity[v] = self._assigns[v]
            self._assigns[v] = None
            self._reason[v] = None
            heapq.heappush(self._heap, (-self._activity[v], self._rank[v], v))
        del self._trail[self._trail_lim[level]:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    def _pick_branch(self) -> int | None:
        while self._heap:
            neg_act, _, v = heapq.heappop(self._heap)
            if self._assigns[v] is None and self._active[v] and -neg_act == self._activity[v]:
                self.stats["decisions"] += 1
                return 2 * v + (0 if self._polarity[v] else 1)
        return None

    def _search(self, assumptions: list[int], conflict_limit: float) -> SatResult | None:
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts += 1
                if self.decision_level == 0:
                    self._ok = False
                    return SatResult(SatStatus.UNSAT)
                learnt, level = self._analyze(confl)
                self._cancel_until(level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._enqueue(learnt[0], self._attach(learnt, learnt=True))
                self._var_inc /= self.var_decay
                continue

            if conflicts >= conflict_limit:
                self._cancel_until(0)
                return None

            decision: int | None = None
            while self.decision_level < len(assumptions):
                p = assumptions[self.decision_level]
                value = self._value(p)
                if value is True:
                    self._trail_lim.append(len(self._trail))
                elif value is False:
                    core = [decode(c) for c in self._analyze_final(p)]
                    return SatResult(SatStatus.UNSAT, core=core)
                else:
                    decision = p
                    break
            if decision is None:
                decision = self._pick_branch()
                if decision is None:
                    return SatResult(SatStatus.SAT, assignment=self._extract(assumptions))
            self._trail_lim.append(len(self._trail))
            self._enqueue(decision, None)

    def _extract(self, assumptions: list[int]) -> TruthAssignment:
        values = {
            v: a for v, a in enumerate(self._assigns) if a is not None and self._active[v]
        }
        for code in assumptions:
            values[code >> 1] = self._assigns[code >> 1]
        return TruthAssignment(values)

    def solve_with_assumptions(self, assumptions: Sequence[Literal] = ()) -> SatResult:
        """SAT with a total assignment over the clause atoms, or UNSAT with a core of assumptions."""
        self.stats["solves"] += 1
        self._ensure_vars(len(self.atoms))
        if not self._ok:
            return SatResult(SatStatus.UNSAT)
        codes = [encode(lit) for lit in assumptions]
        self._cancel_until(0)

        restarts = 0
        while True:
            limit = luby(2, restarts) * self.restart_base
            result = self._search(codes, limit)
            if result is not None:
                break
            restarts += 1
            self.stats["restarts"] += 1
        self._cancel_until(0)
        log.debug(
            "SAT %s after %d conflicts (%d assumptions)",
            result.status.value, self.stats["conflicts"], len(codes),
        )
        return result

    # --- debugging ------------------------------------------------------

    def to_dimacs(self) -> str:
        n = max(len(self.atoms), 1)
        lines = [f"p cnf {n} {len(self._original)}"]
        for atom in self.atoms:
            label = atom.name if not atom.is_theory else atom.render()
            lines.append(f"c {atom.id + 1} {label}")
        for clause in self._original:
            body = " ".join(str(lit.atom_id + 1 if lit.polarity else -(lit.atom_id + 1)) for lit in clause)
            lines.append(f"{body} 0".lstrip())
        return "\n".join(lines) + "\n"

    def dimacs(self, path: str | Path):
        Path(path).write_text(self.to_dimacs(), encoding="utf-8")
