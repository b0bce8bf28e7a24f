"""
Incremental exact Simplex for conjunctions of linear bounds, with minimization
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from partial_omt.core.errors import StackUnderflowError, TheoryError
from partial_omt.core.numbers import ZERO, DeltaRational
from partial_omt.core.terms import ArithModel, Atom, AtomTable, LinearTerm, Literal, Relation

log = logging.getLogger(__name__)

INFINITESIMAL = DeltaRational(Fraction(0), Fraction(1))


class OptStatus(str, Enum):
    OPTIMUM = "optimum"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    RESOURCE_OUT = "resource_out"


@dataclass
class OptResult:
    """Outcome of one minimization over the asserted conjunction."""

    status: OptStatus
    value: DeltaRational | None = None
    model: ArithModel | None = None
    limiting: list[Literal] = field(default_factory=list)
    core: list[Literal] = field(default_factory=list)
    multipliers: dict[Literal, Fraction] = field(default_factory=dict)
    possibly_suboptimal: bool = False
    certificate: list[Literal] = field(default_factory=list)
    nodes: int = 0

    @property
    def is_optimum(self) -> bool:
        return self.status is OptStatus.OPTIMUM


@dataclass
class CheckResult:
    sat: bool
    core: list[Literal] = field(default_factory=list)


@dataclass(slots=True)
class Bound:
    value: DeltaRational
    reason: Literal | None


class LraSolver:
    """
    General-form Simplex: one slack variable per distinct linear form,
    bounds on original and slack variables tagged with the literal that
    asserted them. Backtracking restores bounds only; the basis is kept.
    """

    def __init__(self, atoms: AtomTable, num_vars: int):
        self.atoms = atoms
        self.num_vars = num_vars
        self._value: list[DeltaRational] = [ZERO] * num_vars
        self._lower: list[Bound | None] = [None] * num_vars
        self._upper: list[Bound | None] = [None] * num_vars
        self._rows: dict[int, dict[int, Fraction]] = {}
        self._slacks: dict[tuple, int] = {}

        self._trail: list[tuple[int, bool, Bound | None]] = []
        self._asserted: list[Literal] = []
        self._frames: list[tuple[int, int]] = []
        self._conflict: list[Literal] | None = None
        self._conflict_frame = 0

        self._limiting: list[Literal] | None = None
        self._cursor = 0
        self.pivots = 0

    # --- variables ------------------------------------------------------

    def _new_var(self) -> int:
        self._value.append(ZERO)
        self._lower.append(None)
        self._upper.append(None)
        return len(self._value) - 1

    def _expand(self, coeffs: Iterable[tuple[int, Fraction]]) -> dict[int, Fraction]:
        """Linear form over the current nonbasic variables."""
        row: dict[int, Fraction] = {}
        for v, c in coeffs:
            if v in self._rows:
                for k, a in self._rows[v].items():
                    row[k] = row.get(k, Fraction(0)) + c * a
            else:
                row[v] = row.get(v, Fraction(0)) + c
        return {k: a for k, a in row.items() if a != 0}

    def _evaluate(self, row: dict[int, Fraction]) -> DeltaRational:
        total = ZERO
        for k, a in row.items():
            total = total + self._value[k] * a
        return total

    def _slack_for(self, term: LinearTerm) -> tuple[int, Fraction]:
        """Variable s and sign such that term - constant == sign * s."""
        coeffs = term.coeffs
        sign = Fraction(1)
        if coeffs[0][1] < 0:
            sign = Fraction(-1)
            coeffs = tuple((v, -c) for v, c in coeffs)
        if len(coeffs) == 1 and coeffs[0][1] == 1:
            return coeffs[0][0], sign
        if coeffs not in self._slacks:
            s = self._new_var()
            row = self._expand(coeffs)
            self._rows[s] = row
            self._value[s] = self._evaluate(row)
            self._slacks[coeffs] = s
        return self._slacks[coeffs], sign

    # --- assertions -----------------------------------------------------

    def push(self):
        self._frames.append((len(self._trail), len(self._asserted)))

    def pop(self, n: int = 1):
        if n > len(self._frames):
            raise StackUnderflowError(f"pop({n}) with push depth {len(self._frames)}")
        for _ in range(n):
            trail_size, asserted_size = self._frames.pop()
            while len(self._trail) > trail_size:
                var, is_upper, old = self._trail.pop()
                (self._upper if is_upper else self._lower)[var] = old
            del self._asserted[asserted_size:]
        if self._conflict is not None and self._conflict_frame > len(self._frames):
            self._conflict = None
        self._limiting = None

    @property
    def depth(self) -> int:
        return len(self._frames)

    @property
    def asserted(self) -> list[Literal]:
        return list(self._asserted)

    def _fail(self, core: list[Literal]) -> CheckResult:
        if self._conflict is None:
            self._conflict = core
            self._conflict_frame = len(self._frames)
        return CheckResult(False, list(self._conflict))

    def assert_upper(self, var: int, value: DeltaRational, reason: Literal | None) -> CheckResult:
        upper, lower = self._upper[var], self._lower[var]
        if upper is not None and upper.value <= value:
            return CheckResult(True)
        if lower is not None and value < lower.value:
            return self._fail(_reasons(reason, lower.reason))
        self._trail.append((var, True, upper))
        self._upper[var] = Bound(value, reason)
        if var not in self._rows and self._value[var] > value:
            self._update(var, value)
        return CheckResult(True)

    def assert_lower(self, var: int, value: DeltaRational, reason: Literal | None) -> CheckResult:
        upper, lower = self._upper[var], self._lower[var]
        if lower is not None and lower.value >= value:
            return CheckResult(True)
        if upper is not None and value > upper.value:
            return self._fail(_reasons(reason, upper.reason))
        self._trail.append((var, False, lower))
        self._lower[var] = Bound(value, reason)
        if var not in self._rows and self._value[var] < value:
            self._update(var, value)
        return CheckResult(True)

    def assert_literal(self, lit: Literal) -> CheckResult:
        """Add the bound expressed by a theory literal; crossing bounds report the pair of reasons."""
        atom = self.atoms[lit.atom_id]
        if not atom.is_theory:
            raise TheoryError(f"literal over Boolean atom {atom.name} given to the arithmetic solver")
        if self._conflict is not None:
            return CheckResult(False, list(self._conflict))
        self._asserted.append(lit)
        self._limiting = None
        return self._assert_atom(atom, lit.polarity, lit)

    def _assert_atom(self, atom: Atom, polarity: bool, reason: Literal | None) -> CheckResult:
        term, rel = atom.term, atom.rel
        if term.is_constant:
            holds = atom.holds({})
            return CheckResult(True) if holds is polarity else self._fail(_reasons(reason))
        if rel is Relation.EQ and not polarity:
            raise TheoryError("negated equality must be split into strict bounds before assertion")

        var, sign = self._slack_for(term)
        # term <= 0  <=>  sign * s <= -constant
        bound = DeltaRational(-term.constant * sign)
        if rel is Relation.EQ:
            result = self.assert_upper(var, bound, reason)
            return self.assert_lower(var, bound, reason) if result.sat else result

        strict = rel is Relation.LT
        if not polarity:
            strict = not strict
        upper_side = (sign > 0) is polarity
        if upper_side:
            value = bound - INFINITESIMAL if strict else bound
            return self.assert_upper(var, value, reason)
        value = bound + INFINITESIMAL if strict else bound
        return self.assert_lower(var, value, reason)

    def assert_all(self, literals: Iterable[Literal]) -> CheckResult:
        for lit in literals:
            result = self.assert_literal(lit)
            if not result.sat:
                return result
        return CheckResult(True)

    # --- tableau --------------------------------------------------------

    def _update(self, var: int, value: DeltaRational):
        theta = value - self._value[var]
        for b, row in self._rows.items():
            a = row.get(var)
            if a is not None:
                self._value[b] = self._value[b] + theta * a
        self._value[var] = value

    def _pivot(self, basic: int, entering: int):
        self.pivots += 1
        row = self._rows.pop(basic)
        a = row.pop(entering)
        new_row = {basic: 1 / a}
        for k, c in row.items():
            new_row[k] = -c / a
        for b, other in self._rows.items():
            f = other.pop(entering, None)
            if f is None:
                continue
            for k, c in new_row.items():
                merged = other.get(k, Fraction(0)) + f * c
                if merged == 0:
                    other.pop(k, None)
                else:
                    other[k] = merged
        self._rows[entering] = new_row

    def _pivot_and_update(self, basic: int, entering: int, value: DeltaRational):
        a = self._rows[basic][entering]
        theta = (value - self._value[basic]) / a
        self._value[basic] = value
        self._value[entering] = self._value[entering] + theta
        for b, row in self._rows.items():
            if b == basic:
                continue
            c = row.get(entering)
            if c is not None:
                self._value[b] = self._value[b] + theta * c
        self._pivot(basic, entering)

    def _below_upper(self, var: int) -> bool:
        upper = self._upper[var]
        return upper is None or self._value[var] < upper.value

    def _above_lower(self, var: int) -> bool:
        lower = self._lower[var]
        return lower is None or self._value[var] > lower.value

    def check(self) -> CheckResult:
        """Restore feasibility with Bland's rule, or explain infeasibility by a row."""
        if self._conflict is not None:
            return CheckResult(False, list(self._conflict))
        while True:
            violated = None
            for b in sorted(self._rows):
                lower, upper = self._lower[b], self._upper[b]
                if lower is not None and self._value[b] < lower.value:
                    violated = (b, True)
                    break
                if upper is not None and self._value[b] > upper.value:
                    violated = (b, False)
                    break
            if violated is None:
                return CheckResult(True)

            b, increase = violated
            row = self._rows[b]
            entering = None
            for k in sorted(row):
                a = row[k]
                if (a > 0) is increase:
                    movable = self._below_upper(k)
                else:
                    movable = self._above_lower(k)
                if movable:
                    entering = k
                    break

            if entering is None:
                bound = self._lower[b] if increase else self._upper[b]
                reasons = [bound.reason]
                for k, a in row.items():
                    side = self._upper[k] if (a > 0) is increase else self._lower[k]
                    reasons.append(side.reason)
                return self._fail(_reasons(*reasons))

            target = self._lower[b].value if increase else self._upper[b].value
            self._pivot_and_update(b, entering, target)

    # --- optimization ---------------------------------------------------

    def _reduced_costs(self, objective: LinearTerm) -> dict[int, Fraction]:
        return self._expand(objective.coeffs)

    def minimize(self, objective: LinearTerm) -> OptResult:
        """
        Primal Simplex from the feasible point found by ``check``: steepest
        reduced cost first, Bland's rule once the pivot count exceeds twice
        the number of bounded variables.
        """
        self._limiting = None
        result = self.check()
        if not result.sat:
            self._limiting = []
            self._cursor = 0
            return OptResult(OptStatus.INFEASIBLE, core=result.core)

        bounded = sum(1 for lo, up in zip(self._lower, self._upper) if lo or up)
        threshold = 2 * max(bounded, 1)
        steps = 0
        while True:
            d = self._reduced_costs(objective)
            candidates = [
                k for k, c in d.items()
                if (c > 0 and self._above_lower(k)) or (c < 0 and self._below_upper(k))
            ]
            if not candidates:
                break
            if steps < threshold:
                entering = min(candidates, key=lambda k: (-abs(d[k]), k))
            else:
                entering = min(candidates)
            steps += 1
            direction = -1 if d[entering] > 0 else 1

            best: tuple[DeltaRational, int, int | None] | None = None
            own = self._upper[entering] if direction > 0 else self._lower[entering]
            if own is not None:
                theta = (own.value - self._value[entering]) * direction
                best = (theta, entering, None)
            for b in sorted(self._rows):
                a = self._rows[b].get(entering)
                if a is None:
                    continue
                rate = a * direction
                if rate > 0 and self._upper[b] is not None:
                    theta = (self._upper[b].value - self._value[b]) / rate
                elif rate < 0 and self._lower[b] is not None:
                    theta = (self._value[b] - self._lower[b].value) / -rate
                else:
                    continue
                if best is None or theta < best[0]:
                    best = (theta, b, b)

            if best is None:
                self._limiting = []
                self._cursor = 0
                log.debug("Objective unbounded along %d", entering)
                return OptResult(OptStatus.UNBOUNDED)

            theta, _, leaving = best
            if leaving is None:
                self._update(entering, self._value[entering] + theta * direction)
            else:
                a = self._rows[leaving][entering]
                target = self._value[leaving] + theta * direction * a
                self._pivot_and_update(leaving, entering, target)

        return self._optimum(objective, d)

    def _optimum(self, objective: LinearTerm, d: dict[int, Fraction]) -> OptResult:
        order = {lit: i for i, lit in enumerate(self._asserted)}
        multipliers: dict[Literal, Fraction] = {}
        for k, c in d.items():
            bound = self._lower[k] if c > 0 else self._upper[k]
            if bound is not None and bound.reason is not None:
                multipliers[bound.reason] = multipliers.get(bound.reason, Fraction(0)) + abs(c)
        limiting = sorted(multipliers, key=lambda lit: (-multipliers[lit], order.get(lit, len(order))))
        self._limiting = limiting
        self._cursor = 0

        value = objective.evaluate(self.valuation())
        value = value if isinstance(value, DeltaRational) else DeltaRational(value)
        model = self.model()
        log.debug("Optimum %s with %d limiting literals", value, len(limiting))
        return OptResult(
            OptStatus.OPTIMUM,
            value=value,
            model=model,
            limiting=limiting,
            multipliers=multipliers,
        )

    def propose_literal_to_drop(self) -> Literal | None:
        """Next limiting literal of the last optimum, by decreasing multiplier; None when exhausted."""
        if self._limiting is None:
            raise TheoryError("propose_literal_to_drop called before minimize")
        if self._cursor >= len(self._limiting):
            return None
        lit = self._limiting[self._cursor]
        self._cursor += 1
        return lit

    # --- models ---------------------------------------------------------

    def valuation(self) -> dict[int, DeltaRational]:
        """Current delta values of the original variables."""
        return {v: self._value[v] for v in range(self.num_vars)}

    def _epsilon(self) -> Fraction:
        epsilon = Fraction(1)

        def tighten(slack: DeltaRational, bound: Fraction):
            # keep slack >= 0 after substitution
            nonlocal epsilon
            if slack.delta < 0 and slack.real > 0:
                epsilon = min(epsilon, bound * slack.real / -slack.delta)

        for v, value in enumerate(self._value):
            if self._lower[v] is not None:
                tighten(value - self._lower[v].value, Fraction(1))
            if self._upper[v] is not None:
                tighten(self._upper[v].value - value, Fraction(1))
        valuation = self.valuation()
        for lit in self._asserted:
            atom = self.atoms[lit.atom_id]
            if atom.term.is_constant or atom.rel is Relation.EQ:
                continue
            value = atom.term.evaluate(valuation)
            if isinstance(value, DeltaRational):
                # half the distance so that strict literals stay strict
                tighten(-value if lit.polarity else value, Fraction(1, 2))
        return epsilon

    def model(self) -> ArithModel:
        """Rational model of the current (feasible) valuation."""
        epsilon = self._epsilon()
        return ArithModel({v: self._value[v].substitute(epsilon) for v in range(self.num_vars)})


def _reasons(*reasons: Literal | None) -> list[Literal]:
    core: list[Literal] = []
    for r in reasons:
        if r is not None and r not in core:
            core.append(r)
    return core


def minimize_literals(
    atoms: AtomTable, num_vars: int, literals: Sequence[Literal], objective: LinearTerm
) -> OptResult:
    """Fresh solver: assert ``literals`` and minimize."""
    solver = LraSolver(atoms, num_vars)
    result = solver.assert_all(literals)
    if not result.sat:
        return OptResult(OptStatus.INFEASIBLE, core=result.core)
    return solver.minimize(objective)


def objective_bound_literal(atoms: AtomTable, objective: LinearTerm, ub: DeltaRational) -> Literal:
    """
    Interned literal for ``cost < ub``. A value ``q + kδ`` with ``k > 0``
    is an infimum that no model attains, so the bound becomes ``cost <= q``.
    """
    rel = Relation.LE if ub.delta > 0 else Relation.LT
    atom = atoms.linear(objective - LinearTerm.const(ub.real), rel)
    return Literal(atom.id)
