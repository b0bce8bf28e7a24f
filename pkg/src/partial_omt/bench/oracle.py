"""
Brute-force reference optimizers for small instances

These share no code with the solver stack beyond the problem
representation: propositional models are enumerated from the formula,
rational minimization is Fourier-Motzkin projection onto the objective,
and integer variables are scanned over a bounding box.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from partial_omt.core.errors import OracleLimitError
from partial_omt.core.numbers import DeltaRational, to_rational
from partial_omt.core.terms import AtomTable, LinearTerm, Literal, Relation
from partial_omt.frontend.cnf import And, Const, Formula, Lit, Or, to_nnf
from partial_omt.frontend.parser import Problem

log = logging.getLogger(__name__)

Box = Mapping[int, tuple[Fraction, Fraction]]

# sum(coeffs[v] * v) + constant, compared with 0 by "<" if strict else "<="
Row = tuple[tuple[tuple[int, Fraction], ...], Fraction, bool]


class OracleStatus(str, Enum):
    OPTIMUM = "optimum"
    UNSAT = "unsat"
    UNBOUNDED = "unbounded"


@dataclass
class OracleResult:
    """``value`` has delta 1 when the infimum is not attained."""

    status: OracleStatus
    value: DeltaRational | None = None
    leaves: int = 0


def parse_box(spec: str, problem: Problem) -> dict[int, tuple[Fraction, Fraction]]:
    """``"x=0:4,y=-1:3"``; ``*`` names every variable. Later entries win."""
    box: dict[int, tuple[Fraction, Fraction]] = {}
    for part in filter(None, (p.strip() for p in spec.split(","))):
        name, sep, bounds = part.partition("=")
        lo, sep2, hi = bounds.partition(":")
        if not sep or not sep2:
            raise ValueError(f"bad box entry '{part}', expected name=lo:hi")
        lo_q, hi_q = to_rational(lo.strip()), to_rational(hi.strip())
        if lo_q > hi_q:
            raise ValueError(f"empty interval in box entry '{part}'")
        name = name.strip()
        targets = range(problem.num_vars) if name == "*" else [problem.var_id(name)]
        for v in targets:
            box[v] = (lo_q, hi_q)
    return box


def _row(term: LinearTerm, strict: bool) -> Row:
    return term.coeffs, term.constant, strict


def literal_rows(lit: Literal, atoms: AtomTable) -> list[list[Row]]:
    """Disjunction of conjunctions of rows equivalent to a theory literal."""
    atom = atoms[lit.atom_id]
    t, neg = atom.term, -atom.term
    if atom.rel is Relation.EQ:
        if lit.polarity:
            return [[_row(t, False), _row(neg, False)]]
        return [[_row(t, True)], [_row(neg, True)]]
    strict = atom.rel is Relation.LT
    if lit.polarity:
        return [[_row(t, strict)]]
    return [[_row(neg, not strict)]]


def box_rows(box: Box, variables: Sequence[int] | None = None) -> list[Row]:
    rows = []
    for v, (lo, hi) in sorted(box.items()):
        if variables is not None and v not in variables:
            continue
        rows.append((((v, Fraction(1)),), -hi, False))
        rows.append((((v, Fraction(-1)),), lo, False))
    return rows


# --- Fourier-Motzkin ----------------------------------------------------------


def _normalize(coeffs: dict[int, Fraction], constant: Fraction, strict: bool) -> Row:
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    if coeffs:
        scale = abs(next(iter(sorted(coeffs.items())))[1])
        coeffs = {v: c / scale for v, c in coeffs.items()}
        constant = constant / scale
    return tuple(sorted(coeffs.items())), constant, strict


def _eliminate(rows: list[Row], var: int) -> list[Row]:
    pos, neg, rest = [], [], []
    for row in rows:
        c = dict(row[0]).get(var, Fraction(0))
        (pos if c > 0 else neg if c < 0 else rest).append(row)
    out = set(rest)
    for p in pos:
        pc = dict(p[0])
        a = pc[var]
        for n in neg:
            nc = dict(n[0])
            b = -nc[var]
            merged = {v: pc.get(v, 0) / a + nc.get(v, 0) / b for v in set(pc) | set(nc)}
            merged.pop(var, None)
            out.add(_normalize(merged, p[1] / a + n[1] / b, p[2] or n[2]))
    return list(out)


def _feasible_constant(row: Row) -> bool:
    return row[1] < 0 or (row[1] == 0 and not row[2])


def fm_minimize(rows: Sequence[Row], objective: LinearTerm) -> OracleResult:
    """Exact infimum of ``objective`` over the rows by projecting onto it."""
    z = 1 + max([v for r in rows for v, _ in r[0]] + [v for v, _ in objective.coeffs] + [-1])
    obj = dict(objective.coeffs)
    current = [_normalize(dict(r[0]), r[1], r[2]) for r in rows]
    current.append(_normalize({**obj, z: Fraction(-1)}, objective.constant, False))
    current.append(_normalize({**{v: -c for v, c in obj.items()}, z: Fraction(1)}, -objective.constant, False))

    for var in range(z + 1):
        if var < z:
            current = _eliminate(current, var)
        if not all(_feasible_constant(r) for r in current if not r[0]):
            return OracleResult(OracleStatus.UNSAT)
        current = [r for r in current if r[0]]

    lower: tuple[Fraction, bool] | None = None
    upper: tuple[Fraction, bool] | None = None
    for coeffs, constant, strict in current:
        a = coeffs[0][1]
        bound = -constant / a
        if a < 0:
            if lower is None or bound > lower[0] or (bound == lower[0] and strict):
                lower = (bound, strict)
        elif upper is None or bound < upper[0] or (bound == upper[0] and strict):
            upper = (bound, strict)

    if lower is None:
        return OracleResult(OracleStatus.UNBOUNDED)
    if upper is not None and (lower[0] > upper[0] or (lower[0] == upper[0] and (lower[1] or upper[1]))):
        return OracleResult(OracleStatus.UNSAT)
    return OracleResult(OracleStatus.OPTIMUM, DeltaRational(lower[0], Fraction(int(lower[1]))))


# --- propositional enumeration -----------------------------------------------


def _partial_value(f: Formula, assign: Mapping[int, bool]) -> bool | None:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Lit):
        value = assign.get(f.literal.atom_id)
        return None if value is None else value is f.literal.polarity
    values = [_partial_value(a, assign) for a in f.args]
    if isinstance(f, And):
        if False in values:
            return False
        return True if all(v is True for v in values) else None
    if True in values:
        return True
    return False if all(v is False for v in values) else None


def _next_atom(f: Formula, assign: Mapping[int, bool]) -> int:
    """An unassigned atom of the first undecided subformula of ``f``."""
    while not isinstance(f, Lit):
        f = next(a for a in f.args if _partial_value(a, assign) is None)
    return f.literal.atom_id


def propositional_models(formula: Formula, limit: int) -> Iterator[dict[int, bool]]:
    """
    Partial assignments that make ``formula`` true, found by branching on
    atoms of the first undecided conjunct and stopping as soon as the value
    is decided. Every total model of the formula extends exactly one of them.
    """
    nnf = to_nnf(formula)
    assign: dict[int, bool] = {}
    count = 0

    def walk() -> Iterator[dict[int, bool]]:
        nonlocal count
        value = _partial_value(nnf, assign)
        if value is False:
            return
        if value is True:
            count += 1
            if count > limit:
                raise OracleLimitError(f"more than {limit} propositional models")
            yield dict(assign)
            return
        atom = _next_atom(nnf, assign)
        for polarity in (True, False):
            assign[atom] = polarity
            yield from walk()
            del assign[atom]

    yield from walk()


# --- optimization -------------------------------------------------------------


def _better(a: OracleResult, b: OracleResult) -> OracleResult:
    if b.status is OracleStatus.UNSAT:
        return a
    if a.status is OracleStatus.UNSAT:
        return b
    if OracleStatus.UNBOUNDED in (a.status, b.status):
        return OracleResult(OracleStatus.UNBOUNDED)
    return a if a.value <= b.value else b


def _substitute(rows: Sequence[Row], point: Mapping[int, int]) -> list[Row]:
    out = []
    for coeffs, constant, strict in rows:
        kept = []
        for v, c in coeffs:
            if v in point:
                constant += c * point[v]
            else:
                kept.append((v, c))
        out.append((tuple(kept), constant, strict))
    return out


def _grid(problem: Problem, box: Box, grid_limit: int) -> tuple[list[int], list[range]]:
    ints = sorted(problem.integer_vars)
    missing = [problem.var_names[v] for v in ints if v not in box]
    if missing:
        raise OracleLimitError(f"integer variables without a box: {', '.join(missing)}")
    ranges = [range(math.ceil(box[v][0]), math.floor(box[v][1]) + 1) for v in ints]
    size = math.prod(len(r) for r in ranges)
    if size > grid_limit:
        raise OracleLimitError(f"integer grid of {size} points exceeds {grid_limit}")
    return ints, ranges


def _minimize_conjunction(
    rows: list[Row], objective: LinearTerm, ints: list[int], ranges: list[range]
) -> OracleResult:
    if not ints:
        return fm_minimize(rows, objective)
    best = OracleResult(OracleStatus.UNSAT)
    for values in itertools.product(*ranges):
        point = dict(zip(ints, values))
        shifted = objective.constant + sum(c * point[v] for v, c in objective.coeffs if v in point)
        rest = LinearTerm(tuple((v, c) for v, c in objective.coeffs if v not in point), shifted)
        best = _better(best, fm_minimize(_substitute(rows, point), rest))
        if best.status is OracleStatus.UNBOUNDED:
            break
    return best


def _formula_of(problem: Problem) -> Formula:
    if problem.formula != Const(True) or not problem.cnf.clauses:
        return problem.formula
    return And(tuple(Or(tuple(Lit(lit) for lit in clause)) for clause in problem.cnf.clauses))


def brute_force_omt(
    problem: Problem,
    box: Box | None = None,
    max_models: int = 4096,
    grid_limit: int = 10_000,
) -> OracleResult:
    """
    Exact optimum of a small problem. ``box`` bounds variables (required
    for integer ones); it also restricts rational variables it names.
    """
    box = box or {}
    atoms = problem.atoms
    ints, ranges = _grid(problem, box, grid_limit) if problem.integer_vars else ([], [])
    base = box_rows(box)
    cache: dict[frozenset[Literal], OracleResult] = {}
    best = OracleResult(OracleStatus.UNSAT)
    leaves = 0

    for assign in propositional_models(_formula_of(problem), max_models):
        leaves += 1
        literals = frozenset(
            Literal(a, v) for a, v in assign.items() if atoms.is_theory(a)
        )
        if literals not in cache:
            result = OracleResult(OracleStatus.UNSAT)
            options = [literal_rows(lit, atoms) for lit in sorted(literals)]
            for choice in itertools.product(*options):
                rows = base + [r for conj in choice for r in conj]
                result = _better(result, _minimize_conjunction(rows, problem.objective, ints, ranges))
            cache[literals] = result
        best = _better(best, cache[literals])
        if best.status is OracleStatus.UNBOUNDED:
            break

    best.leaves = leaves
    log.debug("Oracle explored %d propositional models: %s", leaves, best.status.value)
    return best


# --- vertex enumeration -------------------------------------------------------


def _solve_square(rows: Sequence[Row], n: int) -> list[Fraction] | None:
    """Unique solution of the rows taken as equalities, or None if singular."""
    matrix = []
    for coeffs, constant, _ in rows:
        line = [Fraction(0)] * (n + 1)
        for v, c in coeffs:
            line[v] = c
        line[n] = -constant
        matrix.append(line)
    for col in range(n):
        pivot = next((r for r in range(col, n) if matrix[r][col] != 0), None)
        if pivot is None:
            return None
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        p = matrix[col][col]
        matrix[col] = [x / p for x in matrix[col]]
        for r in range(n):
            if r != col and matrix[r][col] != 0:
                f = matrix[r][col]
                matrix[r] = [x - f * y for x, y in zip(matrix[r], matrix[col])]
    return [matrix[i][n] for i in range(n)]


def lp_vertex_minimum(
    atoms: AtomTable,
    literals: Sequence[Literal],
    objective: LinearTerm,
    num_vars: int,
    box: Box,
) -> Fraction | None:
    """
    Minimum over the vertices of the polytope cut out by non-strict
    literals inside a box that bounds every variable; None if empty.
    """
    if any(v not in box for v in range(num_vars)):
        raise OracleLimitError("vertex enumeration needs every variable boxed")
    rows = list(box_rows(box))
    for lit in literals:
        options = literal_rows(lit, atoms)
        if len(options) != 1 or any(r[2] for r in options[0]):
            raise ValueError("vertex enumeration handles non-strict conjunctions only")
        rows.extend(options[0])

    best: Fraction | None = None
    for subset in itertools.combinations(rows, num_vars):
        point = _solve_square(subset, num_vars)
        if point is None:
            continue
        feasible = all(
            sum(c * point[v] for v, c in coeffs) + constant <= 0 for coeffs, constant, _ in rows
        )
        if not feasible:
            continue
        value = objective.evaluate(dict(enumerate(point)))
        if best is None or value < best:
            best = value
    return best
