"""
Logical vocabulary: linear terms, interned atoms, literals, clauses,
truth assignments and arithmetic models
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import TheoryError, UnassignedVariableError
from .numbers import DeltaRational, Number, format_rational, to_rational


class Relation(str, Enum):
    LE = "<="
    LT = "<"
    EQ = "="


class Sort(str, Enum):
    REAL = "Real"
    INT = "Int"
    BOOL = "Bool"


class AtomKind(str, Enum):
    BOOLEAN = "boolean"
    LINEAR = "linear"


@dataclass(frozen=True, slots=True)
class LinearTerm:
    """Sum of rational coefficients times variable ids, plus a constant."""

    coeffs: tuple[tuple[int, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, Number], constant: Number = 0) -> LinearTerm:
        items = tuple(
            sorted((v, to_rational(c)) for v, c in coeffs.items() if c != 0)
        )
        return cls(items, to_rational(constant))

    @classmethod
    def var(cls, v: int, coeff: Number = 1) -> LinearTerm:
        return cls.from_dict({v: coeff})

    @classmethod
    def const(cls, c: Number) -> LinearTerm:
        return cls((), to_rational(c))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, v: int) -> Fraction:
        for w, c in self.coeffs:
            if w == v:
                return c
        return Fraction(0)

    def without_constant(self) -> LinearTerm:
        return LinearTerm(self.coeffs, Fraction(0))

    def __add__(self, other: LinearTerm) -> LinearTerm:
        merged = self.as_dict()
        for v, c in other.coeffs:
            merged[v] = merged.get(v, Fraction(0)) + c
        return LinearTerm.from_dict(merged, self.constant + other.constant)

    def __neg__(self) -> LinearTerm:
        return self.scale(-1)

    def __sub__(self, other: LinearTerm) -> LinearTerm:
        return self + (-other)

    def scale(self, k: Number) -> LinearTerm:
        k = to_rational(k)
        if k == 0:
            return LinearTerm()
        return LinearTerm(tuple((v, c * k) for v, c in self.coeffs), self.constant * k)

    def evaluate(self, values: Mapping[int, Fraction | DeltaRational], names: Sequence[str] | None = None):
        """Exact value under ``values``; DeltaRational in, DeltaRational out."""
        total = self.constant
        for v, c in self.coeffs:
            if v not in values:
                raise UnassignedVariableError(v, names[v] if names and v < len(names) else None)
            total = values[v] * c + total
        return total

    def render(self, names: Sequence[str] | None = None) -> str:
        def name(v: int) -> str:
            return names[v] if names else f"v{v}"

        parts = []
        for v, c in self.coeffs:
            if c == 1:
                parts.append(name(v))
            elif c == -1:
                parts.append(f"-{name(v)}")
            else:
                parts.append(f"{format_rational(c)}{name(v)}")
        if self.constant != 0 or not parts:
            parts.append(format_rational(self.constant))
        return " + ".join(parts).replace("+ -", "- ")


def normalize_constraint(term: LinearTerm, rel: Relation | str) -> tuple[LinearTerm, Relation]:
    """
    Canonical form of ``term rel 0``.

    ``>=`` and ``>`` are rewritten by negating the term; the variable
    coefficients are scaled by a positive factor to coprime integers
    (``=`` additionally gets a positive leading coefficient). Constant
    constraints collapse to ``0 <= 0`` (true) or ``0 < 0`` (false).
    """
    rel = rel.value if isinstance(rel, Relation) else rel
    if rel == ">=":
        term, rel = -term, "<="
    elif rel == ">":
        term, rel = -term, "<"
    relation = Relation(rel)

    if term.is_constant:
        holds = _compare(term.constant, relation)
        return LinearTerm(), Relation.LE if holds else Relation.LT

    denominators = math.lcm(*(c.denominator for _, c in term.coeffs))
    numerators = math.gcd(*((c * denominators).numerator for _, c in term.coeffs))
    factor = Fraction(denominators, numerators)
    if relation is Relation.EQ and term.coeffs[0][1] < 0:
        factor = -factor
    return term.scale(factor), relation


def _compare(value: Fraction | DeltaRational, rel: Relation) -> bool:
    if rel is Relation.LE:
        return value <= 0
    if rel is Relation.LT:
        return value < 0
    return value == 0


@dataclass(frozen=True, slots=True)
class Atom:
    id: int
    kind: AtomKind
    term: LinearTerm | None = None
    rel: Relation | None = None
    name: str | None = None

    @property
    def is_theory(self) -> bool:
        return self.kind is AtomKind.LINEAR

    def holds(self, values: Mapping[int, Fraction | DeltaRational]) -> bool:
        if not self.is_theory:
            raise TheoryError(f"Boolean atom {self.name} has no arithmetic value")
        return _compare(self.term.evaluate(values), self.rel)

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.is_theory:
            return self.name
        lhs = self.term.without_constant().render(names)
        rhs = format_rational(-self.term.constant)
        return f"({lhs} {self.rel.value} {rhs})"


@dataclass(frozen=True, slots=True, order=True)
class Literal:
    atom_id: int
    polarity: bool = True

    def __invert__(self) -> Literal:
        return Literal(self.atom_id, not self.polarity)

    complement = __invert__

    def __str__(self) -> str:
        return f"{'' if self.polarity else '~'}{self.atom_id}"


Clause = tuple[Literal, ...]


class AtomTable:
    """
    Interning table: identical normalized atoms share one id.

    The table is append-only; solvers add bound atoms during search.
    """

    def __init__(self):
        self._atoms: list[Atom] = []
        self._linear: dict[tuple, int] = {}
        self._boolean: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._atoms)

    def __getitem__(self, atom_id: int) -> Atom:
        return self._atoms[atom_id]

    def linear(self, term: LinearTerm, rel: Relation | str) -> Atom:
        term, relation = normalize_constraint(term, rel)
        key = (relation, term.coeffs, term.constant)
        if key not in self._linear:
            atom = Atom(len(self._atoms), AtomKind.LINEAR, term, relation)
            self._atoms.append(atom)
            self._linear[key] = atom.id
        return self._atoms[self._linear[key]]

    def normalize_atom(self, lhs: LinearTerm, rel: str, rhs: LinearTerm | None = None) -> Atom:
        """Intern ``lhs rel rhs`` for rel in <=, <, >=, >, =."""
        return self.linear(lhs - (rhs or LinearTerm()), rel)

    def boolean(self, name: str) -> Atom:
        if name not in self._boolean:
            atom = Atom(len(self._atoms), AtomKind.BOOLEAN, name=name)
            self._atoms.append(atom)
            self._boolean[name] = atom.id
        return self._atoms[self._boolean[name]]

    def has_boolean(self, name: str) -> bool:
        return name in self._boolean

    def is_theory(self, atom_id: int) -> bool:
        return self._atoms[atom_id].is_theory

    def render_literal(self, lit: Literal, names: Sequence[str] | None = None) -> str:
        text = self._atoms[lit.atom_id].render(names)
        return text if lit.polarity else f"~{text}"


@dataclass
class CnfFormula:
    clauses: list[Clause] = field(default_factory=list)
    atoms: AtomTable = field(default_factory=AtomTable)

    def add_clause(self, literals: Iterable[Literal]) -> bool:
        """Append a clause, dropping duplicates; tautologies are discarded (returns False)."""
        seen: list[Literal] = []
        for lit in literals:
            if ~lit in seen:
                return False
            if lit not in seen:
                seen.append(lit)
        self.clauses.append(tuple(seen))
        return True

    @property
    def is_unsat(self) -> bool:
        return any(not clause for clause in self.clauses)

    def theory_flags(self) -> dict[int, bool]:
        return {atom.id: atom.is_theory for atom in self.atoms}

    def appearance_order(self) -> list[int]:
        """Atom ids by first occurrence in the clause list."""
        order: dict[int, None] = {}
        for clause in self.clauses:
            for lit in clause:
                order.setdefault(lit.atom_id, None)
        return list(order)

    def atom_ids(self) -> set[int]:
        return {lit.atom_id for clause in self.clauses for lit in clause}


@dataclass
class TruthAssignment:
    """Partial map atom id -> bool; the set view is its literals."""

    values: dict[int, bool] = field(default_factory=dict)

    @classmethod
    def from_literals(cls, literals: Iterable[Literal]) -> TruthAssignment:
        return cls({lit.atom_id: lit.polarity for lit in literals})

    def literals(self) -> list[Literal]:
        return [Literal(a, v) for a, v in sorted(self.values.items())]

    def __contains__(self, lit: Literal) -> bool:
        return self.values.get(lit.atom_id) is lit.polarity

    def __len__(self) -> int:
        return len(self.values)

    def without(self, lit: Literal) -> TruthAssignment:
        values = dict(self.values)
        if values.get(lit.atom_id) is lit.polarity:
            del values[lit.atom_id]
        return TruthAssignment(values)

    def issubset(self, other: TruthAssignment) -> bool:
        return all(other.values.get(a) is v for a, v in self.values.items())

    def is_total(self, atom_ids: Iterable[int]) -> bool:
        return all(a in self.values for a in atom_ids)

    def restrict(self, atom_ids: Iterable[int]) -> TruthAssignment:
        keep = set(atom_ids)
        return TruthAssignment({a: v for a, v in self.values.items() if a in keep})


@dataclass
class ArithModel:
    values: dict[int, Fraction] = field(default_factory=dict)
    booleans: dict[int, bool] = field(default_factory=dict)

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def evaluate(self, term: LinearTerm) -> Fraction:
        return term.evaluate(self.values)


def eval_literal(lit: Literal, model: ArithModel, atoms: AtomTable) -> bool:
    atom = atoms[lit.atom_id]
    if atom.is_theory:
        return atom.holds(model.values) is lit.polarity
    if lit.atom_id not in model.booleans:
        raise TheoryError(f"Boolean atom {atom.name} is not assigned by the model")
    return model.booleans[lit.atom_id] is lit.polarity


def literal_holds(lit: Literal, atoms: AtomTable, values: Mapping[int, Fraction | DeltaRational]) -> bool:
    """Truth of a theory literal under exact or delta values; ~(t<=0) means t>0."""
    return atoms[lit.atom_id].holds(values) is lit.polarity


def concretize(
    delta_model: Mapping[int, DeltaRational],
    literals: Iterable[Literal],
    atoms: AtomTable,
) -> ArithModel:
    """
    Replace δ by a small enough positive rational so that every literal
    satisfied in delta arithmetic stays satisfied over the rationals.
    """
    epsilon = Fraction(1)
    for lit in literals:
        atom = atoms[lit.atom_id]
        if not atom.is_theory:
            continue
        value = atom.term.evaluate(delta_model)
        if not isinstance(value, DeltaRational):
            continue
        # positive literal keeps value below zero, negated keeps it above
        if not lit.polarity:
            value = -value
        if value.delta > 0 and value.real < 0:
            epsilon = min(epsilon, -value.real / value.delta / 2)
    return ArithModel({v: d.substitute(epsilon) for v, d in delta_model.items()})
