"""
Boolean structure over interned atoms and its conversion to CNF
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

from partial_omt.core.terms import ArithModel, AtomTable, CnfFormula, Literal, eval_literal

log = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Const:
    value: bool


@dataclass(frozen=True, slots=True)
class Lit:
    literal: Literal


@dataclass(frozen=True, slots=True)
class Not:
    arg: Formula


@dataclass(frozen=True, slots=True)
class And:
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or:
    args: tuple[Formula, ...]


Formula = Union[Const, Lit, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def iff(a: Formula, b: Formula) -> Formula:
    return And((implies(a, b), implies(b, a)))


def holds(f: Formula, model: ArithModel, atoms: AtomTable) -> bool:
    """Truth of ``f`` under a model; unassigned Boolean atoms read as false."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Lit):
        lit = f.literal
        if not atoms.is_theory(lit.atom_id) and lit.atom_id not in model.booleans:
            return not lit.polarity
        return eval_literal(lit, model, atoms)
    if isinstance(f, Not):
        return not holds(f.arg, model, atoms)
    if isinstance(f, And):
        return all(holds(a, model, atoms) for a in f.args)
    return any(holds(a, model, atoms) for a in f.args)


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations down to literals, then flatten and fold constants."""
    if isinstance(f, Const):
        return Const(f.value is not negate)
    if isinstance(f, Lit):
        return Lit(~f.literal) if negate else f
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    conjunctive = isinstance(f, And) is not negate
    args = [to_nnf(a, negate) for a in f.args]
    return _simplify(And if conjunctive else Or, args)


def _simplify(kind: type, args: list[Formula]) -> Formula:
    absorbing = kind is Or
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Const):
            if a.value is absorbing:
                return a
            continue
        if isinstance(a, kind):
            flat.extend(a.args)
        elif a not in flat:
            flat.append(a)
    if not flat:
        return Const(not absorbing)
    if len(flat) == 1:
        return flat[0]
    return kind(tuple(flat))


class _Clausifier:
    """One-sided (Plaisted-Greenbaum) Tseitin: every subformula below the top occurs positively after NNF."""

    def __init__(self, cnf: CnfFormula):
        self.cnf = cnf
        self.definitions: dict[Formula, Literal] = {}

    def _fresh(self) -> Literal:
        k = len(self.definitions)
        name = f"tseitin!{k}"
        while self.cnf.atoms.has_boolean(name):
            k += 1
            name = f"tseitin!{k}"
        return Literal(self.cnf.atoms.boolean(name).id)

    def literal_for(self, f: Formula) -> Literal:
        if isinstance(f, Lit):
            return f.literal
        if f in self.definitions:
            return self.definitions[f]
        aux = self._fresh()
        self.definitions[f] = aux
        if isinstance(f, And):
            for arg in f.args:
                self.cnf.add_clause([~aux, *self.disjuncts(arg)])
        else:
            self.cnf.add_clause([~aux, *self.disjuncts(f)])
        return aux

    def disjuncts(self, f: Formula) -> list[Literal]:
        if isinstance(f, Or):
            return [self.literal_for(a) for a in f.args]
        return [self.literal_for(f)]

    def top(self, f: Formula):
        if isinstance(f, Const):
            if not f.value:
                self.cnf.add_clause([])
            return
        if isinstance(f, And):
            for arg in f.args:
                self.cnf.add_clause(self.disjuncts(arg))
        else:
            self.cnf.add_clause(self.disjuncts(f))


def cnf_convert(formula: Formula, atoms: AtomTable | None = None) -> CnfFormula:
    """
    Equisatisfiable CNF of ``formula``.

    Clauses that are already flat need no auxiliary atoms; nested
    conjunctions below a disjunction get one ``tseitin!k`` Boolean atom
    each, shared when the same subformula occurs twice.
    """
    cnf = CnfFormula(atoms=atoms if atoms is not None else AtomTable())
    clausifier = _Clausifier(cnf)
    clausifier.top(to_nnf(formula))
    log.debug(
        "CNF: %d clauses, %d auxiliary atoms", len(cnf.clauses), len(clausifier.definitions)
    )
    return cnf
