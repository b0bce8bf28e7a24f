"""
Emit a Problem back in the frontend grammar
"""
from __future__ import annotations

from fractions import Fraction

from partial_omt.core.terms import Atom, LinearTerm, Literal

from .parser import Problem


def format_constant(q: Fraction) -> str:
    if q < 0:
        return f"(- {format_constant(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


def format_term(term: LinearTerm, names: list[str]) -> str:
    parts = []
    for v, c in term.coeffs:
        parts.append(names[v] if c == 1 else f"(* {format_constant(c)} {names[v]})")
    if term.constant != 0 or not parts:
        parts.append(format_constant(term.constant))
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


def format_atom(atom: Atom, names: list[str]) -> str:
    if not atom.is_theory:
        return atom.name
    lhs = format_term(atom.term.without_constant(), names)
    rhs = format_constant(-atom.term.constant)
    return f"({atom.rel.value} {lhs} {rhs})"


def format_literal(lit: Literal, problem: Problem) -> str:
    text = format_atom(problem.atoms[lit.atom_id], problem.var_names)
    return text if lit.polarity else f"(not {text})"


def print_problem(problem: Problem) -> str:
    """CNF form of the problem, one assert per clause; parsing it back yields the same clauses."""
    lines = [f"; {h}" for h in problem.header]
    lines.append(f"(set-logic {problem.logic})")
    for v, name in enumerate(problem.var_names):
        lines.append(f"(declare-const {name} {problem.var_types[v].value})")
    for atom in problem.atoms:
        if not atom.is_theory:
            lines.append(f"(declare-const {atom.name} Bool)")

    for clause in problem.cnf.clauses:
        if not clause:
            lines.append("(assert false)")
        elif len(clause) == 1:
            lines.append(f"(assert {format_literal(clause[0], problem)})")
        else:
            body = " ".join(format_literal(lit, problem) for lit in clause)
            lines.append(f"(assert (or {body}))")

    if problem.maximize:
        lines.append(f"(maximize {format_term(-problem.objective, problem.var_names)})")
    else:
        lines.append(f"(minimize {format_term(problem.objective, problem.var_names)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


