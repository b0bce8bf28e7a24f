"""
Problem-file parsing and printing
"""
import re
from fractions import Fraction

import pytest

from partial_omt.core.errors import ParseError
from partial_omt.core.terms import LinearTerm, Relation, Sort
from partial_omt.frontend import parse, parse_file, print_problem


def test_example_shape(example):
    assert example.var_names == ["x", "y"]
    assert example.num_vars == 2
    assert example.logic == "QF_LRA"
    assert len(example.atoms) == 5
    assert len(example.cnf.clauses) == 2
    assert [len(c) for c in example.cnf.clauses] == [2, 3]
    assert example.objective == LinearTerm.var(0, -2)
    assert example.header == ["running example: optimum -12 at x = 6, y = 2"]


def test_atoms_are_normalized(example, example_atoms):
    atom = example_atoms["2x-3y<=6"]
    assert atom.rel is Relation.LE
    assert atom.term == LinearTerm.from_dict({0: 2, 1: -3}, -6)
    assert example_atoms["x<-2"].rel is Relation.LT
    assert example.cnf.appearance_order() == [a.id for a in example_atoms.values()]


def test_integer_sorts_and_decimals():
    problem = parse(
        """
        (set-logic QF_LIRA)
        (declare-const x Real)
        (declare-fun y () Int)
        (assert (>= (+ x y) 0.5))
        (minimize (+ x (/ y 2)))
        """
    )
    assert problem.var_types == {0: Sort.REAL, 1: Sort.INT}
    assert problem.integer_vars == {1}
    atom = problem.atoms[0]
    assert atom.term == LinearTerm.from_dict({0: -1, 1: -1}, Fraction(1, 2))
    assert problem.objective == LinearTerm.from_dict({0: 1, 1: Fraction(1, 2)})


def test_maximize_negates_objective():
    problem = parse("(declare-const x Real) (assert (<= x 3)) (maximize x)")
    assert problem.maximize
    assert problem.objective == LinearTerm.var(0, -1)


def test_booleans_and_implication():
    problem = parse(
        """
        (declare-const p Bool)
        (declare-const x Real)
        (assert (=> p (<= x 1)))
        (assert (= p (>= x 0)))
        (minimize x)
        """
    )
    assert problem.atoms[0].name == "p"
    assert not problem.atoms.is_theory(0)
    assert all(len(c) == 2 for c in problem.cnf.clauses)


def test_chained_comparison_and_equality():
    problem = parse("(declare-const x Real) (assert (<= 0 x 4)) (assert (= x 2)) (minimize x)")
    # 0 <= x, x <= 4, and x = 2 as two non-strict atoms
    assert len(problem.cnf.clauses) == 4


def test_constant_atoms_fold():
    problem = parse("(declare-const x Real) (assert (or (<= 1 0) (<= x 2))) (minimize x)")
    assert problem.cnf.clauses == [(problem.cnf.clauses[0][0],)]
    assert len(problem.atoms) == 1


def test_false_assertion_gives_empty_clause():
    problem = parse("(declare-const x Real) (assert (< 0 0)) (minimize x)")
    assert problem.cnf.is_unsat


@pytest.mark.parametrize(
    "text, message",
    [
        ("(declare-const x Real) (assert (<= z 1)) (minimize x)", "undeclared"),
        ("(declare-const x Real) (assert (<= (* x x) 1)) (minimize x)", "non-linear"),
        ("(declare-const x Real) (assert (<= x 1))", "missing"),
        ("(declare-const x Real) (minimize x) (minimize x)", "exactly one objective"),
        ("(declare-const x Real) (assert (<= x 1) (minimize x)", "missing ')'"),
        ("(declare-const x Real) (assert (<= x 1))) (minimize x)", "unexpected ')'"),
        ("(declare-const x Float) (minimize x)", "unsupported sort"),
        ("(declare-const x Real) (assert (<= (/ 1 x) 1)) (minimize x)", "division only by a constant"),
        ("(declare-const x Real) (push 1) (minimize x)", "unsupported command"),
        ("(set-logic QF_NRA) (declare-const x Real) (minimize x)", "unsupported logic"),
        ("(declare-const x Real) (declare-const x Int) (minimize x)", "declared twice"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=re.escape(message)):
        parse(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse("(declare-const x Real)\n(assert (<= y 1))\n(minimize x)")
    assert info.value.line == 2
    assert info.value.column == 13


def test_parse_file(tmp_path, example_text):
    path = tmp_path / "example.smt2"
    path.write_text(example_text)
    problem = parse_file(path)
    assert problem.name == "example"
    with pytest.raises(ParseError, match="cannot read"):
        parse_file(tmp_path / "missing.smt2")


def test_parse_file_rejects_binary(tmp_path):
    path = tmp_path / "latin1.smt2"
    path.write_bytes(b"(declare-const x Real)\n; caf\xe9\n(minimize x)\n")
    with pytest.raises(ParseError, match="not UTF-8 text"):
        parse_file(path)


def test_printed_problem_parses_to_same_clauses(example):
    again = parse(print_problem(example))
    assert again.var_names == example.var_names
    assert again.objective == example.objective
    rendered = [
        sorted(example.atoms.render_literal(lit) for lit in clause) for clause in example.cnf.clauses
    ]
    rendered_again = [
        sorted(again.atoms.render_literal(lit) for lit in clause) for clause in again.cnf.clauses
    ]
    assert rendered_again == rendered


def test_printed_maximize_keeps_direction():
    problem = parse("(declare-const x Real) (assert (<= x 3)) (maximize x)")
    again = parse(print_problem(problem))
    assert again.maximize
    assert again.objective == problem.objective
