"""
Linear terms, atom interning, literals and assignments
"""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partial_omt.core.errors import TheoryError, UnassignedVariableError
from partial_omt.core.numbers import DeltaRational
from partial_omt.core.terms import (
    ArithModel,
    AtomTable,
    CnfFormula,
    LinearTerm,
    Literal,
    Relation,
    TruthAssignment,
    concretize,
    eval_literal,
    normalize_constraint,
)


def term(coeffs, constant=0):
    return LinearTerm.from_dict(coeffs, constant)


def test_term_arithmetic_merges_and_cancels():
    t = term({0: 2, 1: -3}, -6) + term({1: 3}, 1)
    assert t == term({0: 2}, -5)
    assert (t - t).is_constant


def test_evaluate_needs_every_variable():
    with pytest.raises(UnassignedVariableError, match="y"):
        term({0: 1, 1: 1}).evaluate({0: Fraction(1)}, names=["x", "y"])


def test_evaluate_delta_values():
    value = term({0: 2}, 1).evaluate({0: DeltaRational.of(3, -1)})
    assert value == DeltaRational.of(7, -2)


@pytest.mark.parametrize(
    "coeffs, constant, rel, expected_coeffs, expected_constant, expected_rel",
    [
        ({0: 2, 1: -3}, -6, "<=", {0: 2, 1: -3}, -6, Relation.LE),
        ({0: 4, 1: 2}, -8, "<=", {0: 2, 1: 1}, -4, Relation.LE),
        ({0: Fraction(1, 2), 1: Fraction(1, 3)}, -1, "<", {0: 3, 1: 2}, -6, Relation.LT),
        ({0: 1}, -4, ">=", {0: -1}, 4, Relation.LE),
        ({0: 1}, 2, ">", {0: -1}, -2, Relation.LT),
        ({0: -2, 1: 4}, 2, "=", {0: 1, 1: -2}, -1, Relation.EQ),
    ],
)
def test_normalize_constraint(coeffs, constant, rel, expected_coeffs, expected_constant, expected_rel):
    normalized, relation = normalize_constraint(term(coeffs, constant), rel)
    assert normalized == term(expected_coeffs, expected_constant)
    assert relation is expected_rel


@pytest.mark.parametrize(
    "constant, rel, truth",
    [(-1, "<=", True), (0, "<", False), (0, "<=", True), (1, "=", False)],
)
def test_constant_constraints_collapse(constant, rel, truth):
    normalized, relation = normalize_constraint(LinearTerm.const(constant), rel)
    assert normalized.is_constant and normalized.constant == 0
    assert relation is (Relation.LE if truth else Relation.LT)


def test_interning_shares_scaled_atoms():
    atoms = AtomTable()
    a = atoms.linear(term({0: 1, 1: 1}, -2), "<=")
    b = atoms.linear(term({0: 3, 1: 3}, -6), "<=")
    c = atoms.linear(term({0: 1, 1: 1}, -2), "<")
    assert a.id == b.id
    assert c.id != a.id
    assert len(atoms) == 2


def test_boolean_atoms_are_not_theory():
    atoms = AtomTable()
    p = atoms.boolean("p")
    assert atoms.boolean("p") is p
    assert not atoms.is_theory(p.id)
    with pytest.raises(TheoryError):
        p.holds({})


def test_literal_complement():
    lit = Literal(3)
    assert ~lit == Literal(3, False)
    assert ~~lit == lit


def test_cnf_drops_duplicates_and_tautologies():
    cnf = CnfFormula()
    assert cnf.add_clause([Literal(0), Literal(0), Literal(1)])
    assert not cnf.add_clause([Literal(2), Literal(2, False)])
    assert cnf.clauses == [(Literal(0), Literal(1))]
    assert not cnf.is_unsat
    cnf.add_clause([])
    assert cnf.is_unsat


def test_appearance_order():
    cnf = CnfFormula()
    cnf.add_clause([Literal(4), Literal(1)])
    cnf.add_clause([Literal(1, False), Literal(0)])
    assert cnf.appearance_order() == [4, 1, 0]
    assert cnf.atom_ids() == {0, 1, 4}


def test_truth_assignment_set_view():
    mu = TruthAssignment.from_literals([Literal(0), Literal(2, False)])
    assert Literal(0) in mu
    assert Literal(2) not in mu
    assert mu.literals() == [Literal(0), Literal(2, False)]
    smaller = mu.without(Literal(0))
    assert smaller.issubset(mu) and not mu.issubset(smaller)
    assert mu.without(Literal(0, False)) == mu
    assert mu.is_total([0, 2]) and not mu.is_total([0, 1])
    assert mu.restrict([2]).literals() == [Literal(2, False)]


def test_eval_literal_reads_booleans_from_model():
    atoms = AtomTable()
    p = atoms.boolean("p")
    lt = atoms.linear(term({0: 1}, -1), "<")
    model = ArithModel({0: Fraction(1)}, {p.id: True})
    assert eval_literal(Literal(p.id), model, atoms)
    assert not eval_literal(Literal(lt.id), model, atoms)
    assert eval_literal(Literal(lt.id, False), model, atoms)


def test_concretize_keeps_strict_literals():
    atoms = AtomTable()
    # 0 < x < 1/1000
    low = atoms.linear(term({0: -1}), "<")
    high = atoms.linear(term({0: 1}, Fraction(-1, 1000)), "<")
    delta_model = {0: DeltaRational.of(0, 1)}
    model = concretize(delta_model, [Literal(low.id), Literal(high.id)], atoms)
    assert 0 < model[0] < Fraction(1, 1000)


@given(st.dictionaries(st.integers(0, 4), st.fractions(max_denominator=20), max_size=4),
       st.fractions(max_denominator=20),
       st.sampled_from(["<=", "<", ">=", ">", "="]))
def test_normalization_preserves_truth(coeffs, constant, rel):
    t = term(coeffs, constant)
    normalized, relation = normalize_constraint(t, rel)
    for point in ({v: Fraction(v) for v in range(5)}, {v: Fraction(-1, 2) for v in range(5)}):
        original = {
            "<=": t.evaluate(point) <= 0,
            "<": t.evaluate(point) < 0,
            ">=": t.evaluate(point) >= 0,
            ">": t.evaluate(point) > 0,
            "=": t.evaluate(point) == 0,
        }[rel]
        value = normalized.evaluate(point)
        after = {Relation.LE: value <= 0, Relation.LT: value < 0, Relation.EQ: value == 0}[relation]
        assert original == after
