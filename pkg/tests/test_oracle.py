"""
Brute-force oracle, and the solver checked against it on random problems
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partial_omt.bench.generator import sp_problem
from partial_omt.bench.oracle import (
    OracleStatus,
    brute_force_omt,
    fm_minimize,
    parse_box,
    propositional_models,
)
from partial_omt.core.errors import OracleLimitError
from partial_omt.core.numbers import DeltaRational
from partial_omt.core.terms import LinearTerm
from partial_omt.frontend import parse
from partial_omt.solver import BnbConfig, OmtConfig, OmtStatus, solve

LIA_BOXED = """\
(declare-const x Int)
(declare-const y Int)
(assert (<= (+ (* 2 x) (* 2 y)) 5))
(assert (and (>= x 0) (<= x 5) (>= y 0) (<= y 5)))
(minimize (+ (* (- 1) x) (* (- 1) y)))
"""


def test_running_example(example):
    result = brute_force_omt(example)
    assert result.status is OracleStatus.OPTIMUM
    assert result.value == DeltaRational.of(-12)
    assert result.leaves == 6


def test_side_by_side_strip(side_by_side):
    assert brute_force_omt(sp_problem(side_by_side)).value == DeltaRational.of(Fraction(27, 10))


def test_unsat():
    result = brute_force_omt(parse("(declare-const x Real)(assert (< x 0))(assert (> x 1))(minimize x)"))
    assert result.status is OracleStatus.UNSAT
    assert result.value is None


def test_unbounded():
    result = brute_force_omt(parse("(declare-const x Real)(assert (<= x 4))(minimize x)"))
    assert result.status is OracleStatus.UNBOUNDED


def test_unattained_infimum():
    result = brute_force_omt(parse("(declare-const x Real)(assert (> x 2))(minimize x)"))
    assert result.value == DeltaRational.of(2, 1)


def test_integer_grid():
    problem = parse(LIA_BOXED)
    box = parse_box("*=0:5", problem)
    assert brute_force_omt(problem, box).value == DeltaRational.of(-2)


def test_box_restricts_rationals():
    problem = parse("(declare-const x Real)(assert (<= x 4))(minimize x)")
    assert brute_force_omt(problem, parse_box("x=-1:3", problem)).value == DeltaRational.of(-1)


def test_parse_box(example):
    assert parse_box("x=0:4, y=-1:3/2", example) == {
        0: (Fraction(0), Fraction(4)),
        1: (Fraction(-1), Fraction(3, 2)),
    }
    assert parse_box("*=0:1,y=2:3", example)[1] == (Fraction(2), Fraction(3))


@pytest.mark.parametrize("spec", ["x0:4", "x=0-4", "x=5:1", "z=0:1"])
def test_parse_box_rejects(example, spec):
    with pytest.raises(ValueError):
        parse_box(spec, example)


def test_model_limit(example):
    with pytest.raises(OracleLimitError):
        brute_force_omt(example, max_models=2)


def test_integer_variables_need_a_box():
    problem = parse(LIA_BOXED)
    with pytest.raises(OracleLimitError, match="without a box"):
        brute_force_omt(problem)
    with pytest.raises(OracleLimitError, match="exceeds"):
        brute_force_omt(problem, parse_box("*=0:5", problem), grid_limit=10)


def test_partial_models_stop_when_decided(example):
    models = list(propositional_models(example.formula, 100))
    assert len(models) == 6
    assert min(len(m) for m in models) == 2


def test_partial_models_skip_satisfied_clauses(example, example_atoms):
    first = example_atoms["2x-3y<=6"].id
    second = example_atoms["x<=4"].id
    third = example_atoms["y<=2"].id
    models = list(propositional_models(example.formula, 100))
    assert all(second not in m for m in models if m[first])
    assert sum(m[first] for m in models) == 3
    assert all(m[second] for m in models if not m[first])
    assert {first: True, third: True} in models
    assert len({frozenset(m.items()) for m in models}) == 6


def test_fm_constant_rows():
    # 0 < 0 with no variables left
    rows = [((), Fraction(0), True)]
    assert fm_minimize(rows, LinearTerm()).status is OracleStatus.UNSAT
    assert fm_minimize([], LinearTerm.const(Fraction(3))).value == DeltaRational.of(3)


# --- solver against oracle ---------------------------------------------------

RELATIONS = ["<=", "<", ">=", ">"]


def _sum(coeffs, names):
    parts = [f"(* {c} {n})" if c >= 0 else f"(* (- {-c}) {n})" for c, n in zip(coeffs, names) if c]
    return f"(+ {' '.join(parts)} 0)" if parts else "0"


def _const(c):
    return str(c) if c >= 0 else f"(- {-c})"


@st.composite
def random_problems(draw, sorts):
    names = [f"v{i}" for i in range(len(sorts))]
    coefficient = st.integers(-5, 5)
    n_atoms = draw(st.integers(1, 8))
    atoms = []
    for _ in range(n_atoms):
        coeffs = draw(st.lists(coefficient, min_size=len(names), max_size=len(names)).filter(any))
        rel = draw(st.sampled_from(RELATIONS))
        atoms.append(f"({rel} {_sum(coeffs, names)} {_const(draw(coefficient))})")
    literal = st.tuples(st.integers(0, n_atoms - 1), st.booleans())
    clauses = draw(st.lists(st.lists(literal, min_size=1, max_size=3), min_size=1, max_size=5))
    cost = draw(st.lists(coefficient, min_size=len(names), max_size=len(names)))

    lines = [f"(declare-const {n} {s})" for n, s in zip(names, sorts)]
    for clause in clauses:
        lits = [atoms[i] if pos else f"(not {atoms[i]})" for i, pos in clause]
        lines.append(f"(assert (or {' '.join(lits)}))")
    lines.append(f"(minimize {_sum(cost, names)})")
    return "\n".join(lines)


def _same_answer(outcome, expected):
    status = {
        OmtStatus.OPTIMUM: OracleStatus.OPTIMUM,
        OmtStatus.UNSAT: OracleStatus.UNSAT,
        OmtStatus.UNBOUNDED: OracleStatus.UNBOUNDED,
    }[outcome.status]
    if status is not expected.status:
        return False
    if status is not OracleStatus.OPTIMUM:
        return True
    got = outcome.value
    return got.real == expected.value.real and (got.delta > 0) == (expected.value.delta > 0)


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: random_problems(["Real"] * n)))
def test_solver_matches_oracle(text):
    problem = parse(text)
    expected = brute_force_omt(problem)
    for strategy in ("none", "basic", "guided"):
        for lemma in (True, False):
            outcome = solve(problem, OmtConfig(strategy=strategy, learn_block_lemma=lemma))
            assert _same_answer(outcome, expected), (strategy, lemma, text)
            bounds = outcome.trace.upper_bounds
            assert all(a > b for a, b in zip(bounds, bounds[1:]))
            if outcome.model is not None:
                assert problem.is_satisfied_by(outcome.model)


@pytest.mark.slow
@settings(max_examples=100, deadline=None)
@given(random_problems(["Int", "Int", "Real"]))
def test_mixed_solver_matches_grid_oracle(text):
    box = "\n".join(f"(assert (and (>= {v} (- 3)) (<= {v} 3)))" for v in ("v0", "v1", "v2"))
    problem = parse(text.replace("(minimize", box + "\n(minimize", 1))
    expected = brute_force_omt(problem, parse_box("*=-3:3", problem))
    for mode in ("full", "truncated"):
        outcome = solve(problem, OmtConfig(lia_mode=BnbConfig(mode=mode)))
        assert _same_answer(outcome, expected), (mode, text)
