"""
Linear-search OMT loop
"""
from fractions import Fraction

import pytest

from partial_omt.core.errors import SoundnessError
from partial_omt.core.numbers import DeltaRational
from partial_omt.core.terms import Literal, TruthAssignment
from partial_omt.frontend import parse
from partial_omt.solver import BnbConfig, OmtConfig, OmtSearch, OmtStatus, solve

STRATEGIES = ["none", "basic", "guided"]

LIA_TEXT = """\
(set-logic QF_LIA)
(declare-const x Int)
(declare-const y Int)
(assert (<= (+ (* 2 x) (* 2 y)) 5))
(assert (>= x 0))
(assert (>= y 0))
(minimize (+ (* (- 1) x) (* (- 1) y)))
"""


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("lemma", [True, False])
def test_running_example_optimum(example, strategy, lemma):
    outcome = solve(example, OmtConfig(strategy=strategy, learn_block_lemma=lemma))
    assert outcome.status is OmtStatus.OPTIMUM
    assert outcome.value == DeltaRational.of(-12)
    assert outcome.model.values == {0: Fraction(6), 1: Fraction(2)}
    assert example.is_satisfied_by(outcome.model)
    bounds = outcome.trace.upper_bounds
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


@pytest.mark.parametrize("strategy, first_ub", [("none", -6), ("basic", -8), ("guided", -12)])
def test_first_bound_from_forced_assignment(example, mu, strategy, first_ub):
    outcome = solve(example, OmtConfig(strategy=strategy, first_assignment=mu))
    assert outcome.trace.ub_at(1) == DeltaRational.of(first_ub)
    assert outcome.value == DeltaRational.of(-12)


def test_guided_iteration_record(example, example_atoms, mu):
    outcome = solve(example, OmtConfig(strategy="guided", first_assignment=mu))
    first = outcome.trace.records[0]
    assert first.index == 1
    assert first.values == [DeltaRational.of(v) for v in (-6, -8, -12)]
    assert [lit.atom_id for lit in first.dropped] == [
        example_atoms["y<=-3x+9"].id,
        example_atoms["x<=4"].id,
    ]
    assert first.minimize_calls == 4
    assert (first.eta_size, first.mu_size) == (5, 3)
    assert outcome.trace.iterations == 1
    assert outcome.trace.lemmas == 1


def test_lemma_does_not_change_optimum(example, mu):
    with_lemma = solve(example, OmtConfig(strategy="guided", first_assignment=mu))
    without = solve(example, OmtConfig(strategy="guided", first_assignment=mu, learn_block_lemma=False))
    assert with_lemma.value == without.value
    assert without.trace.lemmas == 0


def test_truncated_lemma_is_refused(example):
    search = OmtSearch(example)
    bound = search.objective_bound_atom(DeltaRational.of(-6))
    with pytest.raises(SoundnessError):
        search.learn_block_lemma([], bound, truncated=True)


def test_objective_bound_atom(example):
    search = OmtSearch(example)
    bound = search.objective_bound_atom(DeltaRational.of(-6))
    assert example.atoms.render_literal(bound, example.var_names) == "(-x < -3)"


def test_trace_csv(tmp_path, example, mu):
    outcome = solve(example, OmtConfig(strategy="guided", first_assignment=mu))
    path = tmp_path / "trace.csv"
    text = outcome.trace.to_csv(path)
    lines = path.read_text().splitlines()
    assert text.splitlines() == lines
    assert lines[0] == "index,time_s,ub,dropped,minimize_calls"
    index, _, ub, dropped, calls = lines[1].split(",")
    assert (index, ub, dropped, calls) == ("1", "-12", "2", "4")


def test_ub_at_past_the_end(example, mu):
    trace = solve(example, OmtConfig(first_assignment=mu)).trace
    assert trace.ub_at(5) == trace.upper_bounds[-1]


def test_unsat():
    problem = parse(
        "(declare-const x Real)(assert (< x 0))(assert (> x 1))(minimize x)"
    )
    outcome = solve(problem)
    assert outcome.status is OmtStatus.UNSAT
    assert outcome.value is None
    assert not outcome.has_model


def test_unbounded():
    problem = parse("(declare-const x Real)(assert (or (<= x 4) (>= x 10)))(minimize x)")
    outcome = solve(problem)
    assert outcome.status is OmtStatus.UNBOUNDED
    assert outcome.model is None


def test_strict_infimum_is_not_attained():
    problem = parse("(declare-const x Real)(assert (> x 2))(minimize x)")
    outcome = solve(problem)
    assert outcome.status is OmtStatus.OPTIMUM
    assert outcome.value == DeltaRational.of(2, 1)
    assert outcome.model.values[0] > 2


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_nothing_beats_the_optimum(example_text, strategy):
    stronger = example_text.replace("(minimize", "(assert (< (* (- 2) x) (- 12)))\n(minimize", 1)
    outcome = solve(parse(stronger), OmtConfig(strategy=strategy))
    assert outcome.status is OmtStatus.UNSAT


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_bounds_decrease_from_every_start(example, mu, strategy):
    for first in (None, mu):
        trace = solve(example, OmtConfig(strategy=strategy, first_assignment=first)).trace
        bounds = trace.upper_bounds
        assert bounds
        assert all(a > b for a, b in zip(bounds, bounds[1:]))
        assert bounds[-1] == DeltaRational.of(-12)


def test_theory_checks_share_one_solver(example, example_atoms):
    search = OmtSearch(example)
    solver = search.theory
    x_le4, x_lt_neg2 = example_atoms["x<=4"], example_atoms["x<-2"]
    # x > 4 together with x < -2
    clash = TruthAssignment.from_literals([Literal(x_le4.id, False), Literal(x_lt_neg2.id)])
    assert set(search._theory_check(clash)) == {Literal(x_le4.id, False), Literal(x_lt_neg2.id)}
    fine = TruthAssignment.from_literals([Literal(x_le4.id), Literal(x_lt_neg2.id)])
    assert search._theory_check(fine) is None

    outcome = search.run()
    assert outcome.value == DeltaRational.of(-12)
    assert search.theory is solver
    assert (solver.depth, solver.asserted) == (0, [])


def test_iteration_cap(example):
    outcome = solve(example, OmtConfig(strategy="none", max_iterations=1))
    assert outcome.status is OmtStatus.BUDGET_EXHAUSTED
    assert outcome.trace.iterations == 1
    assert outcome.value is not None


def test_boolean_atoms_in_model():
    problem = parse(
        """
        (declare-const p Bool)
        (declare-const x Real)
        (assert (or p (>= x 3)))
        (assert (=> p (>= x 1)))
        (assert (>= x 0))
        (minimize x)
        """
    )
    outcome = solve(problem)
    assert outcome.value == DeltaRational.of(1)
    p = problem.atoms.boolean("p").id
    assert outcome.model.booleans[p] is True


@pytest.mark.parametrize("mode", ["full", "truncated"])
def test_integer_optimum(mode):
    problem = parse(LIA_TEXT)
    outcome = solve(problem, OmtConfig(lia_mode=BnbConfig(mode=mode)))
    assert outcome.status is OmtStatus.OPTIMUM
    assert outcome.value == DeltaRational.of(-2)
    assert problem.is_satisfied_by(outcome.model)


def test_conflict_proposals(example):
    outcome = solve(example, OmtConfig(proposal="conflict"))
    assert outcome.value == DeltaRational.of(-12)


def test_stage_timings(example):
    trace = solve(example).trace
    assert {"sat", "reduce", "minimize"} <= set(trace.stages)
    assert trace.stages["sat"]["calls"] == trace.sat_calls


@pytest.mark.parametrize(
    "kwargs",
    [{"time_budget": 0}, {"proposal": "random"}, {"max_iterations": 0}, {"strategy": "greedy"}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        OmtConfig(**kwargs)
