"""
Strip-packing generator and its random stream
"""
from fractions import Fraction

import pytest

from partial_omt.bench.generator import (
    Encoding,
    SpInstance,
    generate_sp,
    render_sp,
    sample_sp,
    shelf_model,
    sp_problem,
    strip_height,
)
from partial_omt.bench.rng import SplitMix64
from partial_omt.core.numbers import DeltaRational
from partial_omt.solver import BnbConfig, OmtConfig, OmtStatus, solve


def test_splitmix_reference_value():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_splitmix_ranges():
    rng = SplitMix64(7)
    assert all(0 <= rng.below(3) < 3 for _ in range(200))
    samples = [rng.thousandths(0, 1000) for _ in range(200)]
    assert all(Fraction(1, 1000) <= q <= 1 and (q * 1000).denominator == 1 for q in samples)
    with pytest.raises(ValueError):
        rng.below(0)


@pytest.mark.parametrize("n, height", [(1, Fraction(1, 2)), (2, Fraction(707, 1000)), (4, Fraction(1))])
def test_strip_height(n, height):
    assert strip_height(n) == height


def test_sampling_ranges():
    inst = sample_sp(10, 3)
    assert inst.n == 10
    assert all(1 < w <= 2 for w in inst.widths)
    assert all(0 < h <= inst.strip_height for h in inst.heights)
    assert inst.integer_rects == ()
    assert inst.name == "sp-lra-n10-s3"


def test_generation_is_deterministic():
    assert sample_sp(8, 1) == sample_sp(8, 1)
    assert render_sp(sample_sp(8, 1, "lira")) == render_sp(sample_sp(8, 1, "lira"))
    assert sample_sp(8, 1) != sample_sp(8, 2)


def test_frozen_sample(sp8_seed1):
    assert sample_sp(8, 1) == sp8_seed1
    problem, inst = generate_sp(8, 1)
    assert inst == sp8_seed1
    assert render_sp(inst) == render_sp(sp8_seed1)
    assert problem.is_satisfied_by(shelf_model(inst, problem))


def test_lira_marks_rectangles():
    inst = sample_sp(12, 5, Encoding.LIRA)
    assert len(inst.integer_rects) == 12
    text = render_sp(inst)
    assert "(set-logic QF_LIRA)" in text
    assert text.count(" Int)") == 2 * sum(inst.integer_rects)


def test_problem_shape():
    problem, inst = generate_sp(4, 0)
    assert problem.var_names == ["L", "x0", "y0", "x1", "y1", "x2", "y2", "x3", "y3"]
    assert len(problem.cnf.clauses) == 4 * 4 + 6
    assert problem.objective.as_dict() == {problem.var_id("L"): 1}
    assert problem.is_satisfied_by(shelf_model(inst, problem))


def test_header_records_instance():
    problem, inst = generate_sp(3, 9)
    assert problem.header[0] == f"strip packing {inst.name}"
    assert any(line.startswith("strip_height ") for line in problem.header)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_single_rectangle_optimum_is_its_width(seed):
    problem, inst = generate_sp(1, seed)
    outcome = solve(problem)
    assert outcome.status is OmtStatus.OPTIMUM
    assert outcome.value == DeltaRational(inst.widths[0])


def test_tall_pair_goes_side_by_side(side_by_side):
    problem = sp_problem(side_by_side)
    outcome = solve(problem)
    assert outcome.value == DeltaRational.of(Fraction(27, 10))
    assert problem.is_satisfied_by(outcome.model)


def test_lira_instance_solves():
    problem, inst = generate_sp(3, 4, "lira")
    outcome = solve(problem, OmtConfig(lia_mode=BnbConfig(mode="full")))
    assert outcome.status is OmtStatus.OPTIMUM
    assert problem.is_satisfied_by(outcome.model)
    assert outcome.value <= DeltaRational.of(2 * inst.n)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"heights": (Fraction(1, 2), Fraction(4, 5))},
        {"widths": (Fraction(3, 2),)},
        {"integer_rects": (True,)},
    ],
)
def test_instance_validation(side_by_side, kwargs):
    fields = dict(
        n=2,
        strip_height=side_by_side.strip_height,
        widths=side_by_side.widths,
        heights=side_by_side.heights,
    )
    fields.update(kwargs)
    with pytest.raises(ValueError):
        SpInstance(**fields)


def test_rejects_empty_instance():
    with pytest.raises(ValueError):
        sample_sp(0, 0)
