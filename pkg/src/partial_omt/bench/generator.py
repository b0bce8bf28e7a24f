"""
Strip-packing instance generator

N rectangles go into a strip of fixed height H and unlimited length;
the objective is the used length L. Widths are sampled in (1, 2],
heights in (0, 1], and H is sqrt(N)/2 with sqrt(N) truncated to three
decimals. The LIRA encoding makes each rectangle's coordinates integer
with probability 1/2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from partial_omt.core.errors import OmtError
from partial_omt.core.terms import ArithModel
from partial_omt.frontend.parser import Problem, parse
from partial_omt.frontend.printer import format_constant

from .rng import SplitMix64

log = logging.getLogger(__name__)


class Encoding(str, Enum):
    LRA = "lra"
    LIRA = "lira"


@dataclass(frozen=True)
class SpInstance:
    n: int
    strip_height: Fraction
    widths: tuple[Fraction, ...]
    heights: tuple[Fraction, ...]
    encoding: Encoding = Encoding.LRA
    seed: int = 0
    integer_rects: tuple[bool, ...] = ()

    def __post_init__(self):
        if len(self.widths) != self.n or len(self.heights) != self.n:
            raise ValueError("widths and heights must have one entry per rectangle")
        if any(h > self.strip_height for h in self.heights):
            raise ValueError("rectangle taller than the strip")
        if self.integer_rects and len(self.integer_rects) != self.n:
            raise ValueError("integer_rects must have one entry per rectangle")

    @property
    def name(self) -> str:
        return f"sp-{self.encoding.value}-n{self.n}-s{self.seed}"

    def is_integer(self, i: int) -> bool:
        return bool(self.integer_rects) and self.integer_rects[i]


def strip_height(n: int) -> Fraction:
    """sqrt(n) truncated to three decimals, halved."""
    return Fraction(math.isqrt(n * 10**6), 1000) / 2


def sample_sp(n: int, seed: int, encoding: Encoding | str = Encoding.LRA) -> SpInstance:
    if n < 1:
        raise ValueError("n must be at least 1")
    encoding = Encoding(encoding)
    rng = SplitMix64(seed)
    height = strip_height(n)
    widths, heights = [], []
    for _ in range(n):
        widths.append(1 + rng.thousandths(0, 1000))
        h = rng.thousandths(0, 1000)
        while h > height:
            h = rng.thousandths(0, 1000)
        heights.append(h)
    integer_rects: tuple[bool, ...] = ()
    if encoding is Encoding.LIRA:
        integer_rects = tuple(rng.coin() for _ in range(n))
    return SpInstance(n, height, tuple(widths), tuple(heights), encoding, seed, integer_rects)


def render_sp(inst: SpInstance) -> str:
    """Problem text for an instance; the same instance always renders to the same text."""
    c = format_constant
    logic = "QF_LIRA" if inst.encoding is Encoding.LIRA else "QF_LRA"
    lines = [
        f"; strip packing {inst.name}",
        f"; n {inst.n} seed {inst.seed} encoding {inst.encoding.value}",
        f"; strip_height {inst.strip_height} (sqrt(n) truncated to 3 decimals, halved)",
        "; widths " + " ".join(str(w) for w in inst.widths),
        "; heights " + " ".join(str(h) for h in inst.heights),
        f"(set-logic {logic})",
        "(declare-const L Real)",
    ]
    for i in range(inst.n):
        sort = "Int" if inst.is_integer(i) else "Real"
        lines.append(f"(declare-const x{i} {sort})")
        lines.append(f"(declare-const y{i} {sort})")
    for i in range(inst.n):
        w, h = inst.widths[i], inst.heights[i]
        lines.append(f"(assert (>= x{i} 0))")
        lines.append(f"(assert (>= y{i} 0))")
        lines.append(f"(assert (<= (+ y{i} {c(h)}) {c(inst.strip_height)}))")
        lines.append(f"(assert (<= (+ x{i} {c(w)}) L))")
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            wi, wj = c(inst.widths[i]), c(inst.widths[j])
            hi, hj = c(inst.heights[i]), c(inst.heights[j])
            lines.append(
                f"(assert (or (<= (+ x{i} {wi}) x{j}) (<= (+ x{j} {wj}) x{i})"
                f" (<= (+ y{i} {hi}) y{j}) (<= (+ y{j} {hj}) y{i})))"
            )
    lines += ["(minimize L)", "(check-sat)"]
    return "\n".join(lines) + "\n"


def shelf_model(inst: SpInstance, problem: Problem) -> ArithModel:
    """Every rectangle on the strip floor, rectangle i starting at x = 2i."""
    values = {problem.var_id("L"): Fraction(2 * inst.n)}
    for i in range(inst.n):
        values[problem.var_id(f"x{i}")] = Fraction(2 * i)
        values[problem.var_id(f"y{i}")] = Fraction(0)
    return ArithModel(values)


def sp_problem(inst: SpInstance) -> Problem:
    problem = parse(render_sp(inst), name=inst.name)
    if not problem.is_satisfied_by(shelf_model(inst, problem)):
        raise OmtError(f"generated instance {inst.name} rejects its shelf placement")
    return problem


def generate_sp(n: int, seed: int, encoding: Encoding | str = Encoding.LRA) -> tuple[Problem, SpInstance]:
    inst = sample_sp(n, seed, encoding)
    log.info("Generated %s (strip height %s)", inst.name, inst.strip_height)
    return sp_problem(inst), inst
