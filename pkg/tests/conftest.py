"""
Shared fixtures: the two-clause running example over x, y with cost -2x
"""
from fractions import Fraction

import pytest

from partial_omt.core.terms import LinearTerm, Literal
from partial_omt.frontend import parse

EXAMPLE = """\
; running example: optimum -12 at x = 6, y = 2
(set-logic QF_LRA)
(declare-const x Real)
(declare-const y Real)
(assert (or (<= (- (* 2 x) (* 3 y)) 6) (<= x 4)))
(assert (or (<= y 2) (<= y (+ (* (- 3) x) 9)) (< x (- 2))))
(minimize (* (- 2) x))
(check-sat)
"""

X = LinearTerm.var(0)
Y = LinearTerm.var(1)


def const(q) -> LinearTerm:
    return LinearTerm.const(Fraction(q))


@pytest.fixture
def example_text():
    return EXAMPLE


@pytest.fixture
def example():
    return parse(EXAMPLE, name="example")


@pytest.fixture
def example_atoms(example):
    """Atoms of the example in the order they appear in the formula."""
    atoms = example.atoms
    return {
        "2x-3y<=6": atoms.normalize_atom(X.scale(2) - Y.scale(3), "<=", const(6)),
        "x<=4": atoms.normalize_atom(X, "<=", const(4)),
        "y<=2": atoms.normalize_atom(Y, "<=", const(2)),
        "y<=-3x+9": atoms.normalize_atom(Y, "<=", X.scale(-3) + const(9)),
        "x<-2": atoms.normalize_atom(X, "<", const(-2)),
    }


@pytest.fixture
def mu(example_atoms):
    """The total assignment that makes all atoms true except x < -2."""
    return [
        Literal(example_atoms["2x-3y<=6"].id),
        Literal(example_atoms["x<=4"].id),
        Literal(example_atoms["y<=2"].id),
        Literal(example_atoms["y<=-3x+9"].id),
        Literal(example_atoms["x<-2"].id, False),
    ]


@pytest.fixture
def side_by_side():
    """Two rectangles too tall to stack in a 707/1000 strip: optimum length 3/2 + 6/5."""
    from partial_omt.bench.generator import SpInstance

    return SpInstance(
        n=2,
        strip_height=Fraction(707, 1000),
        widths=(Fraction(3, 2), Fraction(6, 5)),
        heights=(Fraction(1, 2), Fraction(3, 5)),
    )


@pytest.fixture
def sp8_seed1():
    """Frozen sample of the strip-packing generator for n=8, seed=1."""
    from partial_omt.bench.generator import SpInstance

    return SpInstance(
        n=8,
        strip_height=Fraction(707, 500),
        widths=tuple(Fraction(k, 1000) for k in (1466, 1591, 1762, 1046, 1521, 1738, 1785, 1817)),
        heights=tuple(Fraction(k, 1000) for k in (520, 236, 49, 534, 951, 871, 523, 740)),
        seed=1,
    )
