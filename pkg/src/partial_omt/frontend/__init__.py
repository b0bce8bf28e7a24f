"""
Problem files: parsing, CNF conversion and printing
"""
from .cnf import And, Const, Formula, Lit, Not, Or, cnf_convert, holds
from .parser import Problem, parse, parse_file
from .printer import print_problem

__all__ = [
    "And",
    "Const",
    "Formula",
    "Lit",
    "Not",
    "Or",
    "Problem",
    "cnf_convert",
    "holds",
    "parse",
    "parse_file",
    "print_problem",
]
