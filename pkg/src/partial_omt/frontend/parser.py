"""
Reader for the SMT-LIB subset: QF_LRA / QF_LIRA assertions plus one objective
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Union

from partial_omt.core.errors import ParseError
from partial_omt.core.terms import (
    ArithModel,
    AtomTable,
    CnfFormula,
    LinearTerm,
    Literal,
    Relation,
    Sort,
    normalize_constraint,
)

from .cnf import FALSE, TRUE, And, Const, Formula, Lit, Not, Or, cnf_convert, holds, iff, implies

log = logging.getLogger(__name__)

_NUMERAL = re.compile(r"^\d+(\.\d+)?$")
_LOGICS = {"QF_LRA", "QF_LIA", "QF_LIRA", "QF_RDL", "QF_IDL", "ALL"}


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    line: int
    column: int
    quoted: bool = False


SExpr = Union[Token, "SList"]


@dataclass(slots=True)
class SList:
    items: list[SExpr]
    line: int
    column: int


@dataclass
class Problem:
    """An OMT pair: CNF skeleton over interned atoms plus a linear objective to minimize."""

    cnf: CnfFormula
    objective: LinearTerm
    var_names: list[str]
    var_types: dict[int, Sort]
    name: str = ""
    logic: str = "QF_LRA"
    maximize: bool = False
    formula: Formula = TRUE
    header: list[str] = field(default_factory=list)

    @property
    def atoms(self) -> AtomTable:
        return self.cnf.atoms

    @property
    def integer_vars(self) -> set[int]:
        return {v for v, s in self.var_types.items() if s is Sort.INT}

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def var_id(self, name: str) -> int:
        return self.var_names.index(name)

    def is_satisfied_by(self, model: ArithModel) -> bool:
        """The model satisfies the asserted formula and gives integer variables integer values."""
        if any(model[v].denominator != 1 for v in self.integer_vars):
            return False
        return holds(self.formula, model, self.atoms)


def tokenize(text: str) -> Iterator[Token]:
    """Split LISP-style source into tokens carrying their line and column."""
    line, col, i, n = 1, 1, 0, len(text)

    def advance(k: int = 1):
        nonlocal line, col, i
        for _ in range(k):
            if text[i] == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c.isspace():
            advance()
        elif c == ";":
            while i < n and text[i] != "\n":
                advance()
        elif c in "()":
            yield Token(c, line, col)
            advance()
        elif c == "|":
            start_line, start_col = line, col
            advance()
            chars = []
            while i < n and text[i] != "|":
                chars.append(text[i])
                advance()
            if i >= n:
                raise ParseError("unterminated quoted symbol", start_line, start_col)
            advance()
            yield Token("".join(chars), start_line, start_col, quoted=True)
        else:
            start_line, start_col = line, col
            chars = []
            while i < n and not text[i].isspace() and text[i] not in "();|":
                chars.append(text[i])
                advance()
            yield Token("".join(chars), start_line, start_col)


def read_sexprs(text: str) -> list[SExpr]:
    stack: list[SList] = []
    top: list[SExpr] = []
    for tok in tokenize(text):
        if tok.text == "(" and not tok.quoted:
            stack.append(SList([], tok.line, tok.column))
        elif tok.text == ")" and not tok.quoted:
            if not stack:
                raise ParseError("unexpected ')'", tok.line, tok.column)
            done = stack.pop()
            (stack[-1].items if stack else top).append(done)
        else:
            (stack[-1].items if stack else top).append(tok)
    if stack:
        raise ParseError("missing ')'", stack[-1].line, stack[-1].column)
    return top


def _where(e: SExpr) -> tuple[int, int]:
    return e.line, e.column


def _symbol(e: SExpr, what: str) -> str:
    if not isinstance(e, Token):
        raise ParseError(f"expected {what}", *_where(e))
    return e.text


class ProblemParser:
    """Build a Problem from source text, one ``_cmd_*`` handler per command."""

    def __init__(self, name: str = ""):
        self.name = name
        self.atoms = AtomTable()
        self.var_names: list[str] = []
        self.var_types: dict[int, Sort] = {}
        self.booleans: dict[str, int] = {}
        self.assertions: list[Formula] = []
        self.objective: LinearTerm | None = None
        self.maximize = False
        self.logic = "QF_LRA"
        self.commands = {
            "set-logic": self._cmd_set_logic,
            "set-info": self._cmd_ignore,
            "set-option": self._cmd_ignore,
            "declare-const": self._cmd_declare_const,
            "declare-fun": self._cmd_declare_fun,
            "assert": self._cmd_assert,
            "minimize": self._cmd_minimize,
            "maximize": self._cmd_maximize,
            "check-sat": self._cmd_ignore,
            "get-model": self._cmd_ignore,
            "get-objectives": self._cmd_ignore,
            "exit": self._cmd_ignore,
        }

    def parse(self, text: str) -> Problem:
        header = [
            line.lstrip(";").strip() for line in text.splitlines() if line.startswith(";")
        ]
        for cmd in read_sexprs(text):
            if not isinstance(cmd, SList) or not cmd.items:
                raise ParseError("expected a command", *_where(cmd))
            head = _symbol(cmd.items[0], "command name")
            handler = self.commands.get(head)
            if handler is None:
                raise ParseError(f"unsupported command '{head}'", *_where(cmd))
            handler(cmd)

        if self.objective is None:
            raise ParseError("missing (minimize ...) objective")

        formula = And(tuple(self.assertions)) if self.assertions else TRUE
        cnf = cnf_convert(formula, self.atoms)
        log.info(
            "Parsed %s: %d variables, %d atoms, %d clauses",
            self.name or "<problem>", len(self.var_names), len(self.atoms), len(cnf.clauses),
        )
        return Problem(
            cnf=cnf,
            objective=self.objective,
            var_names=list(self.var_names),
            var_types=dict(self.var_types),
            name=self.name,
            logic=self.logic,
            maximize=self.maximize,
            formula=formula,
            header=header,
        )

    # --- commands -------------------------------------------------------

    def _expect_args(self, cmd: SList, count: int):
        if len(cmd.items) != count + 1:
            head = cmd.items[0].text
            raise ParseError(f"'{head}' takes {count} argument(s)", *_where(cmd))

    def _cmd_ignore(self, cmd: SList):
        pass

    def _cmd_set_logic(self, cmd: SList):
        self._expect_args(cmd, 1)
        logic = _symbol(cmd.items[1], "logic name")
        if logic not in _LOGICS:
            raise ParseError(f"unsupported logic '{logic}'", *_where(cmd.items[1]))
        self.logic = logic

    def _declare(self, name_expr: SExpr, sort_expr: SExpr):
        name = _symbol(name_expr, "symbol")
        if name in self.booleans or name in self.var_names:
            raise ParseError(f"'{name}' declared twice", *_where(name_expr))
        sort_name = _symbol(sort_expr, "sort")
        try:
            sort = Sort(sort_name)
        except ValueError:
            raise ParseError(f"unsupported sort '{sort_name}'", *_where(sort_expr)) from None
        if sort is Sort.BOOL:
            self.booleans[name] = self.atoms.boolean(name).id
        else:
            self.var_types[len(self.var_names)] = sort
            self.var_names.append(name)

    def _cmd_declare_const(self, cmd: SList):
        """(declare-const <symbol> <sort>)"""
        self._expect_args(cmd, 2)
        self._declare(cmd.items[1], cmd.items[2])

    def _cmd_declare_fun(self, cmd: SList):
        """(declare-fun <symbol> () <sort>)"""
        self._expect_args(cmd, 3)
        params = cmd.items[2]
        if not isinstance(params, SList) or params.items:
            raise ParseError("only nullary functions are supported", *_where(params))
        self._declare(cmd.items[1], cmd.items[3])

    def _cmd_assert(self, cmd: SList):
        """(assert <formula>)"""
        self._expect_args(cmd, 1)
        self.assertions.append(self.formula(cmd.items[1]))

    def _set_objective(self, cmd: SList, maximize: bool):
        self._expect_args(cmd, 1)
        if self.objective is not None:
            raise ParseError("exactly one objective is supported", *_where(cmd))
        term = self.term(cmd.items[1])
        self.objective = -term if maximize else term
        self.maximize = maximize

    def _cmd_minimize(self, cmd: SList):
        self._set_objective(cmd, maximize=False)

    def _cmd_maximize(self, cmd: SList):
        self._set_objective(cmd, maximize=True)

    # --- formulas -------------------------------------------------------

    def formula(self, e: SExpr) -> Formula:
        if isinstance(e, Token):
            if e.text == "true":
                return TRUE
            if e.text == "false":
                return FALSE
            if e.text in self.booleans:
                return Lit(Literal(self.booleans[e.text]))
            if e.text in self.var_names:
                raise ParseError(f"'{e.text}' is not Boolean", *_where(e))
            raise ParseError(f"undeclared symbol '{e.text}'", *_where(e))

        if not e.items:
            raise ParseError("empty expression", *_where(e))
        head = _symbol(e.items[0], "operator")
        args = e.items[1:]
        if head == "and":
            return And(tuple(self.formula(a) for a in args))
        if head == "or":
            return Or(tuple(self.formula(a) for a in args))
        if head == "not":
            if len(args) != 1:
                raise ParseError("'not' takes one argument", *_where(e))
            return Not(self.formula(args[0]))
        if head == "=>":
            if len(args) < 2:
                raise ParseError("'=>' takes at least two arguments", *_where(e))
            *premises, conclusion = [self.formula(a) for a in args]
            return implies(And(tuple(premises)), conclusion)
        if head in ("<=", "<", ">=", ">"):
            return self._comparison(head, args, e)
        if head == "=":
            if len(args) < 2:
                raise ParseError("'=' takes at least two arguments", *_where(e))
            if self._is_boolean(args[0]):
                parts = [self.formula(a) for a in args]
                return And(tuple(iff(a, b) for a, b in zip(parts, parts[1:])))
            terms = [self.term(a) for a in args]
            return And(tuple(self._equality(a - b) for a, b in zip(terms, terms[1:])))
        raise ParseError(f"unsupported operator '{head}'", *_where(e))

    def _is_boolean(self, e: SExpr) -> bool:
        if isinstance(e, Token):
            return e.text in ("true", "false") or e.text in self.booleans
        if e.items and isinstance(e.items[0], Token):
            return e.items[0].text in ("and", "or", "not", "=>", "<=", "<", ">=", ">", "=")
        return False

    def _atom(self, term: LinearTerm, rel: str) -> Formula:
        normalized, relation = normalize_constraint(term, rel)
        if normalized.is_constant:
            return Const(relation is Relation.LE)
        return Lit(Literal(self.atoms.linear(normalized, relation).id))

    def _equality(self, diff: LinearTerm) -> Formula:
        return And((self._atom(diff, "<="), self._atom(-diff, "<=")))

    def _comparison(self, op: str, args: list[SExpr], e: SList) -> Formula:
        if len(args) < 2:
            raise ParseError(f"'{op}' takes at least two arguments", *_where(e))
        terms = [self.term(a) for a in args]
        return And(tuple(self._atom(a - b, op) for a, b in zip(terms, terms[1:])))

    # --- terms ----------------------------------------------------------

    def term(self, e: SExpr) -> LinearTerm:
        if isinstance(e, Token):
            if not e.quoted and _NUMERAL.match(e.text):
                return LinearTerm.const(Fraction(e.text))
            if e.text in self.var_names:
                return LinearTerm.var(self.var_names.index(e.text))
            if e.text in self.booleans:
                raise ParseError(f"'{e.text}' is Boolean, not arithmetic", *_where(e))
            raise ParseError(f"undeclared variable '{e.text}'", *_where(e))

        if not e.items:
            raise ParseError("empty expression", *_where(e))
        head = _symbol(e.items[0], "operator")
        args = [self.term(a) for a in e.items[1:]]
        if not args:
            raise ParseError(f"'{head}' needs arguments", *_where(e))
        if head == "+":
            total = LinearTerm()
            for a in args:
                total = total + a
            return total
        if head == "-":
            if len(args) == 1:
                return -args[0]
            total = args[0]
            for a in args[1:]:
                total = total - a
            return total
        if head == "*":
            product = LinearTerm.const(1)
            for a in args:
                if a.is_constant:
                    product = product.scale(a.constant)
                elif product.is_constant:
                    product = a.scale(product.constant)
                else:
                    raise ParseError("non-linear term", *_where(e))
            return product
        if head == "/":
            if len(args) != 2 or not args[1].is_constant:
                raise ParseError("division only by a constant", *_where(e))
            if args[1].constant == 0:
                raise ParseError("division by zero", *_where(e))
            return args[0].scale(1 / args[1].constant)
        if head == "to_real" and len(args) == 1:
            return args[0]
        raise ParseError(f"unsupported arithmetic operator '{head}'", *_where(e))


def parse(text: str, name: str = "") -> Problem:
    return ProblemParser(name).parse(text)


def parse_file(path: str | Path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text (byte {e.start})") from e
    return parse(text, name=path.stem)
