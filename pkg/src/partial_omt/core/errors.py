"""
Exception hierarchy shared by every partial_omt module
"""
from __future__ import annotations


class OmtError(Exception):
    """Base class; the CLI turns these into exit code 1."""


class ParseError(OmtError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class TheoryError(OmtError):
    """Misuse of a theory solver (non-theory literal, minimize/propose ordering)."""


class UnassignedVariableError(OmtError):
    def __init__(self, var: int, name: str | None = None):
        self.var = var
        super().__init__(f"variable {name or var} is not assigned by the model")


class StackUnderflowError(OmtError):
    pass


class ReductionError(OmtError):
    """Assignment handed to a reduction strategy violates its precondition."""


class SoundnessError(OmtError):
    """A learning step was refused because its premise does not hold."""


class OracleLimitError(OmtError):
    """Instance too large for brute-force enumeration."""
