"""
Exception hierarchy shared by every stage of the toolchain.
"""
from typing import Iterable, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .ast import SourceSpan


class PlpError(Exception):
    """Base class for all toolchain errors."""


class ParseError(PlpError):
    def __init__(self, span: "SourceSpan", message: str, expected: Iterable[str] = ()):
        if not message:
            raise ValueError("ParseError needs a message")
        self.span = span
        self.message = message
        self.expected = tuple(sorted(set(expected)))
        super().__init__(f"{span.line}:{span.column}: {message}")


class AstInvariantError(PlpError, ValueError):
    """An AST constructor refused a node that breaks a syntactic invariant."""


class AngleEvaluationError(PlpError, ArithmeticError):
    pass


class SizeError(PlpError):
    """Sizes or input states that do not fit the program."""


class BottomError(PlpError):
    def __init__(self, basis_index: int, steps: int = 0):
        self.basis_index = basis_index
        self.steps = steps
        super().__init__(f"program reaches an error on basis state {basis_index}")


class CompileError(PlpError):
    pass


class CompilerBugError(CompileError):
    pass


class CircuitError(PlpError):
    pass


class AncillaError(CircuitError):
    pass


class CircuitFormatError(CircuitError):
    def __init__(self, message: str, record: Optional[int] = None):
        self.record = record
        where = f"gates[{record}]: " if record is not None else ""
        super().__init__(f"{where}{message}")
