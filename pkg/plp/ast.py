"""
Abstract syntax of PLP programs.

Every node is an immutable dataclass. Source positions ride along in a
keyword-only ``span`` field that never takes part in equality, so two
programs parsed from differently formatted text compare equal.

Surface-only nodes (``CNot``, ``Swap``, ``Toffoli``, ``QCaseMulti`` and
``NegIndex``) disappear in :func:`desugar`. ``RemoveMany`` stays: its
indices are only known once the list is evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import AstInvariantError

GATES = ("Ph", "RY", "NOT")
COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class SourceSpan:
    begin: int = 0
    end: int = 0
    line: int = 0
    column: int = 0

    def __post_init__(self):
        if self.begin > self.end:
            raise ValueError(f"span begins after it ends ({self.begin} > {self.end})")


NO_SPAN = SourceSpan()


@dataclass(frozen=True)
class Node:
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


# --- Integers ---

@dataclass(frozen=True)
class IntVar(Node):
    name: str


@dataclass(frozen=True)
class Const(Node):
    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or self.value < 0:
            raise AstInvariantError(f"integer literal must be a natural number, got {self.value!r}")


@dataclass(frozen=True)
class AddConst(Node):
    expr: "IntExpr"
    k: int
    sign: str = "+"

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise AstInvariantError(f"unknown sign {self.sign!r}")
        if not isinstance(self.k, int) or self.k < 0:
            raise AstInvariantError(f"constant operand must be a natural number, got {self.k!r}")


@dataclass(frozen=True)
class HalfCeil(Node):
    expr: "IntExpr"


@dataclass(frozen=True)
class SizeOf(Node):
    lst: "ListExpr"


@dataclass(frozen=True)
class NegIndex(Node):
    """``l[-n]``: the n-th pointer counted from the end of the enclosing list."""
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise AstInvariantError(f"negative index must be at least 1, got {self.n!r}")


IntExpr = Union[IntVar, Const, AddConst, HalfCeil, SizeOf, NegIndex]


# --- Booleans ---

@dataclass(frozen=True)
class Cmp(Node):
    lhs: IntExpr
    op: str
    rhs: IntExpr

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise AstInvariantError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class And(Node):
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or(Node):
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Not(Node):
    expr: "BoolExpr"


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


BoolExpr = Union[Cmp, And, Or, Not, BoolLit]


# --- Qubit lists and qubits ---

@dataclass(frozen=True)
class QVar(Node):
    name: str


@dataclass(frozen=True)
class Remove(Node):
    lst: "ListExpr"
    index: IntExpr


@dataclass(frozen=True)
class FirstHalf(Node):
    lst: "ListExpr"


@dataclass(frozen=True)
class SecondHalf(Node):
    lst: "ListExpr"


@dataclass(frozen=True)
class RemoveMany(Node):
    lst: "ListExpr"
    indices: Tuple[IntExpr, ...]

    def __post_init__(self):
        if len(self.indices) < 2:
            raise AstInvariantError("multi-removal needs at least two indices")


ListExpr = Union[QVar, Remove, FirstHalf, SecondHalf, RemoveMany]


@dataclass(frozen=True)
class QubitExpr(Node):
    base: ListExpr
    index: IntExpr


# --- Angle functions ---

@dataclass(frozen=True)
class ANum(Node):
    value: Union[int, float]

    def __post_init__(self):
        if self.value < 0:
            raise AstInvariantError(f"angle literal must be non-negative, got {self.value!r}")


@dataclass(frozen=True)
class APi(Node):
    pass


@dataclass(frozen=True)
class AVar(Node):
    name: str


@dataclass(frozen=True)
class ANeg(Node):
    expr: "AngleExpr"


@dataclass(frozen=True)
class ABin(Node):
    op: str
    left: "AngleExpr"
    right: "AngleExpr"

    def __post_init__(self):
        if self.op not in ("+", "-", "*", "/"):
            raise AstInvariantError(f"unknown angle operator {self.op!r}")


AngleExpr = Union[ANum, APi, AVar, ANeg, ABin]


@dataclass(frozen=True)
class AngleFn(Node):
    param: str
    body: AngleExpr


# --- Statements ---

@dataclass(frozen=True)
class Skip(Node):
    pass


@dataclass(frozen=True)
class Apply(Node):
    target: QubitExpr
    gate: str
    angle: Optional[AngleFn] = None
    arg: Optional[IntExpr] = None

    def __post_init__(self):
        if self.gate not in GATES:
            raise AstInvariantError(f"unknown gate {self.gate!r}")


@dataclass(frozen=True)
class Seq(Node):
    first: "Statement"
    second: "Statement"


@dataclass(frozen=True)
class If(Node):
    cond: BoolExpr
    then: "Statement"
    orelse: "Statement"


@dataclass(frozen=True)
class QCase(Node):
    control: QubitExpr
    zero: "Statement"
    one: "Statement"


@dataclass(frozen=True)
class Call(Node):
    proc: str
    args: Tuple[ListExpr, ...]

    def __post_init__(self):
        seen: set = set()
        for arg in self.args:
            names = vars_of(arg)
            if names & seen:
                raise AstInvariantError("overlapping call arguments")
            seen |= names


@dataclass(frozen=True)
class CNot(Node):
    control: QubitExpr
    target: QubitExpr


@dataclass(frozen=True)
class Swap(Node):
    first: QubitExpr
    second: QubitExpr


@dataclass(frozen=True)
class Toffoli(Node):
    first: QubitExpr
    second: QubitExpr
    target: QubitExpr


@dataclass(frozen=True)
class QCaseMulti(Node):
    """``qcase q1, ..., qk of {b1...bk -> S}``; ``branches[i]`` runs when the controls read ``i`` in binary."""
    controls: Tuple[QubitExpr, ...]
    branches: Tuple["Statement", ...]

    def __post_init__(self):
        if len(self.controls) < 2:
            raise AstInvariantError("multi-qubit qcase needs at least two controls")
        if len(self.branches) != 2 ** len(self.controls):
            raise AstInvariantError(
                f"qcase over {len(self.controls)} qubits needs {2 ** len(self.controls)} branches")


Statement = Union[Skip, Apply, Seq, If, QCase, Call, CNot, Swap, Toffoli, QCaseMulti]


@dataclass(frozen=True)
class ProcDecl(Node):
    name: str
    params: Tuple[str, ...]
    body: Statement


@dataclass(frozen=True)
class Program(Node):
    decls: Tuple[ProcDecl, ...]
    main: Statement
    vars: Tuple[str, ...]

    def decl(self, name: str) -> Optional[ProcDecl]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    @property
    def procedures(self) -> Dict[str, ProcDecl]:
        # First declaration wins; duplicates are a well-formedness diagnostic.
        table: Dict[str, ProcDecl] = {}
        for d in self.decls:
            table.setdefault(d.name, d)
        return table


# --- Generic traversal ---

def children(node: Node) -> Iterator[Node]:
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal of ``node`` and everything below it."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(list(children(current))))


def map_children(node: Node, fn: Callable[[Node], Node]) -> Node:
    changes = {}
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            changes[f.name] = fn(value)
        elif isinstance(value, tuple) and any(isinstance(item, Node) for item in value):
            changes[f.name] = tuple(fn(item) if isinstance(item, Node) else item for item in value)
    return replace(node, **changes) if changes else node


def vars_of(node: Node) -> FrozenSet[str]:
    """The qubit-list variables occurring syntactically in ``node``."""
    return frozenset(n.name for n in walk(node) if isinstance(n, QVar))


def list_var(lst: ListExpr) -> str:
    """The single variable a list expression is built on."""
    while not isinstance(lst, QVar):
        lst = lst.lst
    return lst.name


def sequence(stmts: Sequence[Statement], span: SourceSpan = NO_SPAN) -> Statement:
    stmts = list(stmts)
    if not stmts:
        return Skip(span=span)
    result = stmts[-1]
    for stmt in reversed(stmts[:-1]):
        result = Seq(stmt, result, span=stmt.span if stmt.span is not NO_SPAN else span)
    return result


def statements(stmt: Statement) -> List[Statement]:
    if isinstance(stmt, Seq):
        return statements(stmt.first) + statements(stmt.second)
    return [stmt]


def substitute(node: Node, mapping: Dict[str, ListExpr]) -> Node:
    """Simultaneously replace qubit-list variables by list expressions."""
    if isinstance(node, QVar):
        return mapping.get(node.name, node)
    return map_children(node, lambda child: substitute(child, mapping))


# --- Desugaring ---

def negative_index(base: ListExpr, n: int, span: SourceSpan = NO_SPAN) -> IntExpr:
    """``base[-n]`` is ``base[|base| - n + 1]``."""
    return AddConst(AddConst(SizeOf(base, span=span), n, "-", span=span), 1, "+", span=span)


def _resolve_index(base: ListExpr, index: IntExpr) -> IntExpr:
    if isinstance(index, NegIndex):
        return negative_index(base, index.n, index.span)
    return index


def _desugar_node(node: Node) -> Node:
    span = node.span
    if isinstance(node, QubitExpr) and isinstance(node.index, NegIndex):
        return QubitExpr(node.base, _resolve_index(node.base, node.index), span=span)
    if isinstance(node, Remove) and isinstance(node.index, NegIndex):
        return Remove(node.lst, _resolve_index(node.lst, node.index), span=span)
    if isinstance(node, RemoveMany):
        if not any(isinstance(index, NegIndex) for index in node.indices):
            return node
        return RemoveMany(node.lst, tuple(_resolve_index(node.lst, index) for index in node.indices), span=span)
    if isinstance(node, CNot):
        return _cnot(node.control, node.target, span)
    if isinstance(node, Swap):
        a, b = node.first, node.second
        return sequence([_cnot(a, b, span), _cnot(b, a, span), _cnot(a, b, span)], span)
    if isinstance(node, Toffoli):
        return QCase(node.first, Skip(span=span), _cnot(node.second, node.target, span), span=span)
    if isinstance(node, QCaseMulti):
        return _nest_qcase(node.controls, node.branches, span)
    return node


def _cnot(control: QubitExpr, target: QubitExpr, span: SourceSpan) -> QCase:
    return QCase(control, Skip(span=span), Apply(target, "NOT", span=span), span=span)


def _nest_qcase(controls: Sequence[QubitExpr], branches: Sequence[Statement], span: SourceSpan) -> Statement:
    if not controls:
        return branches[0]
    half = len(branches) // 2
    return QCase(controls[0],
                 _nest_qcase(controls[1:], branches[:half], span),
                 _nest_qcase(controls[1:], branches[half:], span),
                 span=span)


def desugar(node: Node) -> Node:
    """Rewrite every surface construct into the core grammar."""
    node = map_children(node, desugar)
    return _desugar_node(node)


def is_core(node: Node) -> bool:
    sugar = (CNot, Swap, Toffoli, QCaseMulti, NegIndex)
    return not any(isinstance(n, sugar) for n in walk(node))
