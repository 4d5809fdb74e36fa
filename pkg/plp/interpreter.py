"""
Big-step execution of PLP programs over a statevector.

Expressions are evaluated against ``f``, a map from qubit-list variables
to pointer tuples; pointer ``0`` and the empty list are the in-band error
values. Statements run against a :class:`Context` (``f`` plus the sets of
accessible pointers) and return an :class:`Outcome` with a step meter that
counts call-rule applications.
"""
import logging
import math
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import ast
from .config import plp_config
from .errors import AngleEvaluationError, AstInvariantError, BottomError, SizeError
from .statevector import DenseState, State, make_state

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi

Pointers = Tuple[int, ...]
Bindings = Mapping[str, Sequence[int]]

_COMPARE = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


class Lengths(Mapping[str, int]):
    """Ordered variable lengths; the order fixes the global wire layout."""

    def __init__(self, sizes: Union[Mapping[str, int], Sequence[Tuple[str, int]]]):
        items = list(sizes.items()) if isinstance(sizes, Mapping) else list(sizes)
        self._sizes: Dict[str, int] = {}
        self._offsets: Dict[str, int] = {}
        total = 0
        for name, size in items:
            if not isinstance(size, int) or size < 0:
                raise SizeError(f"length of '{name}' must be a natural number, got {size!r}")
            if name in self._sizes:
                raise SizeError(f"length of '{name}' given twice")
            self._sizes[name] = size
            self._offsets[name] = total
            total += size
        self.total = total

    @classmethod
    def for_program(cls, program: ast.Program, sizes: Mapping[str, int]) -> "Lengths":
        if isinstance(sizes, Lengths) and list(sizes) == list(program.vars):
            return sizes
        unknown = [name for name in sizes if name not in program.vars]
        if unknown:
            raise SizeError(f"size given for unknown variable(s) {', '.join(unknown)}")
        missing = [name for name in program.vars if name not in sizes]
        if missing:
            raise SizeError(f"no size given for variable(s) {', '.join(missing)}")
        return cls([(name, sizes[name]) for name in program.vars])

    def __getitem__(self, name: str) -> int:
        return self._sizes[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._sizes)

    def __len__(self) -> int:
        return len(self._sizes)

    def offset(self, name: str) -> int:
        """Number of wires belonging to variables before ``name``."""
        return self._offsets[name]

    def wire(self, name: str, pointer: int) -> int:
        return self._offsets[name] + pointer

    def __repr__(self) -> str:
        return f"Lengths({self._sizes!r})"


@dataclass(frozen=True)
class Context:
    f: Mapping[str, Pointers]
    accessible: Mapping[str, FrozenSet[int]]

    @classmethod
    def initial(cls, lengths: Lengths) -> "Context":
        f = {name: tuple(range(1, size + 1)) for name, size in lengths.items()}
        return cls(f, {name: frozenset(pointers) for name, pointers in f.items()})

    def without(self, name: str, pointer: int) -> "Context":
        accessible = dict(self.accessible)
        accessible[name] = accessible[name] - {pointer}
        return Context(self.f, accessible)


class Status(Enum):
    TOP = "top"
    BOTTOM = "bottom"


@dataclass
class Outcome:
    status: Status
    state: Optional[State]
    steps: int

    @property
    def ok(self) -> bool:
        return self.status is Status.TOP


# --- Expressions ---

def eval_int(expr: ast.IntExpr, f: Bindings, env: Optional[Mapping[str, int]] = None) -> int:
    if isinstance(expr, ast.Const):
        return expr.value
    if isinstance(expr, ast.AddConst):
        value = eval_int(expr.expr, f, env)
        return value + expr.k if expr.sign == "+" else value - expr.k
    if isinstance(expr, ast.HalfCeil):
        return -(-eval_int(expr.expr, f, env) // 2)
    if isinstance(expr, ast.SizeOf):
        return len(eval_list(expr.lst, f))
    if isinstance(expr, ast.IntVar):
        return (env or {})[expr.name]
    if isinstance(expr, ast.NegIndex):
        raise AstInvariantError("negative index outside of a list; desugar first")
    raise TypeError(f"not an integer expression: {expr!r}")


def eval_list(lst: ast.ListExpr, f: Bindings) -> Pointers:
    if isinstance(lst, ast.QVar):
        return tuple(f[lst.name])
    if isinstance(lst, ast.Remove):
        pointers = eval_list(lst.lst, f)
        k = eval_int(lst.index, f)
        if not 1 <= k <= len(pointers):
            return ()
        return pointers[:k - 1] + pointers[k:]
    if isinstance(lst, (ast.FirstHalf, ast.SecondHalf)):
        pointers = eval_list(lst.lst, f)
        if len(pointers) <= 1:
            return ()
        middle = -(-len(pointers) // 2)
        return pointers[:middle] if isinstance(lst, ast.FirstHalf) else pointers[middle:]
    if isinstance(lst, ast.RemoveMany):
        # All indices read the original list; any one out of range is the error value.
        pointers = eval_list(lst.lst, f)
        drop = set()
        for index in lst.indices:
            if isinstance(index, ast.NegIndex):
                index = ast.negative_index(lst.lst, index.n)
            k = eval_int(index, f)
            if not 1 <= k <= len(pointers):
                return ()
            drop.add(k)
        return tuple(p for position, p in enumerate(pointers, 1) if position not in drop)
    raise TypeError(f"not a list expression: {lst!r}")


def eval_qubit(qubit: ast.QubitExpr, f: Bindings) -> int:
    pointers = eval_list(qubit.base, f)
    index = qubit.index
    if isinstance(index, ast.NegIndex):
        index = ast.negative_index(qubit.base, index.n)
    k = eval_int(index, f)
    if not 1 <= k <= len(pointers):
        return 0
    return pointers[k - 1]


def eval_bool(expr: ast.BoolExpr, f: Bindings) -> bool:
    if isinstance(expr, ast.BoolLit):
        return expr.value
    if isinstance(expr, ast.Cmp):
        return _COMPARE[expr.op](eval_int(expr.lhs, f), eval_int(expr.rhs, f))
    if isinstance(expr, ast.And):
        return eval_bool(expr.left, f) and eval_bool(expr.right, f)
    if isinstance(expr, ast.Or):
        return eval_bool(expr.left, f) or eval_bool(expr.right, f)
    if isinstance(expr, ast.Not):
        return not eval_bool(expr.expr, f)
    raise TypeError(f"not a boolean expression: {expr!r}")


def _angle_value(expr: ast.AngleExpr, param: str, n: int) -> float:
    if isinstance(expr, ast.ANum):
        return float(expr.value)
    if isinstance(expr, ast.APi):
        return math.pi
    if isinstance(expr, ast.AVar):
        if expr.name != param:
            raise AngleEvaluationError(f"unbound name '{expr.name}' in angle function")
        return float(n)
    if isinstance(expr, ast.ANeg):
        return -_angle_value(expr.expr, param, n)
    left = _angle_value(expr.left, param, n)
    right = _angle_value(expr.right, param, n)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0:
        raise AngleEvaluationError(f"division by zero in angle function at {param} = {n}")
    return left / right


def eval_angle(angle: Optional[ast.AngleFn], n: int) -> float:
    """The rotation angle ``g(n)`` folded into [0, 2*pi)."""
    value = float(n) if angle is None else _angle_value(angle.body, angle.param, n)
    theta = value % TWO_PI
    if math.isclose(theta, TWO_PI, rel_tol=0.0, abs_tol=1e-12):
        theta = 0.0
    return theta


def gate_matrix(gate: str, angle: Optional[ast.AngleFn], n: int) -> np.ndarray:
    if gate == "NOT":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    theta = eval_angle(angle, n)
    if gate == "Ph":
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    if gate == "RY":
        return np.array([[math.cos(theta), -math.sin(theta)],
                         [math.sin(theta), math.cos(theta)]], dtype=complex)
    raise AstInvariantError(f"unknown gate {gate!r}")


# --- Statements ---

class Interpreter:
    """Runs desugared statements of one program at fixed lengths.

    Passing ``state=None`` runs the classical meter-only mode: only the
    context is tracked, both branches of every qcase are explored, and
    status and meter come out the same as with a real state.
    """

    def __init__(self, program: ast.Program, lengths: Lengths):
        self.program = program
        self.lengths = lengths
        self._procedures = program.procedures
        self._bodies: Dict[Tuple[str, Tuple[ast.ListExpr, ...]], ast.Statement] = {}

    def _instantiate(self, proc: str, args: Tuple[ast.ListExpr, ...]) -> ast.Statement:
        key = (proc, args)
        body = self._bodies.get(key)
        if body is None:
            decl = self._procedures[proc]
            body = ast.substitute(decl.body, dict(zip(decl.params, args)))
            self._bodies[key] = body
        return body

    def resolve(self, qubit: ast.QubitExpr, ctx: Context) -> Optional[Tuple[int, str, int]]:
        """(global wire, variable, pointer) of an accessible qubit, or None."""
        name = ast.list_var(qubit.base)
        pointer = eval_qubit(qubit, ctx.f)
        if pointer == 0 or pointer not in ctx.accessible[name]:
            return None
        return self.lengths.wire(name, pointer), name, pointer

    def exec_statement(self, stmt: ast.Statement, state: Optional[State], ctx: Context) -> Outcome:
        if isinstance(stmt, ast.Skip):
            return Outcome(Status.TOP, state, 0)

        if isinstance(stmt, ast.Seq):
            current, steps = state, 0
            for part in ast.statements(stmt):
                outcome = self.exec_statement(part, current, ctx)
                steps += outcome.steps
                if not outcome.ok:
                    return Outcome(Status.BOTTOM, state, steps)
                current = outcome.state
            return Outcome(Status.TOP, current, steps)

        if isinstance(stmt, ast.Apply):
            target = self.resolve(stmt.target, ctx)
            if target is None:
                return Outcome(Status.BOTTOM, state, 0)
            n = eval_int(stmt.arg, ctx.f) if stmt.arg is not None else 0
            try:
                matrix = gate_matrix(stmt.gate, stmt.angle, n)
            except AngleEvaluationError as e:
                logger.debug(f"Angle evaluation failed: {e}")
                return Outcome(Status.BOTTOM, state, 0)
            if state is None:
                return Outcome(Status.TOP, None, 0)
            return Outcome(Status.TOP, state.apply(matrix, target[0]), 0)

        if isinstance(stmt, ast.If):
            branch = stmt.then if eval_bool(stmt.cond, ctx.f) else stmt.orelse
            outcome = self.exec_statement(branch, state, ctx)
            return outcome if outcome.ok else Outcome(Status.BOTTOM, state, outcome.steps)

        if isinstance(stmt, ast.QCase):
            control = self.resolve(stmt.control, ctx)
            if control is None:
                return Outcome(Status.BOTTOM, state, 0)
            wire, name, pointer = control
            inner = ctx.without(name, pointer)
            zero_in = None if state is None else state.project(wire, 0)
            one_in = None if state is None else state.project(wire, 1)
            zero = self.exec_statement(stmt.zero, zero_in, inner)
            one = self.exec_statement(stmt.one, one_in, inner)
            steps = max(zero.steps, one.steps)
            if not (zero.ok and one.ok):
                return Outcome(Status.BOTTOM, state, steps)
            if state is None:
                return Outcome(Status.TOP, None, steps)
            return Outcome(Status.TOP, zero.state.merge(one.state), steps)

        if isinstance(stmt, ast.Call):
            if any(not eval_list(arg, ctx.f) for arg in stmt.args):
                return Outcome(Status.TOP, state, 1)
            body = self._instantiate(stmt.proc, stmt.args)
            outcome = self.exec_statement(body, state, ctx)
            if not outcome.ok:
                return Outcome(Status.BOTTOM, state, outcome.steps + 1)
            return Outcome(Status.TOP, outcome.state, outcome.steps + 1)

        raise AstInvariantError(f"statement {type(stmt).__name__} must be desugared before execution")


def _prepare(program: ast.Program, lengths: Mapping[str, int]) -> Tuple[ast.Program, Lengths]:
    core = ast.desugar(program)
    return core, Lengths.for_program(core, lengths)


def _as_state(value: Union[State, np.ndarray], num_wires: int) -> State:
    if isinstance(value, np.ndarray):
        return make_state(num_wires, value, sparse=num_wires > plp_config.interpreter.dense_qubit_limit)
    if value.num_wires != num_wires:
        raise SizeError(f"input state has {value.num_wires} wire(s), program needs {num_wires}")
    return value


def run_program(program: ast.Program, lengths: Mapping[str, int],
                input_state: Union[State, np.ndarray]) -> Outcome:
    core, lengths = _prepare(program, lengths)
    state = _as_state(input_state, lengths.total)
    outcome = Interpreter(core, lengths).exec_statement(core.main, state, Context.initial(lengths))
    logger.info(f"Run finished: {outcome.status.value}, {outcome.steps} step(s) on {lengths.total} qubit(s).")
    return outcome


def meter_program(program: ast.Program, lengths: Mapping[str, int]) -> Outcome:
    """Status and meter of a run, computed without a statevector."""
    core, lengths = _prepare(program, lengths)
    outcome = Interpreter(core, lengths).exec_statement(core.main, None, Context.initial(lengths))
    logger.debug(f"Meter-only run: {outcome.status.value}, {outcome.steps} step(s).")
    return outcome


def extract_unitary(program: ast.Program, lengths: Mapping[str, int], workers: Optional[int] = None) -> np.ndarray:
    """The 2^N x 2^N matrix of a program; column k is the run on basis state k."""
    core, lengths = _prepare(program, lengths)
    size = lengths.total
    limit = plp_config.interpreter.extract_max_qubits
    if size > limit:
        raise SizeError(f"unitary extraction is limited to {limit} qubit(s), program has {size}")
    interpreter = Interpreter(core, lengths)
    start = Context.initial(lengths)

    def column(index: int) -> np.ndarray:
        outcome = interpreter.exec_statement(core.main, DenseState.basis(size, index), start)
        if not outcome.ok:
            raise BottomError(index, outcome.steps)
        return outcome.state.to_array()

    with ThreadPoolExecutor(max_workers=workers or plp_config.interpreter.workers) as pool:
        columns = list(pool.map(column, range(2 ** size)))
    logger.debug(f"Extracted a {2 ** size}x{2 ** size} unitary.")
    return np.column_stack(columns)
