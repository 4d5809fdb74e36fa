"""
Compilation of PLP programs to circuits.

Every procedure body is compiled as a *body instance*: statements become
gates, and calls to procedures in the caller's own recursive component
become merge sites. When a body instance is finished its merge points are
resolved: sites with the same key (procedure, argument sizes) share one
compiled body behind an anchor ancilla, and sites whose wires differ from
the canonical site are routed onto it by a controlled permutation.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import ast
from .analysis import call_graph, check_well_formed
from .circuit import (PERM_MODES, AncillaPool, Circuit, Control, Gate, build_controlled_permutation,
                      gate_counts, depth, routing_permutation, simulate_circuit, variable_labels)
from .config import plp_config
from .errors import AngleEvaluationError, CompileError, CompilerBugError
from .interpreter import (Lengths, eval_angle, eval_bool, eval_int, eval_list, eval_qubit, meter_program,
                          run_program)
from .statevector import DenseState

logger = logging.getLogger(__name__)

STRATEGIES = ("merge", "inline")

_KINDS = {"NOT": "X", "Ph": "PH", "RY": "RY"}

Wires = Tuple[int, ...]
MergeKey = Tuple[str, Tuple[int, ...]]


@dataclass(frozen=True)
class CompileCtx:
    f: Mapping[str, Wires]  # 1-based global wires, as in the interpreter
    controls: Tuple[Control, ...]
    proc: Optional[str]


@dataclass(frozen=True)
class Site:
    proc: str
    args: Tuple[Wires, ...]
    controls: Tuple[Control, ...]

    @property
    def key(self) -> MergeKey:
        return self.proc, tuple(len(a) for a in self.args)

    @property
    def wires(self) -> Wires:
        return tuple(w for arg in self.args for w in arg)


@dataclass
class MergePoint:
    sites: List[Site]


Item = Union[Gate, MergePoint]


@dataclass
class MergeGroup:
    key: MergeKey
    anchor: Optional[int]
    canonical: Site
    sites: List[Site]
    selectors: Dict[int, int] = field(default_factory=dict)


@dataclass
class GroupRecord:
    """What one resolved merge group cost; ``level`` 0 is the outermost body instance."""
    key: MergeKey
    level: int
    sites: int
    anchored: bool
    selectors: int
    permutation_gates: int


class MergeEnv:
    """Scope of one body instance: its nesting level and the longest key chain below it."""

    def __init__(self, level: int = 0):
        self.level = level
        self.chain = 0

    def group_sites(self, sites: Sequence[Site]) -> List[List[Site]]:
        """Sites grouped by key in first-seen order."""
        grouped: Dict[MergeKey, List[Site]] = {}
        for site in sites:
            grouped.setdefault(site.key, []).append(site)
        return list(grouped.values())


@dataclass
class CompileReport:
    n: int
    size: int
    depth: int
    ancillas: int
    key_chain: int
    counts: Dict[str, int]
    groups: List[GroupRecord]
    perm_mode: str
    strategy: str

    def tsv_row(self) -> str:
        return f"{self.n}\t{self.size}\t{self.depth}\t{self.ancillas}\t{self.key_chain}"


def orthogonal(first: Site, second: Site) -> bool:
    """Two sites never fire together: some wire controls them with opposite polarity."""
    return any(a.wire == b.wire and a.negative != b.negative
               for a in first.controls for b in second.controls)


class Compiler:
    def __init__(self, program: ast.Program, lengths: Mapping[str, int],
                 perm_mode: Optional[str] = None, strategy: Optional[str] = None):
        self.program = ast.desugar(program)
        self.lengths = Lengths.for_program(self.program, lengths)
        self.perm_mode = perm_mode or plp_config.compiler.perm_mode
        self.strategy = strategy or plp_config.compiler.strategy
        if self.perm_mode not in PERM_MODES:
            raise CompileError(f"unknown permutation mode '{self.perm_mode}'")
        if self.strategy not in STRATEGIES:
            raise CompileError(f"unknown strategy '{self.strategy}'")
        self.call_graph = call_graph(self.program)
        self.procedures = self.program.procedures
        self.pool = AncillaPool(self.lengths.total)
        self.records: List[GroupRecord] = []
        self.key_chain = 0

    def _check(self):
        diagnostics = check_well_formed(self.program)
        if diagnostics:
            raise CompileError(f"program is not well formed: {diagnostics[0].message}")
        outcome = meter_program(self.program, self.lengths)
        if not outcome.ok:
            raise CompileError(f"program reaches an error at sizes {dict(self.lengths)}")

    def compile(self) -> Circuit:
        self._check()
        f = {}
        for name, size in self.lengths.items():
            offset = self.lengths.offset(name)
            f[name] = tuple(range(offset + 1, offset + size + 1))
        env = MergeEnv()
        items = self.compile_statement(self.program.main, CompileCtx(f, (), None), env)
        gates = self._resolve(items, env)
        self.key_chain = env.chain
        ancillas = self.pool.high_water
        logger.info(f"Compiled {len(gates)} gate(s) on {self.lengths.total} input and {ancillas} ancilla wire(s).")
        return Circuit(self.lengths.total, ancillas, gates, variable_labels(self.lengths, ancillas))

    def report(self, circuit: Circuit) -> CompileReport:
        return CompileReport(
            n=circuit.input_wires,
            size=len(circuit.gates),
            depth=depth(circuit.gates),
            ancillas=circuit.ancilla_wires,
            key_chain=self.key_chain,
            counts=gate_counts(circuit.gates),
            groups=self.records,
            perm_mode=self.perm_mode,
            strategy=self.strategy,
        )

    # --- Statements ---

    def _wire(self, qubit: ast.QubitExpr, ctx: CompileCtx) -> int:
        wire = eval_qubit(qubit, ctx.f)
        if wire == 0:
            raise CompilerBugError("qubit expression out of range after the error pre-pass")
        return wire - 1

    def compile_statement(self, stmt: ast.Statement, ctx: CompileCtx, env: MergeEnv) -> List[Item]:
        if isinstance(stmt, ast.Skip):
            return []
        if isinstance(stmt, ast.Seq):
            items: List[Item] = []
            for part in ast.statements(stmt):
                items.extend(self.compile_statement(part, ctx, env))
            return items
        if isinstance(stmt, ast.Apply):
            target = self._wire(stmt.target, ctx)
            if stmt.gate == "NOT":
                return [Gate("X", (target,), ctx.controls)]
            n = eval_int(stmt.arg, ctx.f) if stmt.arg is not None else 0
            try:
                theta = eval_angle(stmt.angle, n)
            except AngleEvaluationError as e:
                raise CompileError(str(e)) from e
            return [Gate(_KINDS[stmt.gate], (target,), ctx.controls, theta)]
        if isinstance(stmt, ast.If):
            branch = stmt.then if eval_bool(stmt.cond, ctx.f) else stmt.orelse
            return self.compile_statement(branch, ctx, env)
        if isinstance(stmt, ast.QCase):
            return self._compile_qcase(stmt, ctx, env)
        if isinstance(stmt, ast.Call):
            return self.compile_call(stmt, ctx, env)
        raise CompilerBugError(f"statement {type(stmt).__name__} survived desugaring")

    def _compile_qcase(self, stmt: ast.QCase, ctx: CompileCtx, env: MergeEnv) -> List[Item]:
        wire = self._wire(stmt.control, ctx)
        zero = self.compile_statement(stmt.zero, CompileCtx(ctx.f, ctx.controls + (Control(wire, True),), ctx.proc), env)
        one = self.compile_statement(stmt.one, CompileCtx(ctx.f, ctx.controls + (Control(wire, False),), ctx.proc), env)
        zero_points = [i for i, item in enumerate(zero) if isinstance(item, MergePoint)]
        one_points = [i for i, item in enumerate(one) if isinstance(item, MergePoint)]
        if not zero_points and not one_points or len(zero_points) > 1 or len(one_points) > 1:
            return zero + one
        # Branch gates carry opposite controls on the qcase qubit, so they commute
        # across the other branch and the two merge points can become one.
        zi = zero_points[0] if zero_points else len(zero)
        oi = one_points[0] if one_points else len(one)
        sites = [s for point in (zero[zi:zi + 1] + one[oi:oi + 1]) for s in point.sites]
        return zero[:zi] + one[:oi] + [MergePoint(sites)] + zero[zi + 1:] + one[oi + 1:]

    def compile_call(self, call: ast.Call, ctx: CompileCtx, env: MergeEnv) -> List[Item]:
        args = tuple(eval_list(arg, ctx.f) for arg in call.args)
        if any(not arg for arg in args):
            return []
        if self.strategy == "merge" and ctx.proc is not None and self.call_graph.equivalent(ctx.proc, call.proc):
            return [MergePoint([Site(call.proc, args, ctx.controls)])]
        gates, chain = self._body_instance(call.proc, args, ctx.controls, env.level)
        env.chain = max(env.chain, chain)
        return list(gates)

    # --- Body instances and merging ---

    def _body_instance(self, proc: str, args: Tuple[Wires, ...], controls: Tuple[Control, ...],
                       level: int) -> Tuple[List[Gate], int]:
        decl = self.procedures[proc]
        ctx = CompileCtx(dict(zip(decl.params, args)), controls, proc)
        env = MergeEnv(level)
        items = self.compile_statement(decl.body, ctx, env)
        return self._resolve(items, env), env.chain

    def _resolve(self, items: Sequence[Item], env: MergeEnv) -> List[Gate]:
        gates: List[Gate] = []
        for item in items:
            if isinstance(item, MergePoint):
                gates.extend(self.resolve_merge_point(item, env))
            else:
                gates.append(item)
        return gates

    def resolve_merge_point(self, point: MergePoint, env: MergeEnv) -> List[Gate]:
        gates: List[Gate] = []
        for sites in env.group_sites(point.sites):
            gates.extend(self._compile_group(sites, env))
        return gates

    def _compile_group(self, sites: List[Site], env: MergeEnv) -> List[Gate]:
        canonical = sites[0]
        for i, first in enumerate(sites):
            for second in sites[i + 1:]:
                if not orthogonal(first, second):
                    raise CompilerBugError(f"merge sites of '{canonical.proc}' are not orthogonal")

        if len(sites) == 1 and not canonical.controls:
            body, chain = self._body_instance(canonical.proc, canonical.args, (), env.level + 1)
            env.chain = max(env.chain, chain + 1)
            self.records.append(GroupRecord(canonical.key, env.level, 1, False, 0, 0))
            return body

        anchor = self.pool.allocate()
        group = MergeGroup(canonical.key, anchor, canonical, sites)
        compute = [Gate("X", (anchor,), site.controls) for site in sites]
        target_wires = [w - 1 for w in canonical.wires]
        routes = []
        for index, site in enumerate(sites[1:], start=1):
            if site.wires == canonical.wires:
                continue
            selector = self.pool.allocate()
            group.selectors[index] = selector
            compute.append(Gate("X", (selector,), site.controls))
            routes.append((selector, routing_permutation([w - 1 for w in site.wires], target_wires)))

        permutations = [build_controlled_permutation(perm, selector, self.perm_mode, self.pool)
                        for selector, perm in routes]
        body, chain = self._body_instance(canonical.proc, canonical.args, (Control(anchor),), env.level + 1)
        env.chain = max(env.chain, chain + 1)

        forward = [g for block in permutations for g in block]
        backward = [g for block in reversed(permutations) for g in reversed(block)]
        for selector in reversed(list(group.selectors.values())):
            self.pool.release(selector)
        self.pool.release(anchor)

        self.records.append(GroupRecord(canonical.key, env.level, len(sites), True,
                                        len(group.selectors), len(forward)))
        logger.debug(f"Merged {len(sites)} site(s) of {canonical.key} at level {env.level} "
                     f"with {len(group.selectors)} selector(s).")
        return compute + forward + body + backward + list(reversed(compute))


def compile_program(program: ast.Program, lengths: Mapping[str, int], perm_mode: Optional[str] = None,
                    strategy: Optional[str] = None) -> Circuit:
    return Compiler(program, lengths, perm_mode, strategy).compile()


def compile_stats(program: ast.Program, lengths: Mapping[str, int], perm_mode: Optional[str] = None,
                  strategy: Optional[str] = None) -> CompileReport:
    compiler = Compiler(program, lengths, perm_mode, strategy)
    return compiler.report(compiler.compile())


def verify_compilation(program: ast.Program, lengths: Mapping[str, int], circuit: Circuit,
                       samples: Optional[int] = None, seed: Optional[int] = None) -> float:
    """Largest amplitude difference between interpreter and circuit on random input states."""
    lengths = Lengths.for_program(program, lengths)
    rng = np.random.default_rng(seed if seed is not None else plp_config.bench.seed)
    count = samples if samples is not None else plp_config.bench.verify_random_states
    dimension = 2 ** lengths.total
    worst = 0.0
    for _ in range(count):
        vector = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
        state = DenseState(vector / np.linalg.norm(vector), lengths.total)
        expected = run_program(program, lengths, state)
        if not expected.ok:
            raise CompileError("program reaches an error during verification")
        actual = simulate_circuit(circuit, state)
        worst = max(worst, float(np.max(np.abs(expected.state.to_array() - actual.to_array()))))
    logger.debug(f"Verified {count} random state(s); largest deviation {worst:.3e}.")
    return worst
