"""
Static checks on PLP programs: well-formedness, the call relation,
the halving restriction on recursive calls, procedure width and the
resulting PLP verdict.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from . import ast
from .ast import NO_SPAN, SourceSpan
from .errors import ParseError
from .parser import parse_program

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


class CallGraph:
    """The call relation of a program and the orders derived from it.

    ``reaches`` is the transitive closure of the call relation, ``equivalent``
    holds for procedures calling each other (or a procedure reaching itself),
    and ``above`` is the strict order between different components.
    """

    def __init__(self, graph: nx.DiGraph):
        self.graph = graph
        self._component: Dict[str, FrozenSet[str]] = {}
        for component in nx.strongly_connected_components(graph):
            frozen = frozenset(component)
            for name in component:
                self._component[name] = frozen

    @property
    def nodes(self) -> List[str]:
        return list(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[str, str]]:
        return list(self.graph.edges)

    def component(self, name: str) -> FrozenSet[str]:
        return self._component.get(name, frozenset({name}))

    def is_recursive(self, name: str) -> bool:
        if name not in self.graph:
            return False
        return len(self.component(name)) > 1 or self.graph.has_edge(name, name)

    def reaches(self, caller: str, callee: str) -> bool:
        if caller not in self.graph or callee not in self.graph:
            return False
        if caller == callee:
            return self.is_recursive(caller)
        return nx.has_path(self.graph, caller, callee)

    def equivalent(self, first: str, second: str) -> bool:
        return self.reaches(first, second) and self.reaches(second, first)

    def above(self, first: str, second: str) -> bool:
        return self.reaches(first, second) and not self.equivalent(first, second)

    def components(self) -> List[FrozenSet[str]]:
        """Components in call order, callers before callees."""
        condensed = nx.condensation(self.graph)
        return [frozenset(condensed.nodes[c]["members"]) for c in nx.topological_sort(condensed)]

    def recursive_components(self) -> List[FrozenSet[str]]:
        return [c for c in self.components() if self.is_recursive(next(iter(c)))]


@dataclass
class Verdict:
    well_formed: bool
    is_half: bool
    width: int
    is_plp: bool
    diagnostics: List[Diagnostic] = field(default_factory=list)
    procedure_widths: Dict[str, int] = field(default_factory=dict)
    recursive_components: List[FrozenSet[str]] = field(default_factory=list)

    def summary(self) -> str:
        if not self.well_formed:
            return "PLP: no (not well-formed)"
        half = "HALF ok" if self.is_half else "HALF failed"
        return f"PLP: {'yes' if self.is_plp else 'no'} ({half}, width {self.width})"


def _calls(stmt: ast.Node) -> List[ast.Call]:
    return [node for node in ast.walk(stmt) if isinstance(node, ast.Call)]


def check_well_formed(program: ast.Program) -> List[Diagnostic]:
    """Side conditions a program must meet before it can be analysed or run."""
    diagnostics: List[Diagnostic] = []
    arities: Dict[str, int] = {}

    for decl in program.decls:
        if decl.name in arities:
            diagnostics.append(Diagnostic(decl.span, f"duplicate procedure declaration '{decl.name}'"))
            continue
        arities[decl.name] = len(decl.params)

    seen_vars = set()
    for name in program.vars:
        if name in seen_vars:
            diagnostics.append(Diagnostic(program.span, f"duplicate variable '{name}' in define header"))
        seen_vars.add(name)

    scopes = [(decl.body, set(decl.params), decl.name) for decl in program.decls]
    scopes.append((program.main, set(program.vars), None))

    for decl in program.decls:
        duplicates = {p for p in decl.params if decl.params.count(p) > 1}
        for param in sorted(duplicates):
            diagnostics.append(Diagnostic(decl.span, f"duplicate parameter '{param}' in procedure '{decl.name}'"))

    for body, allowed, owner in scopes:
        reported = set()
        where = f" in procedure '{owner}'" if owner else ""
        for node in ast.walk(body):
            if isinstance(node, ast.QVar) and node.name not in allowed and node.name not in reported:
                reported.add(node.name)
                diagnostics.append(Diagnostic(node.span, f"undeclared qubit variable '{node.name}'{where}"))
            elif isinstance(node, ast.IntVar):
                diagnostics.append(Diagnostic(node.span, f"unbound integer variable '{node.name}'{where}"))
            elif isinstance(node, ast.Call):
                if node.proc not in arities:
                    diagnostics.append(Diagnostic(node.span, f"unknown procedure '{node.proc}'"))
                elif arities[node.proc] != len(node.args):
                    diagnostics.append(Diagnostic(
                        node.span,
                        f"procedure '{node.proc}' expects {arities[node.proc]} argument(s), got {len(node.args)}"))
                taken = set()
                for arg in node.args:
                    if ast.vars_of(arg) & taken:
                        diagnostics.append(Diagnostic(node.span, "overlapping call arguments"))
                        break
                    taken |= ast.vars_of(arg)
            elif isinstance(node, ast.AngleFn):
                for inner in ast.walk(node.body):
                    if isinstance(inner, ast.AVar) and inner.name != node.param:
                        diagnostics.append(Diagnostic(inner.span, f"unbound name '{inner.name}' in angle function"))

    return diagnostics


def check_source(source: str) -> Tuple[Optional[ast.Program], List[Diagnostic]]:
    """Parse and check in one step; a parse failure becomes a single diagnostic."""
    try:
        program = parse_program(source)
    except ParseError as e:
        return None, [Diagnostic(e.span, e.message)]
    return program, check_well_formed(program)


def call_graph(program: ast.Program) -> CallGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(d.name for d in program.decls)
    for decl in program.decls:
        for call in _calls(decl.body):
            if call.proc in graph:
                graph.add_edge(decl.name, call.proc)
    logger.debug(f"Call graph: {graph.number_of_nodes()} procedure(s), edges {sorted(graph.edges)}")
    return CallGraph(graph)


def check_half(program: ast.Program, cg: CallGraph) -> Tuple[bool, List[Diagnostic]]:
    """Every recursive call site must pass some halved argument."""
    diagnostics: List[Diagnostic] = []
    for decl in program.decls:
        for call in _calls(decl.body):
            if not cg.equivalent(decl.name, call.proc):
                continue
            halving = any(isinstance(node, (ast.FirstHalf, ast.SecondHalf))
                          for arg in call.args for node in ast.walk(arg))
            if not halving:
                diagnostics.append(Diagnostic(
                    call.span, f"recursive call to '{call.proc}' does not halve any argument"))
    return not diagnostics, diagnostics


def statement_width(stmt: ast.Node, proc: str, cg: CallGraph) -> int:
    if isinstance(stmt, ast.Seq):
        return statement_width(stmt.first, proc, cg) + statement_width(stmt.second, proc, cg)
    if isinstance(stmt, ast.If):
        return max(statement_width(stmt.then, proc, cg), statement_width(stmt.orelse, proc, cg))
    if isinstance(stmt, ast.QCase):
        return max(statement_width(stmt.zero, proc, cg), statement_width(stmt.one, proc, cg))
    if isinstance(stmt, ast.QCaseMulti):
        return max(statement_width(b, proc, cg) for b in stmt.branches)
    if isinstance(stmt, ast.Call):
        return 1 if cg.equivalent(proc, stmt.proc) else 0
    return 0


def width(program: ast.Program, cg: CallGraph) -> Tuple[int, Dict[str, int]]:
    per_procedure = {d.name: statement_width(d.body, d.name, cg) for d in program.procedures.values()}
    return max(per_procedure.values(), default=0), per_procedure


def verdict(program: ast.Program) -> Verdict:
    core = ast.desugar(program)
    diagnostics = check_well_formed(core)
    cg = call_graph(core)
    is_half, half_diagnostics = check_half(core, cg)
    total_width, per_procedure = width(core, cg)
    well_formed = not diagnostics
    diagnostics.extend(half_diagnostics)
    if total_width > 1:
        worst = max(per_procedure, key=per_procedure.get)
        decl = core.decl(worst)
        diagnostics.append(Diagnostic(decl.span if decl else NO_SPAN,
                                      f"procedure '{worst}' has width {total_width}, at most 1 allowed"))
    result = Verdict(
        well_formed=well_formed,
        is_half=is_half,
        width=total_width,
        is_plp=well_formed and is_half and total_width <= 1,
        diagnostics=diagnostics,
        procedure_widths=per_procedure,
        recursive_components=cg.recursive_components(),
    )
    logger.info(f"Verdict: {result.summary()}")
    return result
