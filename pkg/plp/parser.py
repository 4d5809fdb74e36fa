"""
Concrete syntax for PLP source files.

``parse_program`` turns ``.plp`` text into the surface AST of :mod:`plp.ast`;
``pretty_print`` goes the other way and is its exact inverse up to spans.
The grammar is documented as EBNF in ``docs/grammar.md``.
"""
import logging
from typing import List, Optional, Sequence

from lark import Lark, Transformer, Token, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from . import ast
from .ast import NO_SPAN, SourceSpan
from .errors import AstInvariantError, ParseError

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    program:        decl* "::" header? body

    decl:           "decl" NAME "(" params ")" "{" body "}" ","?
    params:         (NAME ("," NAME)*)?
    header:         "define" NAME ("," NAME)* ";"
    body:           _stmt*

    _stmt:          skip | apply | cnot | swap | tof | if_stmt | qcase | call | block
    block:          "{" body "}"
    skip:           "skip" ";"
    apply:          qubit "*=" GATE angle? arg? ";"
    angle:          "[" "lam" NAME "." aexpr "]"
    arg:            "(" iexpr ")"
    cnot:           "CNOT" "(" qubit "," qubit ")" ";"
    swap:           "SWAP" "(" qubit "," qubit ")" ";"
    tof:            "TOF" "(" qubit "," qubit "," qubit ")" ";"
    if_stmt:        "if" bexpr "then" "{" body "}" ("else" "{" body "}")?
    qcase:          "qcase" controls "of" "{" branch ("," branch)* ","? "}"
    controls:       indexed ("," indexed)*
    indexed:        lexpr "[" index ("," index)* "]"
    branch:         BITS "->" body
    call:           "call" NAME "(" args ")" ";"
    args:           (lexpr ("," lexpr)*)?

    qubit:          lexpr "[" index "]"
    ?index:        iexpr | negindex
    negindex:      "-" INT

    ?lexpr:        NAME                                      -> qvar
                  | lexpr "[-]"                              -> first_half
                  | lexpr "[+]"                              -> second_half
                  | lexpr "\\" "[" index ("," index)* "]"  -> remove
                  | "(" lexpr ")"

    ?iexpr:        iatom
                  | iexpr "+" INT                            -> add_const
                  | iexpr "-" INT                            -> sub_const
                  | iexpr "/" INT                            -> half
    ?iatom:        NAME                                      -> int_var
                  | INT                                       -> const
                  | "|" lexpr "|"                            -> size
                  | "(" iexpr ")"

    ?bexpr:        band | bexpr "||" band                 -> or_
    ?band:         bnot | band "&&" bnot                  -> and_
    ?bnot:         batom | "!" bnot                        -> not_
    ?batom:        iexpr CMP iexpr                         -> cmp
                  | "true"                                    -> true_
                  | "false"                                   -> false_
                  | "(" bexpr ")"

    ?aexpr:        aterm
                  | aexpr "+" aterm                         -> a_add
                  | aexpr "-" aterm                         -> a_sub
    ?aterm:        afactor
                  | aterm "*" afactor                       -> a_mul
                  | aterm "/" afactor                       -> a_div
    ?afactor:      NUMBER                                    -> a_num
                  | NAME                                      -> a_name
                  | "-" afactor                              -> a_neg
                  | "(" aexpr ")"

    GATE:           "Ph" | "RY" | "NOT"
    CMP:            "==" | "!=" | "<=" | ">=" | "<" | ">"
    BITS:           /[01]+/
    NAME:           /[a-zA-Z_][a-zA-Z0-9_]*/
    NUMBER:         /\d+(\.\d*)?([eE][+-]?\d+)?/
    COMMENT:        /\/\/[^\n]*/

    %import common (INT, WS)
    %ignore WS
    %ignore COMMENT
"""

_lark = Lark(GRAMMAR, start="program", parser="earley", propagate_positions=True)


def _span(meta) -> SourceSpan:
    if getattr(meta, "empty", True):
        return NO_SPAN
    return SourceSpan(meta.start_pos, meta.end_pos, meta.line, meta.column)


def _token_span(token: Token) -> SourceSpan:
    return SourceSpan(token.start_pos, token.end_pos, token.line, token.column)


class _Header(tuple):
    pass


class _Arg:
    def __init__(self, expr):
        self.expr = expr


@v_args(meta=True)
class _AstBuilder(Transformer):
    """Builds surface AST nodes bottom-up from the lark parse tree."""

    def _node(self, meta, cls, *args, **kwargs):
        try:
            return cls(*args, span=_span(meta), **kwargs)
        except AstInvariantError as e:
            raise ParseError(_span(meta), str(e)) from e

    # --- program structure ---

    def program(self, meta, children):
        decls = tuple(c for c in children if isinstance(c, ast.ProcDecl))
        header = next((c for c in children if isinstance(c, _Header)), None)
        main = children[-1]
        if header is not None:
            variables = tuple(header)
        else:
            variables = _first_occurrence(main)
        return self._node(meta, ast.Program, decls, main, variables)

    def decl(self, meta, children):
        name, params, body = children[0], children[1], children[2]
        return self._node(meta, ast.ProcDecl, str(name), params, body)

    def params(self, meta, children):
        return tuple(str(c) for c in children)

    def header(self, meta, children):
        return _Header(str(c) for c in children)

    def body(self, meta, children):
        return ast.sequence(children, _span(meta))

    def block(self, meta, children):
        return children[0]

    # --- statements ---

    def skip(self, meta, children):
        return self._node(meta, ast.Skip)

    def apply(self, meta, children):
        target, gate = children[0], str(children[1])
        angle = next((c for c in children[2:] if isinstance(c, ast.AngleFn)), None)
        arg = next((c.expr for c in children[2:] if isinstance(c, _Arg)), None)
        return self._node(meta, ast.Apply, target, gate, angle, arg)

    def angle(self, meta, children):
        return self._node(meta, ast.AngleFn, str(children[0]), children[1])

    def arg(self, meta, children):
        return _Arg(children[0])

    def cnot(self, meta, children):
        return self._node(meta, ast.CNot, *children)

    def swap(self, meta, children):
        return self._node(meta, ast.Swap, *children)

    def tof(self, meta, children):
        return self._node(meta, ast.Toffoli, *children)

    def if_stmt(self, meta, children):
        cond, then = children[0], children[1]
        orelse = children[2] if len(children) > 2 else ast.Skip(span=_span(meta))
        return self._node(meta, ast.If, cond, then, orelse)

    def qcase(self, meta, children):
        controls, branches = children[0], children[1:]
        width = len(controls)
        table: List[Optional[ast.Node]] = [None] * (2 ** width)
        for label, stmt in branches:
            if len(label) != width:
                raise ParseError(_token_span(label),
                                 f"branch label '{label}' should have {width} bit(s)")
            slot = int(str(label), 2)
            if table[slot] is not None:
                raise ParseError(_token_span(label), f"duplicate branch label '{label}'")
            table[slot] = stmt
        filled = tuple(s if s is not None else ast.Skip(span=_span(meta)) for s in table)
        if width == 1:
            return self._node(meta, ast.QCase, controls[0], filled[0], filled[1])
        return self._node(meta, ast.QCaseMulti, tuple(controls), filled)

    def controls(self, meta, children):
        return [q for group in children for q in group]

    def indexed(self, meta, children):
        base, indices = children[0], children[1:]
        return [self._node(meta, ast.QubitExpr, base, index) for index in indices]

    def branch(self, meta, children):
        return children[0], children[1]

    def call(self, meta, children):
        return self._node(meta, ast.Call, str(children[0]), children[1])

    def args(self, meta, children):
        return tuple(children)

    # --- qubits and lists ---

    def qubit(self, meta, children):
        return self._node(meta, ast.QubitExpr, children[0], children[1])

    def negindex(self, meta, children):
        return self._node(meta, ast.NegIndex, int(children[0]))

    def qvar(self, meta, children):
        return self._node(meta, ast.QVar, str(children[0]))

    def first_half(self, meta, children):
        return self._node(meta, ast.FirstHalf, children[0])

    def second_half(self, meta, children):
        return self._node(meta, ast.SecondHalf, children[0])

    def remove(self, meta, children):
        base, indices = children[0], children[1:]
        if len(indices) == 1:
            return self._node(meta, ast.Remove, base, indices[0])
        return self._node(meta, ast.RemoveMany, base, tuple(indices))

    # --- integers ---

    def add_const(self, meta, children):
        return self._node(meta, ast.AddConst, children[0], int(children[1]), "+")

    def sub_const(self, meta, children):
        return self._node(meta, ast.AddConst, children[0], int(children[1]), "-")

    def half(self, meta, children):
        if int(children[1]) != 2:
            raise ParseError(_token_span(children[1]), "only division by 2 is supported", ["2"])
        return self._node(meta, ast.HalfCeil, children[0])

    def int_var(self, meta, children):
        return self._node(meta, ast.IntVar, str(children[0]))

    def const(self, meta, children):
        return self._node(meta, ast.Const, int(children[0]))

    def size(self, meta, children):
        return self._node(meta, ast.SizeOf, children[0])

    # --- booleans ---

    def or_(self, meta, children):
        return self._node(meta, ast.Or, children[0], children[1])

    def and_(self, meta, children):
        return self._node(meta, ast.And, children[0], children[1])

    def not_(self, meta, children):
        return self._node(meta, ast.Not, children[0])

    def cmp(self, meta, children):
        return self._node(meta, ast.Cmp, children[0], str(children[1]), children[2])

    def true_(self, meta, children):
        return self._node(meta, ast.BoolLit, True)

    def false_(self, meta, children):
        return self._node(meta, ast.BoolLit, False)

    # --- angle functions ---

    def a_num(self, meta, children):
        text = str(children[0])
        value = int(text) if text.isdigit() else float(text)
        return self._node(meta, ast.ANum, value)

    def a_name(self, meta, children):
        name = str(children[0])
        if name == "pi":
            return self._node(meta, ast.APi)
        return self._node(meta, ast.AVar, name)

    def a_neg(self, meta, children):
        return self._node(meta, ast.ANeg, children[0])

    def a_add(self, meta, children):
        return self._node(meta, ast.ABin, "+", children[0], children[1])

    def a_sub(self, meta, children):
        return self._node(meta, ast.ABin, "-", children[0], children[1])

    def a_mul(self, meta, children):
        return self._node(meta, ast.ABin, "*", children[0], children[1])

    def a_div(self, meta, children):
        return self._node(meta, ast.ABin, "/", children[0], children[1])


def _first_occurrence(main: ast.Node) -> tuple:
    ordered: List[str] = []
    for node in ast.walk(main):
        if isinstance(node, ast.QVar) and node.name not in ordered:
            ordered.append(node.name)
    return tuple(ordered)


def _describe_terminal(name: str) -> str:
    try:
        term = _lark.get_terminal(name)
    except KeyError:
        return name
    if term.pattern.type == "str":
        return repr(term.pattern.value)
    return name


def _end_span(source: str) -> SourceSpan:
    line = source.count("\n") + 1
    column = len(source) - (source.rfind("\n") + 1) + 1
    return SourceSpan(len(source), len(source), line, column)


def parse_program(source: str) -> ast.Program:
    """Parse PLP source text into a surface :class:`~plp.ast.Program`."""
    try:
        tree = _lark.parse(source)
    except UnexpectedInput as e:
        if isinstance(e, UnexpectedEOF) or getattr(e, "line", -1) < 1:
            span = _end_span(source)
            message = "unexpected end of input"
        else:
            pos = max(e.pos_in_stream or 0, 0)
            span = SourceSpan(pos, pos, e.line, e.column)
            if isinstance(e, UnexpectedCharacters):
                message = f"unexpected character {source[pos:pos + 1]!r}"
            else:
                message = f"unexpected token {str(getattr(e, 'token', ''))!r}"
        expected = getattr(e, "allowed", None) or getattr(e, "expected", None) or ()
        raise ParseError(span, message, [_describe_terminal(t) for t in expected]) from None

    try:
        program = _AstBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        raise
    logger.debug(f"Parsed program with {len(program.decls)} declaration(s) and variables {list(program.vars)}.")
    return program


# --- Pretty printing ---

_BOOL_PRECEDENCE = {ast.Or: 1, ast.And: 2, ast.Not: 3}
_ANGLE_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_int(e: ast.Node) -> str:
    if isinstance(e, ast.IntVar):
        return e.name
    if isinstance(e, ast.Const):
        return str(e.value)
    if isinstance(e, ast.AddConst):
        return f"{format_int(e.expr)} {e.sign} {e.k}"
    if isinstance(e, ast.HalfCeil):
        inner = format_int(e.expr)
        if isinstance(e.expr, ast.AddConst):
            inner = f"({inner})"
        return f"{inner} / 2"
    if isinstance(e, ast.SizeOf):
        return f"|{format_list(e.lst)}|"
    if isinstance(e, ast.NegIndex):
        return f"-{e.n}"
    raise TypeError(f"not an integer expression: {e!r}")


def format_list(e: ast.Node) -> str:
    if isinstance(e, ast.QVar):
        return e.name
    if isinstance(e, ast.FirstHalf):
        return f"{format_list(e.lst)}[-]"
    if isinstance(e, ast.SecondHalf):
        return f"{format_list(e.lst)}[+]"
    if isinstance(e, ast.Remove):
        return f"{format_list(e.lst)} \\ [{format_int(e.index)}]"
    if isinstance(e, ast.RemoveMany):
        return f"{format_list(e.lst)} \\ [{', '.join(format_int(i) for i in e.indices)}]"
    raise TypeError(f"not a list expression: {e!r}")


def format_qubit(q: ast.QubitExpr) -> str:
    return f"{format_list(q.base)}[{format_int(q.index)}]"


def _bool_precedence(b: ast.Node) -> int:
    return _BOOL_PRECEDENCE.get(type(b), 4)


def format_bool(b: ast.Node) -> str:
    if isinstance(b, ast.BoolLit):
        return "true" if b.value else "false"
    if isinstance(b, ast.Cmp):
        return f"{format_int(b.lhs)} {b.op} {format_int(b.rhs)}"
    if isinstance(b, ast.Not):
        inner = format_bool(b.expr)
        return f"!({inner})" if _bool_precedence(b.expr) < 3 else f"!{inner}"
    if isinstance(b, (ast.And, ast.Or)):
        level = _bool_precedence(b)
        left, right = format_bool(b.left), format_bool(b.right)
        if _bool_precedence(b.left) < level:
            left = f"({left})"
        if _bool_precedence(b.right) <= level:
            right = f"({right})"
        op = "&&" if isinstance(b, ast.And) else "||"
        return f"{left} {op} {right}"
    raise TypeError(f"not a boolean expression: {b!r}")


def _angle_precedence(a: ast.Node) -> int:
    if isinstance(a, ast.ABin):
        return _ANGLE_PRECEDENCE[a.op]
    if isinstance(a, ast.ANeg):
        return 3
    return 4


def format_angle_expr(a: ast.Node) -> str:
    if isinstance(a, ast.ANum):
        return repr(a.value) if isinstance(a.value, float) else str(a.value)
    if isinstance(a, ast.APi):
        return "pi"
    if isinstance(a, ast.AVar):
        return a.name
    if isinstance(a, ast.ANeg):
        inner = format_angle_expr(a.expr)
        return f"-({inner})" if _angle_precedence(a.expr) < 3 else f"-{inner}"
    if isinstance(a, ast.ABin):
        level = _ANGLE_PRECEDENCE[a.op]
        left, right = format_angle_expr(a.left), format_angle_expr(a.right)
        if _angle_precedence(a.left) < level:
            left = f"({left})"
        if _angle_precedence(a.right) <= level:
            right = f"({right})"
        if a.op in ("+", "-"):
            return f"{left} {a.op} {right}"
        return f"{left}{a.op}{right}"
    raise TypeError(f"not an angle expression: {a!r}")


def format_angle(angle: ast.AngleFn) -> str:
    return f"lam {angle.param}. {format_angle_expr(angle.body)}"


_EXPRESSION_FORMATTERS = (
    ((ast.IntVar, ast.Const, ast.AddConst, ast.HalfCeil, ast.SizeOf, ast.NegIndex), format_int),
    ((ast.QVar, ast.Remove, ast.FirstHalf, ast.SecondHalf, ast.RemoveMany), format_list),
    ((ast.Cmp, ast.And, ast.Or, ast.Not, ast.BoolLit), format_bool),
    ((ast.ANum, ast.APi, ast.AVar, ast.ANeg, ast.ABin), format_angle_expr),
)


def format_expression(e: ast.Node) -> str:
    """Source text of any integer, list, qubit, boolean or angle expression."""
    if isinstance(e, ast.QubitExpr):
        return format_qubit(e)
    if isinstance(e, ast.AngleFn):
        return format_angle(e)
    for kinds, formatter in _EXPRESSION_FORMATTERS:
        if isinstance(e, kinds):
            return formatter(e)
    raise TypeError(f"not an expression: {e!r}")


def _format_branches(labels: Sequence[str], bodies: Sequence[ast.Node], indent: int) -> List[str]:
    pad = "  " * (indent + 1)
    lines: List[str] = []
    for i, (label, body) in enumerate(zip(labels, bodies)):
        inner = format_statement_lines(body, indent + 2)
        if len(inner) == 1:
            chunk = [f"{pad}{label} -> {inner[0].strip()}"]
        else:
            chunk = [f"{pad}{label} ->"] + inner
        if i < len(labels) - 1:
            chunk[-1] += ","
        lines.extend(chunk)
    return lines


def format_statement_lines(s: ast.Node, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(s, ast.Seq):
        # Sequences read right-nested, so a nested first half needs its own block.
        lines: List[str] = []
        while isinstance(s, ast.Seq):
            if isinstance(s.first, ast.Seq):
                lines += [f"{pad}{{"] + format_statement_lines(s.first, indent + 1) + [f"{pad}}}"]
            else:
                lines += format_statement_lines(s.first, indent)
            s = s.second
        return lines + format_statement_lines(s, indent)
    if isinstance(s, ast.Skip):
        return [f"{pad}skip;"]
    if isinstance(s, ast.Apply):
        text = f"{format_qubit(s.target)} *= {s.gate}"
        if s.angle is not None:
            text += f"[{format_angle(s.angle)}]"
        if s.arg is not None:
            text += f"({format_int(s.arg)})"
        return [f"{pad}{text};"]
    if isinstance(s, ast.Call):
        return [f"{pad}call {s.proc}({', '.join(format_list(a) for a in s.args)});"]
    if isinstance(s, ast.CNot):
        return [f"{pad}CNOT({format_qubit(s.control)}, {format_qubit(s.target)});"]
    if isinstance(s, ast.Swap):
        return [f"{pad}SWAP({format_qubit(s.first)}, {format_qubit(s.second)});"]
    if isinstance(s, ast.Toffoli):
        qubits = ", ".join(format_qubit(q) for q in (s.first, s.second, s.target))
        return [f"{pad}TOF({qubits});"]
    if isinstance(s, ast.If):
        return ([f"{pad}if {format_bool(s.cond)} then {{"]
                + format_statement_lines(s.then, indent + 1)
                + [f"{pad}}} else {{"]
                + format_statement_lines(s.orelse, indent + 1)
                + [f"{pad}}}"])
    if isinstance(s, ast.QCase):
        return ([f"{pad}qcase {format_qubit(s.control)} of {{"]
                + _format_branches(["0", "1"], [s.zero, s.one], indent)
                + [f"{pad}}}"])
    if isinstance(s, ast.QCaseMulti):
        width = len(s.controls)
        labels = [format(i, f"0{width}b") for i in range(2 ** width)]
        heads = ", ".join(format_qubit(q) for q in s.controls)
        return ([f"{pad}qcase {heads} of {{"]
                + _format_branches(labels, s.branches, indent)
                + [f"{pad}}}"])
    raise TypeError(f"not a statement: {s!r}")


def format_statement(s: ast.Node, indent: int = 0) -> str:
    return "\n".join(format_statement_lines(s, indent))


def pretty_print(program: ast.Program) -> str:
    """Render a program as source text that parses back to an equal AST."""
    lines: List[str] = []
    for decl in program.decls:
        lines.append(f"decl {decl.name}({', '.join(decl.params)}) {{")
        lines.extend(format_statement_lines(decl.body, 1))
        lines.append("}")
    lines.append("::")
    if program.vars:
        lines.append(f"define {', '.join(program.vars)};")
    lines.extend(format_statement_lines(program.main, 0))
    return "\n".join(lines) + "\n"
