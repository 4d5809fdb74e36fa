"""
Source-to-source inversion of PLP programs.
"""
import logging
from typing import Dict, Set

from . import ast

logger = logging.getLogger(__name__)

INVERSE_SUFFIX = "_inv"


def inverse_name(name: str, taken: Set[str]) -> str:
    """``f`` -> ``f_inv``; ``f_inv`` -> ``f`` when that name is still free."""
    if name.endswith(INVERSE_SUFFIX):
        stripped = name[:-len(INVERSE_SUFFIX)]
        if stripped and stripped not in taken:
            return stripped
    candidate = f"{name}{INVERSE_SUFFIX}"
    counter = 2
    while candidate in taken:
        candidate = f"{name}{INVERSE_SUFFIX}{counter}"
        counter += 1
    return candidate


def invert_angle(angle: ast.AngleFn) -> ast.AngleFn:
    """``lam x. e`` -> ``lam x. 2*pi - (e)``; a missing function stands for ``lam x. x``."""
    if angle is None:
        angle = ast.AngleFn("x", ast.AVar("x"))
    span = angle.span
    two_pi = ast.ABin("*", ast.ANum(2, span=span), ast.APi(span=span), span=span)
    return ast.AngleFn(angle.param, ast.ABin("-", two_pi, angle.body, span=span), span=span)


def invert_statement(stmt: ast.Statement, names: Dict[str, str]) -> ast.Statement:
    if isinstance(stmt, ast.Seq):
        parts = [invert_statement(s, names) for s in reversed(ast.statements(stmt))]
        return ast.sequence(parts, stmt.span)
    if isinstance(stmt, ast.Apply):
        if stmt.gate == "NOT":
            return stmt
        return ast.Apply(stmt.target, stmt.gate, invert_angle(stmt.angle), stmt.arg, span=stmt.span)
    if isinstance(stmt, ast.If):
        return ast.If(stmt.cond, invert_statement(stmt.then, names),
                      invert_statement(stmt.orelse, names), span=stmt.span)
    if isinstance(stmt, ast.QCase):
        return ast.QCase(stmt.control, invert_statement(stmt.zero, names),
                         invert_statement(stmt.one, names), span=stmt.span)
    if isinstance(stmt, ast.Call):
        return ast.Call(names.get(stmt.proc, stmt.proc), stmt.args, span=stmt.span)
    return stmt


def invert_program(program: ast.Program) -> ast.Program:
    core = ast.desugar(program)
    names: Dict[str, str] = {}
    for decl in core.decls:
        if decl.name not in names:
            names[decl.name] = inverse_name(decl.name, set(names.values()))
    decls = tuple(
        ast.ProcDecl(names[d.name], d.params, invert_statement(d.body, names), span=d.span)
        for d in core.procedures.values()
    )
    logger.info(f"Inverted {len(decls)} procedure(s): "
                + ", ".join(f"{old} -> {new}" for old, new in names.items()))
    return ast.Program(decls, invert_statement(core.main, names), core.vars, span=core.span)
