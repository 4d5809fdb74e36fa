"""
PLP: parse, check, run, invert and compile programs of a small quantum
language whose recursive procedures run in polylogarithmic time.
"""
from .analysis import call_graph, check_half, check_source, check_well_formed, verdict, width
from .ast import desugar, substitute, vars_of
from .circuit import build_controlled_permutation, depth, deserialize, serialize, simulate_circuit, to_qasm
from .compiler import compile_program, compile_stats
from .errors import PlpError
from .interpreter import Lengths, extract_unitary, meter_program, run_program
from .inverse import invert_program
from .parser import parse_program, pretty_print

__all__ = [
    "Lengths",
    "PlpError",
    "build_controlled_permutation",
    "call_graph",
    "check_half",
    "check_source",
    "check_well_formed",
    "compile_program",
    "compile_stats",
    "depth",
    "deserialize",
    "desugar",
    "extract_unitary",
    "invert_program",
    "meter_program",
    "parse_program",
    "pretty_print",
    "run_program",
    "serialize",
    "simulate_circuit",
    "substitute",
    "to_qasm",
    "verdict",
    "vars_of",
    "width",
]
