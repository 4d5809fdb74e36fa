import numpy as np
import pytest
from numpy.testing import assert_allclose

from plp.analysis import verdict
from plp.ast import Skip
from plp.circuit import simulate_circuit
from plp.compiler import compile_program
from plp.interpreter import extract_unitary
from plp.inverse import inverse_name, invert_program
from plp.parser import parse_program, pretty_print
from plp.statevector import make_state

from .program_fuzzer import RUN_SIZES, ProgramFuzzer


def test_sequence_is_reversed():
    inverse = invert_program(parse_program(":: q[1] *= NOT; q[2] *= NOT;"))
    assert inverse.main == parse_program(":: q[2] *= NOT; q[1] *= NOT;").main


def test_skip_is_its_own_inverse():
    assert invert_program(parse_program(":: skip;")).main == Skip()


def test_angle_is_negated_modulo_two_pi():
    inverse = invert_program(parse_program(":: q[1] *= Ph[lam x. pi/x](|q|);"))
    assert pretty_print(inverse).splitlines()[-1] == "q[1] *= Ph[lam x. 2*pi - pi/x](|q|);"


def test_missing_angle_function_is_materialized():
    inverse = invert_program(parse_program(":: q[1] *= RY(3);"))
    assert pretty_print(inverse).splitlines()[-1] == "q[1] *= RY[lam x. 2*pi - x](3);"


def test_procedures_are_renamed(sqlog):
    inverse = invert_program(sqlog)
    assert [d.name for d in inverse.decls] == ["f_inv", "g_inv"]
    assert inverse.main.proc == "f_inv"
    assert inverse.vars == sqlog.vars


def test_inverse_names():
    assert inverse_name("f", set()) == "f_inv"
    assert inverse_name("f_inv", set()) == "f"
    assert inverse_name("f_inv", {"f"}) == "f_inv_inv"
    assert inverse_name("f", {"f_inv"}) == "f_inv2"


@pytest.mark.parametrize("fixture, sizes", [
    ("sqlog", {"q1": 4, "q2": 2}),
    ("search", {"q1": 6, "q2": 1}),
])
def test_inverse_undoes_the_program(fixture, sizes, request):
    program = request.getfixturevalue(fixture)
    forward = extract_unitary(program, sizes)
    backward = extract_unitary(invert_program(program), sizes)
    assert_allclose(backward @ forward, np.eye(forward.shape[0]), atol=1e-9)


def test_double_inverse_has_the_same_unitary(sqlog):
    sizes = {"q1": 3, "q2": 2}
    twice = invert_program(invert_program(sqlog))
    assert [d.name for d in twice.decls] == ["f", "g"]
    assert_allclose(extract_unitary(twice, sizes), extract_unitary(sqlog, sizes), atol=1e-9)


@pytest.mark.parametrize("fixture", ["search", "sqlog", "nonhalving", "double_recursion"])
def test_inversion_preserves_the_verdict(fixture, request):
    program = request.getfixturevalue(fixture)
    assert verdict(invert_program(program)).is_plp == verdict(program).is_plp


@pytest.mark.parametrize("seed", range(100))
def test_random_program_then_its_inverse_is_the_identity(seed):
    program = ProgramFuzzer(seed).runnable_program()
    inverse = invert_program(program)
    forward = extract_unitary(program, RUN_SIZES)
    backward = extract_unitary(inverse, RUN_SIZES)
    assert_allclose(backward @ forward, np.eye(32), atol=1e-9)
    assert verdict(inverse).is_plp


@pytest.mark.parametrize("perm_mode", ["compact", "logdepth"])
@pytest.mark.parametrize("seed", range(10))
def test_compiled_program_and_inverse_compose_to_the_identity(seed, perm_mode):
    program = ProgramFuzzer(seed).runnable_program()
    forward = compile_program(program, RUN_SIZES, perm_mode)
    backward = compile_program(invert_program(program), RUN_SIZES, perm_mode)
    rng = np.random.default_rng(seed)
    for _ in range(3):
        vector = rng.normal(size=32) + 1j * rng.normal(size=32)
        state = make_state(5, vector / np.linalg.norm(vector))
        restored = simulate_circuit(backward, simulate_circuit(forward, state))
        assert_allclose(restored.to_array(), state.to_array(), atol=1e-9)


@pytest.mark.parametrize("fixture, sizes", [
    ("sqlog", {"q1": 4, "q2": 2}),
    ("search", {"q1": 6, "q2": 1}),
])
def test_compiled_inverse_undoes_the_compiled_program(fixture, sizes, request):
    program = request.getfixturevalue(fixture)
    forward = compile_program(program, sizes, "logdepth")
    backward = compile_program(invert_program(program), sizes, "logdepth")
    total = sum(sizes.values())
    for index in (0, 1, 2 ** total - 1):
        state = make_state(total, index=index)
        restored = simulate_circuit(backward, simulate_circuit(forward, state))
        assert_allclose(restored.to_array(), state.to_array(), atol=1e-9)
