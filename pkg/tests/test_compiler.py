import math

import pytest

from plp.circuit import Control, Gate, simulate_circuit
from plp.compiler import (CompileCtx, Compiler, MergeEnv, Site, compile_program, compile_stats, orthogonal,
                          verify_compilation)
from plp.errors import CompileError
from plp.interpreter import Lengths
from plp.parser import parse_program
from plp.state_utils import parse_input_bits
from plp.statevector import SparseState

from .conftest import aligned_size, encode, sorted_strings

TOLERANCE = 1e-9


def test_straight_line_program_has_one_gate_per_statement():
    program = parse_program(":: define q; q[1] *= NOT; q[2] *= Ph[lam x. pi](0);")
    circuit = compile_program(program, {"q": 2})
    assert circuit.gates == [Gate("X", (0,)), Gate("PH", (1,), (), math.pi)]
    assert circuit.ancilla_wires == 0
    assert circuit.wire_labels == ["q[1]", "q[2]"]


def test_apply_picks_up_the_enclosing_controls():
    program = parse_program(":: define q; q[1] *= NOT;")
    compiler = Compiler(program, {"q": 6})
    ctx = CompileCtx({"q": (1, 2, 3, 4, 5, 6)}, (Control(5),), None)
    gates = compiler.compile_statement(program.main, ctx, MergeEnv())
    assert gates == [Gate("X", (0,), (Control(5),))]


def test_if_is_resolved_statically():
    program = parse_program("decl f(q) { if |q| > 1 then { q[2] *= NOT; } else { q[1] *= RY(1); } } "
                            ":: call f(q);")
    circuit = compile_program(program, {"q": 1})
    assert [g.kind for g in circuit.gates] == ["RY"]


def test_qcase_branches_get_opposite_controls():
    program = parse_program(":: define c, q; qcase c[1] of { 0 -> q[1] *= NOT;, 1 -> q[1] *= RY[lam x. pi/2](0); }")
    circuit = compile_program(program, {"c": 1, "q": 1})
    assert circuit.gates == [Gate("X", (1,), (Control(0, True),)),
                             Gate("RY", (1,), (Control(0),), math.pi / 2)]


def test_orthogonality():
    low = Site("f", ((1,),), (Control(0, True),))
    high = Site("f", ((2,),), (Control(0),))
    also_high = Site("f", ((3,),), (Control(0), Control(4, True)))
    assert orthogonal(low, high)
    assert not orthogonal(high, also_high)


def test_search_at_seven_makes_two_groups_without_permutations(search):
    report = compile_stats(search, {"q1": 7, "q2": 1})
    top = [g for g in report.groups if g.level == 0]
    assert {g.key for g in top} == {("search", (3, 1)), ("search", (2, 1))}
    assert all(g.anchored and g.sites == 1 and g.selectors == 0 for g in top)
    assert all(g.permutation_gates == 0 for g in report.groups)
    assert len(report.groups) == 3


def test_search_at_fourteen_merges_both_calls(search):
    report = compile_stats(search, {"q1": 14, "q2": 1}, perm_mode="compact")
    top = [g for g in report.groups if g.level == 0]
    assert len(top) == 1
    group = top[0]
    assert group.key == ("search", (6, 1))
    assert group.sites == 2
    assert group.selectors == 1
    assert group.permutation_gates == 6
    assert len(report.groups) == 2
    assert report.ancillas == 4
    assert report.key_chain == 2


@pytest.mark.parametrize("k", range(1, 7))
def test_search_key_chain_follows_the_recursion_depth(search, k):
    assert compile_stats(search, {"q1": aligned_size(k), "q2": 1}).key_chain == k - 1


def test_search_depth_is_nondecreasing(search):
    depths = [compile_stats(search, {"q1": aligned_size(k), "q2": 1}).depth for k in range(1, 6)]
    assert depths == sorted(depths)


def test_sqlog_anchors_only_controlled_calls(sqlog):
    report = compile_stats(sqlog, {"q1": 8, "q2": 4})
    f_groups = [g for g in report.groups if g.key[0] == "f"]
    g_groups = [g for g in report.groups if g.key[0] == "g"]
    assert f_groups and not any(g.anchored for g in f_groups)
    assert g_groups and all(g.anchored and g.selectors == 0 and g.permutation_gates == 0 for g in g_groups)


@pytest.mark.parametrize("sizes", [{"q1": 2, "q2": 1}, {"q1": 6, "q2": 1}, {"q1": 7, "q2": 1}])
@pytest.mark.parametrize("perm_mode", ["compact", "logdepth"])
def test_search_circuit_matches_the_interpreter(search, sizes, perm_mode):
    circuit = compile_program(search, sizes, perm_mode=perm_mode)
    assert verify_compilation(search, sizes, circuit, samples=3, seed=11) < TOLERANCE


def test_inline_strategy_matches_the_interpreter(search):
    sizes = {"q1": 6, "q2": 1}
    report = compile_stats(search, sizes, strategy="inline")
    assert report.ancillas == 0
    assert report.key_chain == 0
    circuit = compile_program(search, sizes, strategy="inline")
    assert verify_compilation(search, sizes, circuit, samples=2, seed=3) < TOLERANCE


@pytest.mark.parametrize("perm_mode", ["compact", "logdepth"])
def test_search_circuit_at_fourteen_on_basis_inputs(search, perm_mode):
    lengths = Lengths.for_program(search, {"q1": 14, "q2": 1})
    circuit = compile_program(search, lengths, perm_mode=perm_mode)
    for x in sorted_strings(7):
        start = parse_input_bits(f"q1={encode(x)}", lengths)
        out = simulate_circuit(circuit, SparseState.basis(lengths.total, start))
        assert [i for i, _ in out.nonzero(TOLERANCE)] == [start | int("1" in x)], x


def test_sqlog_circuit_matches_the_interpreter(sqlog):
    sizes = {"q1": 8, "q2": 4}
    circuit = compile_program(sqlog, sizes)
    assert verify_compilation(sqlog, sizes, circuit, samples=2, seed=5) < TOLERANCE


def test_width_two_program_still_compiles(double_recursion):
    sizes = {"q": 4}
    circuit = compile_program(double_recursion, sizes)
    assert verify_compilation(double_recursion, sizes, circuit, samples=2, seed=1) < TOLERANCE


def test_erroneous_program_is_rejected():
    program = parse_program(":: define q; q[2] *= NOT;")
    with pytest.raises(CompileError, match="reaches an error"):
        compile_program(program, {"q": 1})


def test_ill_formed_program_is_rejected():
    program = parse_program(":: define q; call g(q);")
    with pytest.raises(CompileError, match="not well formed"):
        compile_program(program, {"q": 1})


def test_division_by_zero_in_an_angle_is_a_compile_error():
    program = parse_program(":: define q; q[1] *= Ph[lam x. pi/x](0);")
    with pytest.raises(CompileError):
        compile_program(program, {"q": 1})


def test_unknown_modes_are_rejected(search):
    with pytest.raises(CompileError):
        Compiler(search, {"q1": 2, "q2": 1}, perm_mode="fast")
    with pytest.raises(CompileError):
        Compiler(search, {"q1": 2, "q2": 1}, strategy="eager")


def test_report_row(search):
    report = compile_stats(search, {"q1": 2, "q2": 1})
    assert report.tsv_row().split("\t")[0] == "3"
    assert report.tsv_row().split("\t")[4] == "0"


def test_merge_env_groups_sites_by_key_in_first_seen_order():
    env = MergeEnv(2)
    first = Site("f", ((1, 2),), (Control(0, True),))
    other = Site("g", ((3,),), ())
    second = Site("f", ((4, 5),), (Control(0),))
    assert env.group_sites([first, other, second]) == [[first, second], [other]]
    assert vars(env) == {"level": 2, "chain": 0}


@pytest.mark.parametrize("removal", ["[-1, 1]", "[1, -1]"])
def test_multi_removal_argument_drops_the_same_wires_in_any_order(removal):
    program = parse_program(f"decl f(p) {{ p[1] *= NOT; p[2] *= NOT; }} :: define q; call f(q \\ {removal});")
    circuit = compile_program(program, {"q": 4})
    assert circuit.gates == [Gate("X", (1,)), Gate("X", (2,))]


def _second_differences(values):
    first = [b - a for a, b in zip(values, values[1:])]
    return first, [b - a for a, b in zip(first, first[1:])]


@pytest.mark.parametrize("perm_mode", ["compact", "logdepth"])
def test_search_scales_polylogarithmically(search, perm_mode):
    ks = range(1, 10)
    reports = [compile_stats(search, {"q1": aligned_size(k), "q2": 1}, perm_mode=perm_mode) for k in ks]
    depths = [r.depth for r in reports]
    steps, bends = _second_differences(depths)
    assert all(step > 0 for step in steps)
    if perm_mode == "logdepth":
        # Each level adds a step linear in log n, so depth is quadratic in log n.
        assert all(0 <= bend <= 8 for bend in bends[1:])
    for k, report in zip(ks, reports):
        n = aligned_size(k) + 1
        log_n = math.ceil(math.log2(n))
        assert report.n == n
        assert report.size <= 4 * n * (k + 1)
        assert report.key_chain == k - 1
        if perm_mode == "compact":
            assert report.ancillas <= 2 * log_n + 2
            assert report.depth <= 4 * k * k + 2 * n
        else:
            assert report.ancillas <= 2 * log_n + n
            assert report.depth <= 4 * k * k + 2


@pytest.mark.parametrize("perm_mode", ["compact", "logdepth"])
def test_sqlog_scales_polylogarithmically(sqlog, perm_mode):
    exponents = range(2, 11)
    reports = [compile_stats(sqlog, {"q1": 2 ** e, "q2": e + 1}, perm_mode=perm_mode) for e in exponents]
    depths = [r.depth for r in reports]
    assert depths == sorted(depths)
    for e, report in zip(exponents, reports):
        assert report.depth <= 2 * e * e + 4
        assert report.ancillas <= 2 * e + 2
        assert report.size <= 8 * e ** 3
