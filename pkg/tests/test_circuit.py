import json
import math

import numpy as np
import pytest

from plp.circuit import (AncillaPool, Circuit, Control, Gate, build_controlled_permutation, depth, deserialize,
                         routing_permutation, serialize, simulate_circuit, to_qasm, transposition_rounds)
from plp.errors import AncillaError, CircuitError, CircuitFormatError
from plp.statevector import DenseState


def x(target, *controls, negative=False):
    return Gate("X", (target,), tuple(Control(c, negative) for c in controls))


def apply_swaps(gates, wires):
    """Move wire contents through the swap gates, ignoring controls."""
    contents = {w: w for w in wires}
    for gate in gates:
        if gate.kind == "SWAP":
            a, b = gate.targets
            contents[a], contents[b] = contents[b], contents[a]
    return contents


def test_depth_examples():
    assert depth([]) == 0
    assert depth([x(0), x(1)]) == 1
    assert depth([x(0), x(1, 0), x(0)]) == 3


@pytest.mark.parametrize("build", [
    lambda: Gate("H", (0,)),
    lambda: Gate("SWAP", (0,)),
    lambda: Gate("X", (0,), (Control(0),)),
    lambda: Gate("PH", (0,)),
    lambda: Gate("RY", (0,), theta=2 * math.pi),
    lambda: Gate("X", (0,), theta=1.0),
])
def test_invalid_gates(build):
    with pytest.raises(CircuitError):
        build()


def test_gates_must_fit_the_circuit():
    with pytest.raises(CircuitError):
        Circuit(1, 0, [x(1)])


def test_simulate_not():
    circuit = Circuit(1, 0, [x(0)])
    assert simulate_circuit(circuit, DenseState.basis(1, 0)).nonzero() == [(1, 1)]


def test_simulate_fredkin():
    circuit = Circuit(3, 0, [Gate("SWAP", (1, 2), (Control(0),))])
    assert simulate_circuit(circuit, DenseState.basis(3, 0b101)).nonzero() == [(0b110, 1)]


def test_ancilla_left_dirty_is_an_error():
    circuit = Circuit(1, 1, [x(1, 0)])
    with pytest.raises(AncillaError):
        simulate_circuit(circuit, DenseState.basis(1, 1))


def test_ancilla_computed_and_uncomputed():
    circuit = Circuit(2, 1, [x(2, 0, 1), Gate("PH", (1,), (Control(2),), math.pi), x(2, 0, 1)])
    out = simulate_circuit(circuit, DenseState.basis(2, 0b11))
    assert out.nonzero()[0][0] == 0b11
    assert out.nonzero()[0][1] == pytest.approx(-1)


def test_serialize_round_trip():
    gates = [x(3, 0, negative=True), Gate("PH", (1,), (), math.pi / 3),
             Gate("SWAP", (0, 1), (Control(3),)), Gate("RY", (2,), (Control(1, True),), 0.1)]
    circuit = Circuit(3, 1, gates)
    assert deserialize(serialize(circuit)) == circuit


def test_empty_circuit_round_trip():
    assert deserialize(serialize(Circuit(0, 0, []))) == Circuit(0, 0, [])


def test_wire_labels_default():
    assert Circuit(2, 1, []).wire_labels == ["q[1]", "q[2]", "ancilla 1"]


def test_deserialize_reports_the_first_bad_record():
    document = json.loads(serialize(Circuit(2, 0, [x(0), x(1)])))
    document["gates"][1]["targets"] = [2]
    with pytest.raises(CircuitFormatError) as info:
        deserialize(json.dumps(document))
    assert info.value.record == 1
    assert "gates[1]" in str(info.value)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format="other"),
    lambda d: d.update(version=2),
    lambda d: d.update(input_wires=-1),
    lambda d: d["gates"][0].update(kind="H"),
    lambda d: d["gates"][0].pop("targets"),
    lambda d: d["gates"][0]["controls"].append({"wire": 1, "neg": "yes"}),
])
def test_deserialize_rejects_malformed_documents(mutate):
    document = json.loads(serialize(Circuit(2, 0, [x(0)])))
    mutate(document)
    with pytest.raises(CircuitFormatError):
        deserialize(json.dumps(document))


def test_deserialize_rejects_non_json():
    with pytest.raises(CircuitFormatError):
        deserialize("not json")


def test_qasm_output():
    circuit = Circuit(2, 0, [x(1, 0, negative=True), Gate("RY", (0,), (), 0.5)])
    lines = to_qasm(circuit).splitlines()
    assert lines[0] == "OPENQASM 3.0;"
    assert "qubit[2] q;" in lines
    assert "negctrl @ x q[0], q[1];" in lines
    assert "ry(1.0) q[0];" in lines


def test_pool_reuses_the_lowest_free_wire():
    pool = AncillaPool(5)
    a, b, c = pool.allocate(), pool.allocate(), pool.allocate()
    assert (a, b, c) == (5, 6, 7)
    pool.release(b)
    pool.release(a)
    assert pool.allocate() == 5
    assert pool.high_water == 3
    assert pool.in_use == 2
    with pytest.raises(AncillaError):
        pool.release(9)


def test_routing_permutation_fills_vacated_wires():
    perm = routing_permutation([0, 1, 6], [3, 4, 6])
    assert perm == {0: 3, 1: 4, 6: 6, 3: 0, 4: 1}


def test_transposition_rounds_realize_a_cycle():
    perm = {w: (w + 1) % 7 for w in range(7)}
    first, second = transposition_rounds(perm)
    gates = [Gate("SWAP", pair) for pair in first + second]
    contents = apply_swaps(gates, range(7))
    assert all(contents[perm[w]] == w for w in range(7))


def test_identity_permutation_is_empty():
    assert build_controlled_permutation({0: 0, 1: 1}, 2, "compact", AncillaPool(3)) == []


def test_half_swap_is_one_round_of_fredkins():
    perm = {0: 3, 1: 4, 2: 5, 3: 0, 4: 1, 5: 2}
    gates = build_controlled_permutation(perm, 6, "compact", AncillaPool(7))
    assert len(gates) == 3
    assert all(g.kind == "SWAP" and g.controls == (Control(6),) for g in gates)
    assert depth(gates) == 3


@pytest.mark.parametrize("perm", [
    {w: (w + 1) % 64 for w in range(64)},
    {w: (w + 32) % 64 for w in range(64)},
], ids=["cycle", "half-swap"])
def test_logdepth_permutation_bounds(perm):
    pool = AncillaPool(65)
    gates = build_controlled_permutation(perm, 64, "logdepth", pool)
    assert depth(gates) <= 14
    assert len(gates) <= 128
    assert pool.in_use == 0
    contents = apply_swaps(gates, range(64))
    assert all(contents[perm[w]] == w for w in range(64))


def test_logdepth_permutation_restores_its_copies():
    perm = {0: 1, 1: 2, 2: 3, 3: 0, 4: 5, 5: 4}
    pool = AncillaPool(7)
    gates = build_controlled_permutation(perm, 6, "logdepth", pool)
    circuit = Circuit(7, pool.high_water, gates)
    expected = {0: 0b1011000, 1: 0b1101001}
    for control in (0, 1):
        start = (0b101100 << 1) | control
        out = simulate_circuit(circuit, DenseState.basis(7, start))
        assert [index for index, _ in out.nonzero(1e-9)] == [expected[control]]


def permuted_index(index, perm, size):
    """Basis index after moving the contents of data wire w to perm[w] when the control (last wire) is 1."""
    bits = [(index >> (size - w)) & 1 for w in range(size + 1)]
    if bits[size]:
        moved = list(bits)
        for source, target in perm.items():
            moved[target] = bits[source]
        bits = moved
    return sum(bit << (size - w) for w, bit in enumerate(bits))


@pytest.mark.parametrize("mode", ["compact", "logdepth"])
@pytest.mark.parametrize("seed", range(200))
def test_random_controlled_permutations_on_every_basis_state(seed, mode):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(2, 9))
    perm = {w: int(t) for w, t in enumerate(rng.permutation(size))}
    pool = AncillaPool(size + 1)
    gates = build_controlled_permutation(perm, size, mode, pool)
    assert pool.in_use == 0
    circuit = Circuit(size + 1, pool.high_water, gates)
    # Distinct amplitudes on every basis state, so one run checks them all.
    dimension = 2 ** (size + 1)
    amplitudes = np.arange(1, dimension + 1, dtype=complex)
    amplitudes /= np.linalg.norm(amplitudes)
    out = simulate_circuit(circuit, DenseState(amplitudes, size + 1)).to_array()
    expected = np.zeros(dimension, dtype=complex)
    for index in range(dimension):
        expected[permuted_index(index, perm, size)] = amplitudes[index]
    np.testing.assert_allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("size", [2, 3, 16, 100, 257, 1024, 4096])
def test_logdepth_permutation_depth_is_logarithmic(size):
    rng = np.random.default_rng(size)
    perm = {w: int(t) for w, t in enumerate(rng.permutation(size))}
    pool = AncillaPool(size + 1)
    gates = build_controlled_permutation(perm, size, "logdepth", pool)
    assert depth(gates) <= 2 * math.ceil(math.log2(size)) + 2
    assert len(gates) <= 2 * size
    assert pool.high_water < size
