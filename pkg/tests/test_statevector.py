import numpy as np
import pytest
from numpy.testing import assert_allclose

from plp.errors import AncillaError, SizeError
from plp.statevector import DenseState, SparseState, make_state

NOT = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

BACKENDS = [DenseState, SparseState]


@pytest.mark.parametrize("backend", BACKENDS)
def test_wire_one_is_the_most_significant_bit(backend):
    state = backend.basis(3, 0).apply(NOT, 1)
    assert state.nonzero() == [(0b100, 1)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_negative_and_positive_controls(backend):
    state = backend.basis(3, 0b100)
    assert state.apply(NOT, 3, [(1, 1)]).nonzero() == [(0b101, 1)]
    assert state.apply(NOT, 3, [(1, 0)]).nonzero() == [(0b100, 1)]
    assert state.apply(NOT, 3, [(1, 1), (2, 0)]).nonzero() == [(0b101, 1)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_controlled_swap(backend):
    state = backend.basis(3, 0b101)
    assert state.swap(2, 3, [(1, 1)]).nonzero() == [(0b110, 1)]
    assert state.swap(2, 3, [(1, 0)]).nonzero() == [(0b101, 1)]


def test_backends_agree_on_a_superposition():
    rng = np.random.default_rng(7)
    vector = rng.normal(size=16) + 1j * rng.normal(size=16)
    vector /= np.linalg.norm(vector)
    dense, sparse = DenseState.from_array(vector), SparseState.from_array(vector)
    dense = dense.apply(H, 2, [(4, 0)]).swap(1, 3, [(2, 1)])
    sparse = sparse.apply(H, 2, [(4, 0)]).swap(1, 3, [(2, 1)])
    assert_allclose(dense.to_array(), sparse.to_array(), atol=1e-9)
    assert dense.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_project_and_merge_recombine(backend):
    state = backend.basis(2, 0).apply(H, 1).apply(H, 2)
    merged = state.project(1, 0).merge(state.project(1, 1))
    assert_allclose(merged.to_array(), state.to_array(), atol=1e-9)
    assert state.project(1, 1).norm() == pytest.approx(np.sqrt(0.5))


@pytest.mark.parametrize("backend", BACKENDS)
def test_ancillas_extend_and_split(backend):
    state = backend.basis(2, 0b10).extend(2)
    assert state.num_wires == 4
    assert state.nonzero() == [(0b1000, 1)]
    assert state.split_ancillas(2, 1e-9).nonzero() == [(0b10, 1)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_dirty_ancilla_is_an_error(backend):
    state = backend.basis(1, 0).extend(1).apply(NOT, 2)
    with pytest.raises(AncillaError):
        state.split_ancillas(1, 1e-9)


def test_zero_wires_is_the_scalar_one():
    state = make_state(0)
    assert_allclose(state.to_array(), [1.0])


def test_amplitude_count_must_match():
    with pytest.raises(SizeError):
        make_state(2, [1, 0, 0])


def test_wire_out_of_range():
    with pytest.raises(SizeError):
        DenseState.basis(2).apply(NOT, 3)
