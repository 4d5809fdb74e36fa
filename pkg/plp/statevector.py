"""
Statevector backends.

Wires are numbered from 1. Wire 1 is the most significant bit of a basis
index, so wire ``j`` of an ``n``-wire state is tensor axis ``j - 1``.
Both backends are immutable from the outside: every operation returns a
new state.
"""
import logging
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import AncillaError, SizeError

logger = logging.getLogger(__name__)

# (wire, required bit); a negative control requires 0.
ControlSpec = Tuple[int, int]

_PRUNE = 1e-15


def _check_wire(wire: int, num_wires: int):
    if not 1 <= wire <= num_wires:
        raise SizeError(f"wire {wire} outside 1..{num_wires}")


class DenseState:
    def __init__(self, amplitudes: np.ndarray, num_wires: int):
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != 2 ** num_wires:
            raise SizeError(f"expected {2 ** num_wires} amplitudes for {num_wires} wire(s), got {amplitudes.shape[0]}")
        self.num_wires = num_wires
        self._amplitudes = amplitudes

    @classmethod
    def basis(cls, num_wires: int, index: int = 0) -> "DenseState":
        if not 0 <= index < 2 ** num_wires:
            raise SizeError(f"basis index {index} outside 0..{2 ** num_wires - 1}")
        amplitudes = np.zeros(2 ** num_wires, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, num_wires)

    @classmethod
    def from_array(cls, amplitudes: np.ndarray) -> "DenseState":
        size = len(amplitudes)
        num_wires = size.bit_length() - 1
        if size != 2 ** num_wires:
            raise SizeError(f"amplitude count {size} is not a power of two")
        return cls(amplitudes, num_wires)

    def _tensor(self) -> np.ndarray:
        return self._amplitudes.copy().reshape((2,) * self.num_wires)

    def _controlled_view(self, psi: np.ndarray, controls: Sequence[ControlSpec]) -> Tuple[np.ndarray, Dict[int, int]]:
        """A view of ``psi`` restricted to the control subspace, plus the axis of every free wire in it."""
        index: List[Union[int, slice]] = [slice(None)] * self.num_wires
        for wire, bit in controls:
            _check_wire(wire, self.num_wires)
            index[wire - 1] = bit
        axes = {}
        axis = 0
        for wire in range(1, self.num_wires + 1):
            if isinstance(index[wire - 1], slice):
                axes[wire] = axis
                axis += 1
        return psi[tuple(index)], axes

    def apply(self, matrix: np.ndarray, wire: int, controls: Sequence[ControlSpec] = ()) -> "DenseState":
        _check_wire(wire, self.num_wires)
        psi = self._tensor()
        view, axes = self._controlled_view(psi, controls)
        axis = axes[wire]
        view[...] = np.moveaxis(np.tensordot(matrix, view, axes=([1], [axis])), 0, axis)
        return DenseState(psi, self.num_wires)

    def swap(self, first: int, second: int, controls: Sequence[ControlSpec] = ()) -> "DenseState":
        _check_wire(first, self.num_wires)
        _check_wire(second, self.num_wires)
        psi = self._tensor()
        view, axes = self._controlled_view(psi, controls)
        view[...] = np.swapaxes(view, axes[first], axes[second]).copy()
        return DenseState(psi, self.num_wires)

    def project(self, wire: int, bit: int) -> "DenseState":
        _check_wire(wire, self.num_wires)
        psi = self._tensor()
        index: List[Union[int, slice]] = [slice(None)] * self.num_wires
        index[wire - 1] = 1 - bit
        psi[tuple(index)] = 0
        return DenseState(psi, self.num_wires)

    def merge(self, other: "DenseState") -> "DenseState":
        return DenseState(self._amplitudes + other.to_array(), self.num_wires)

    def norm(self) -> float:
        return float(np.linalg.norm(self._amplitudes))

    def to_array(self) -> np.ndarray:
        return self._amplitudes.copy()

    def nonzero(self, threshold: float = 0.0) -> List[Tuple[int, complex]]:
        indices = np.flatnonzero(np.abs(self._amplitudes) > threshold)
        return [(int(i), complex(self._amplitudes[i])) for i in indices]

    def extend(self, count: int) -> "DenseState":
        """Append ``count`` wires in |0>, as the least significant bits."""
        if count == 0:
            return self
        zeros = np.zeros(2 ** count, dtype=complex)
        zeros[0] = 1.0
        return DenseState(np.kron(self._amplitudes, zeros), self.num_wires + count)

    def split_ancillas(self, count: int, tolerance: float) -> "DenseState":
        """Drop the last ``count`` wires, which must have returned to |0>."""
        if count == 0:
            return self
        block = self._amplitudes.reshape(2 ** (self.num_wires - count), 2 ** count)
        leaked = float(np.linalg.norm(block[:, 1:]))
        if leaked > tolerance:
            raise AncillaError(f"ancillas not restored to |0>: residual norm {leaked:.3e}")
        return DenseState(block[:, 0].copy(), self.num_wires - count)


class SparseState:
    """Same interface as :class:`DenseState` over a dict of nonzero amplitudes."""

    def __init__(self, amplitudes: Dict[int, complex], num_wires: int):
        self.num_wires = num_wires
        self._amplitudes = {i: complex(a) for i, a in amplitudes.items() if abs(a) > _PRUNE}

    @classmethod
    def basis(cls, num_wires: int, index: int = 0) -> "SparseState":
        if not 0 <= index < 2 ** num_wires:
            raise SizeError(f"basis index {index} outside 0..{2 ** num_wires - 1}")
        return cls({index: 1.0}, num_wires)

    @classmethod
    def from_array(cls, amplitudes: np.ndarray) -> "SparseState":
        dense = DenseState.from_array(amplitudes)
        return cls(dict(dense.nonzero()), dense.num_wires)

    def _shift(self, wire: int) -> int:
        _check_wire(wire, self.num_wires)
        return self.num_wires - wire

    def _satisfied(self, index: int, controls: Sequence[ControlSpec]) -> bool:
        return all((index >> (self.num_wires - wire)) & 1 == bit for wire, bit in controls)

    def apply(self, matrix: np.ndarray, wire: int, controls: Sequence[ControlSpec] = ()) -> "SparseState":
        shift = self._shift(wire)
        for w, _ in controls:
            _check_wire(w, self.num_wires)
        out: Dict[int, complex] = {}
        for index, amp in self._amplitudes.items():
            if not self._satisfied(index, controls):
                out[index] = out.get(index, 0) + amp
                continue
            bit = (index >> shift) & 1
            base = index & ~(1 << shift)
            for row in (0, 1):
                coefficient = matrix[row][bit]
                if coefficient != 0:
                    target = base | (row << shift)
                    out[target] = out.get(target, 0) + coefficient * amp
        return SparseState(out, self.num_wires)

    def swap(self, first: int, second: int, controls: Sequence[ControlSpec] = ()) -> "SparseState":
        a, b = self._shift(first), self._shift(second)
        out: Dict[int, complex] = {}
        for index, amp in self._amplitudes.items():
            if self._satisfied(index, controls) and ((index >> a) & 1) != ((index >> b) & 1):
                index ^= (1 << a) | (1 << b)
            out[index] = amp
        return SparseState(out, self.num_wires)

    def project(self, wire: int, bit: int) -> "SparseState":
        shift = self._shift(wire)
        return SparseState({i: a for i, a in self._amplitudes.items() if (i >> shift) & 1 == bit}, self.num_wires)

    def merge(self, other: "SparseState") -> "SparseState":
        out = dict(self._amplitudes)
        for index, amp in other.nonzero():
            out[index] = out.get(index, 0) + amp
        return SparseState(out, self.num_wires)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self._amplitudes.values())))

    def to_array(self) -> np.ndarray:
        array = np.zeros(2 ** self.num_wires, dtype=complex)
        for index, amp in self._amplitudes.items():
            array[index] = amp
        return array

    def nonzero(self, threshold: float = 0.0) -> List[Tuple[int, complex]]:
        return sorted((i, a) for i, a in self._amplitudes.items() if abs(a) > threshold)

    def extend(self, count: int) -> "SparseState":
        return SparseState({i << count: a for i, a in self._amplitudes.items()}, self.num_wires + count)

    def split_ancillas(self, count: int, tolerance: float) -> "SparseState":
        if count == 0:
            return self
        mask = (1 << count) - 1
        leaked = np.sqrt(sum(abs(a) ** 2 for i, a in self._amplitudes.items() if i & mask))
        if leaked > tolerance:
            raise AncillaError(f"ancillas not restored to |0>: residual norm {leaked:.3e}")
        kept = {i >> count: a for i, a in self._amplitudes.items() if not i & mask}
        return SparseState(kept, self.num_wires - count)


State = Union[DenseState, SparseState]


def make_state(num_wires: int, amplitudes: Iterable[complex] = None, index: int = 0,
               sparse: bool = False) -> State:
    """Build a basis state, or a state from explicit amplitudes, on the requested backend."""
    backend = SparseState if sparse else DenseState
    if amplitudes is None:
        return backend.basis(num_wires, index)
    array = np.asarray(list(amplitudes), dtype=complex)
    if array.shape[0] != 2 ** num_wires:
        raise SizeError(f"expected {2 ** num_wires} amplitudes for {num_wires} wire(s), got {array.shape[0]}")
    return backend.from_array(array)
