"""
Quantum circuits: gates with positive and negative controls, metrics,
a circuit-level simulator, JSON and OpenQASM 3 output, ancilla pooling and
controlled permutations.

Circuit wires are numbered from 0. Input wires come first, ancillas after
them; in simulation the ancillas are the least significant bits.
"""
import heapq
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .config import plp_config
from .errors import AncillaError, CircuitError, CircuitFormatError, SizeError
from .statevector import State

logger = logging.getLogger(__name__)

GATE_KINDS = ("X", "PH", "RY", "SWAP")
FORMAT_NAME = "plp-circuit"
FORMAT_VERSION = 1
PERM_MODES = ("compact", "logdepth")

_TARGET_COUNT = {"X": 1, "PH": 1, "RY": 1, "SWAP": 2}


@dataclass(frozen=True)
class Control:
    wire: int
    negative: bool = False

    @property
    def bit(self) -> int:
        return 0 if self.negative else 1


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: Tuple[int, ...]
    controls: Tuple[Control, ...] = ()
    theta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _TARGET_COUNT[self.kind]:
            raise CircuitError(f"{self.kind} takes {_TARGET_COUNT[self.kind]} target(s), got {len(self.targets)}")
        wires = self.wires
        if len(set(wires)) != len(wires):
            raise CircuitError(f"{self.kind} gate uses a wire twice: {wires}")
        if any(w < 0 for w in wires):
            raise CircuitError(f"negative wire in {self.kind} gate: {wires}")
        if self.kind in ("PH", "RY"):
            if self.theta is None or not 0 <= self.theta < 2 * math.pi:
                raise CircuitError(f"{self.kind} angle must lie in [0, 2*pi), got {self.theta!r}")
        elif self.theta is not None:
            raise CircuitError(f"{self.kind} takes no angle")

    @property
    def wires(self) -> Tuple[int, ...]:
        return self.targets + tuple(c.wire for c in self.controls)

    def with_controls(self, controls: Sequence[Control]) -> "Gate":
        """The same gate under additional outer controls."""
        if not controls:
            return self
        return Gate(self.kind, self.targets, tuple(controls) + self.controls, self.theta)


@dataclass
class CircuitStats:
    size: int
    depth: int
    ancillas: int
    counts: Dict[str, int] = field(default_factory=dict)


@dataclass
class Circuit:
    input_wires: int
    ancilla_wires: int
    gates: List[Gate]
    wire_labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.input_wires < 0 or self.ancilla_wires < 0:
            raise CircuitError("wire counts must be natural numbers")
        if not self.wire_labels:
            self.wire_labels = default_labels(self.input_wires, self.ancilla_wires)
        if len(self.wire_labels) != self.total_wires:
            raise CircuitError(f"{len(self.wire_labels)} label(s) for {self.total_wires} wire(s)")
        for gate in self.gates:
            if any(w >= self.total_wires for w in gate.wires):
                raise CircuitError(f"{gate.kind} gate on wire outside 0..{self.total_wires - 1}: {gate.wires}")

    @property
    def total_wires(self) -> int:
        return self.input_wires + self.ancilla_wires

    def stats(self) -> CircuitStats:
        return CircuitStats(
            size=len(self.gates),
            depth=depth(self.gates),
            ancillas=self.ancilla_wires,
            counts=gate_counts(self.gates),
        )


def default_labels(input_wires: int, ancilla_wires: int) -> List[str]:
    return [f"q[{i + 1}]" for i in range(input_wires)] + [f"ancilla {k + 1}" for k in range(ancilla_wires)]


def variable_labels(lengths: Mapping[str, int], ancilla_wires: int) -> List[str]:
    labels = [f"{name}[{i}]" for name, size in lengths.items() for i in range(1, size + 1)]
    return labels + [f"ancilla {k + 1}" for k in range(ancilla_wires)]


# --- Metrics ---

def depth(gates: Union[Circuit, Sequence[Gate]]) -> int:
    """ASAP layering: a gate sits one layer after the latest gate sharing any of its wires."""
    if isinstance(gates, Circuit):
        gates = gates.gates
    level: Dict[int, int] = {}
    deepest = 0
    for gate in gates:
        layer = max((level.get(w, 0) for w in gate.wires), default=0) + 1
        for w in gate.wires:
            level[w] = layer
        deepest = max(deepest, layer)
    return deepest


def gate_counts(gates: Sequence[Gate]) -> Dict[str, int]:
    counts = Counter(g.kind for g in gates)
    return {kind: counts.get(kind, 0) for kind in GATE_KINDS}


# --- Simulation ---

def kind_matrix(kind: str, theta: Optional[float]) -> np.ndarray:
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "PH":
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    if kind == "RY":
        return np.array([[math.cos(theta), -math.sin(theta)],
                         [math.sin(theta), math.cos(theta)]], dtype=complex)
    raise CircuitError(f"{kind} has no single-qubit matrix")


def simulate_circuit(circuit: Circuit, state: State, tolerance: Optional[float] = None) -> State:
    """Run ``circuit`` on an input-wire state; ancillas must come back to |0>."""
    if state.num_wires != circuit.input_wires:
        raise SizeError(f"circuit has {circuit.input_wires} input wire(s), state has {state.num_wires}")
    if tolerance is None:
        tolerance = plp_config.interpreter.tolerance
    current = state.extend(circuit.ancilla_wires)
    for gate in circuit.gates:
        controls = [(c.wire + 1, c.bit) for c in gate.controls]
        if gate.kind == "SWAP":
            current = current.swap(gate.targets[0] + 1, gate.targets[1] + 1, controls)
        else:
            current = current.apply(kind_matrix(gate.kind, gate.theta), gate.targets[0] + 1, controls)
    return current.split_ancillas(circuit.ancilla_wires, tolerance)


# --- Serialization ---

def serialize(circuit: Circuit) -> str:
    gates = []
    for gate in circuit.gates:
        record = {"kind": gate.kind}
        if gate.theta is not None:
            record["theta"] = gate.theta
        record["targets"] = list(gate.targets)
        record["controls"] = [{"wire": c.wire, "neg": c.negative} for c in gate.controls]
        gates.append(record)
    document = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "input_wires": circuit.input_wires,
        "ancilla_wires": circuit.ancilla_wires,
        "wire_labels": circuit.wire_labels,
        "gates": gates,
    }
    return json.dumps(document, indent=2)


def _natural(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CircuitFormatError(f"{what} must be a natural number, got {value!r}")
    return value


def _gate_from_record(record, total_wires: int) -> Gate:
    if not isinstance(record, dict):
        raise ValueError("record is not an object")
    unknown = set(record) - {"kind", "theta", "targets", "controls"}
    if unknown:
        raise ValueError(f"unknown field(s) {', '.join(sorted(unknown))}")
    targets = tuple(_natural(w, "target wire") for w in record["targets"])
    controls = []
    for entry in record.get("controls", []):
        negative = entry.get("neg", False)
        if not isinstance(negative, bool):
            raise ValueError(f"control polarity must be a boolean, got {negative!r}")
        controls.append(Control(_natural(entry["wire"], "control wire"), negative))
    theta = record.get("theta")
    if theta is not None and (isinstance(theta, bool) or not isinstance(theta, (int, float))):
        raise ValueError(f"theta must be a number, got {theta!r}")
    gate = Gate(record["kind"], targets, tuple(controls), None if theta is None else float(theta))
    if any(w >= total_wires for w in gate.wires):
        raise ValueError(f"wire outside 0..{total_wires - 1}")
    return gate


def deserialize(text: str) -> Circuit:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitFormatError(f"not a JSON document: {e}") from e
    if not isinstance(document, dict) or document.get("format") != FORMAT_NAME:
        raise CircuitFormatError(f"not a {FORMAT_NAME} document")
    if document.get("version") != FORMAT_VERSION:
        raise CircuitFormatError(f"unsupported version {document.get('version')!r}")
    input_wires = _natural(document.get("input_wires"), "input_wires")
    ancilla_wires = _natural(document.get("ancilla_wires"), "ancilla_wires")
    total = input_wires + ancilla_wires
    labels = document.get("wire_labels") or default_labels(input_wires, ancilla_wires)
    if not isinstance(labels, list) or len(labels) != total or not all(isinstance(x, str) for x in labels):
        raise CircuitFormatError(f"wire_labels must be {total} string(s)")
    records = document.get("gates")
    if not isinstance(records, list):
        raise CircuitFormatError("gates must be a list")
    gates = []
    for i, record in enumerate(records):
        try:
            gates.append(_gate_from_record(record, total))
        except CircuitFormatError as e:
            raise CircuitFormatError(str(e), record=i) from e
        except (KeyError, TypeError, ValueError, AttributeError, CircuitError) as e:
            detail = f"missing field {e}" if isinstance(e, KeyError) else str(e)
            raise CircuitFormatError(detail, record=i) from e
    logger.debug(f"Read circuit with {len(gates)} gate(s) on {total} wire(s).")
    return Circuit(input_wires, ancilla_wires, gates, labels)


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM 3 text. ``ry`` gets twice the angle, since ``RY`` here is not half-angle."""
    lines = [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        f"qubit[{circuit.total_wires}] q;",
    ]
    lines += [f"// q[{i}] = {label}" for i, label in enumerate(circuit.wire_labels)]
    for gate in circuit.gates:
        if gate.kind == "X":
            name = "x"
        elif gate.kind == "PH":
            name = f"p({gate.theta!r})"
        elif gate.kind == "RY":
            name = f"ry({2 * gate.theta!r})"
        else:
            name = "swap"
        modifiers = "".join("negctrl @ " if c.negative else "ctrl @ " for c in gate.controls)
        operands = ", ".join(f"q[{w}]" for w in [c.wire for c in gate.controls] + list(gate.targets))
        lines.append(f"{modifiers}{name} {operands};")
    return "\n".join(lines) + "\n"


# --- Ancillas and permutations ---

class AncillaPool:
    """Hands out ancilla wires from ``first_wire`` on, always the lowest free one."""

    def __init__(self, first_wire: int):
        self.first_wire = first_wire
        self._next = first_wire
        self._free: List[int] = []
        self._in_use: Set[int] = set()

    def allocate(self) -> int:
        if self._free:
            wire = heapq.heappop(self._free)
        else:
            wire = self._next
            self._next += 1
        self._in_use.add(wire)
        logger.debug(f"Allocated ancilla wire {wire} ({len(self._in_use)} in use).")
        return wire

    def release(self, wire: int):
        if wire not in self._in_use:
            raise AncillaError(f"wire {wire} is not an allocated ancilla")
        self._in_use.remove(wire)
        heapq.heappush(self._free, wire)

    @property
    def in_use(self) -> int:
        return len(self._in_use)

    @property
    def high_water(self) -> int:
        return self._next - self.first_wire


def routing_permutation(source: Sequence[int], target: Sequence[int]) -> Dict[int, int]:
    """A bijection moving ``source[j]`` to ``target[j]``; displaced target wires fill the vacated source wires."""
    if len(source) != len(target):
        raise CircuitError(f"cannot route {len(source)} wire(s) onto {len(target)}")
    perm = dict(zip(source, target))
    displaced = [w for w in target if w not in perm]
    vacated = sorted(w for w in source if w not in set(target))
    perm.update(zip(displaced, vacated))
    return perm


def _cycles(perm: Mapping[int, int]) -> List[List[int]]:
    seen: Set[int] = set()
    cycles = []
    for start in sorted(perm):
        if start in seen:
            continue
        cycle = []
        wire = start
        while wire not in seen:
            seen.add(wire)
            cycle.append(wire)
            wire = perm[wire]
        if len(cycle) > 1:
            cycles.append(cycle)
    return cycles


def transposition_rounds(perm: Mapping[int, int]) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
    """Split a permutation into two rounds of disjoint swaps, round one applied first.

    A cycle ``a_0 -> a_1 -> ... -> a_{m-1}`` is the product of two
    reflections: ``a_i <-> a_{-i}`` followed by ``a_i <-> a_{1-i}``.
    """
    if sorted(perm) != sorted(perm.values()):
        raise CircuitError("not a permutation")
    first: List[Tuple[int, int]] = []
    second: List[Tuple[int, int]] = []
    for cycle in _cycles(perm):
        m = len(cycle)
        for i in range(m):
            j = (-i) % m
            if i < j:
                first.append((cycle[i], cycle[j]))
            j = (1 - i) % m
            if i < j:
                second.append((cycle[i], cycle[j]))
    return first, second


def build_controlled_permutation(perm: Mapping[int, int], control: int, mode: str,
                                 pool: AncillaPool) -> List[Gate]:
    """Gates applying ``perm`` to wire contents when ``control`` is 1."""
    if mode not in PERM_MODES:
        raise CircuitError(f"unknown permutation mode {mode!r}")
    rounds = [r for r in transposition_rounds(perm) if r]
    if not rounds:
        return []
    if mode == "compact":
        return [Gate("SWAP", pair, (Control(control),)) for r in rounds for pair in r]

    copies_needed = max(len(r) for r in rounds)
    copies = [control]
    fan_out: List[Gate] = []
    while len(copies) < copies_needed:
        layer = list(copies)
        for source in layer:
            if len(copies) == copies_needed:
                break
            wire = pool.allocate()
            fan_out.append(Gate("X", (wire,), (Control(source),)))
            copies.append(wire)
    logger.debug(f"Controlled permutation fans control {control} out to {len(copies)} copies.")
    swaps = [Gate("SWAP", pair, (Control(copies[k]),)) for r in rounds for k, pair in enumerate(r)]
    for wire in reversed(copies[1:]):
        pool.release(wire)
    return fan_out + swaps + list(reversed(fan_out))
