"""
Reading and writing sizes, basis inputs and amplitude files.
"""
import logging
import re
from typing import Dict, Mapping, Optional

import numpy as np

from .config import plp_config
from .errors import SizeError
from .statevector import State, make_state

logger = logging.getLogger(__name__)

_ASSIGNMENT = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S*)\s*")


def _assignments(text: str) -> Dict[str, str]:
    result: Dict[str, str] = {}
    if not text or not text.strip():
        return result
    for part in text.split(","):
        match = _ASSIGNMENT.fullmatch(part)
        if not match:
            raise SizeError(f"expected NAME=VALUE, got '{part.strip()}'")
        name, value = match.groups()
        if name in result:
            raise SizeError(f"'{name}' assigned twice")
        result[name] = value
    return result


def parse_size_assignment(text: str) -> Dict[str, int]:
    """``"q1=14,q2=1"`` -> ``{"q1": 14, "q2": 1}``."""
    sizes = {}
    for name, value in _assignments(text).items():
        if not value.isdigit():
            raise SizeError(f"size of '{name}' must be a natural number, got '{value}'")
        sizes[name] = int(value)
    return sizes


def parse_input_bits(text: str, lengths: Mapping[str, int]) -> int:
    """Basis index of per-variable bitstrings; unmentioned variables are all zeros."""
    bits = _assignments(text)
    unknown = [name for name in bits if name not in lengths]
    if unknown:
        raise SizeError(f"input given for unknown variable(s) {', '.join(unknown)}")
    word = ""
    for name, size in lengths.items():
        value = bits.get(name, "0" * size)
        if len(value) != size or set(value) - {"0", "1"}:
            raise SizeError(f"input for '{name}' must be {size} binary digit(s), got '{value}'")
        word += value
    return int(word, 2) if word else 0


def basis_state(num_wires: int, index: int, sparse: Optional[bool] = None) -> State:
    if sparse is None:
        sparse = num_wires > plp_config.interpreter.dense_qubit_limit
    return make_state(num_wires, index=index, sparse=sparse)


def read_amplitudes(path: str) -> np.ndarray:
    """One ``re im`` pair per line, in basis index order."""
    try:
        table = np.loadtxt(path, dtype=float, comments="#", ndmin=2)
    except (OSError, ValueError) as e:
        raise SizeError(f"cannot read amplitudes from '{path}': {e}") from e
    if table.shape[0] and table.shape[1] != 2:
        raise SizeError(f"'{path}' must hold two columns (re im), found {table.shape[1]}")
    amplitudes = table[:, 0] + 1j * table[:, 1] if table.size else np.zeros(0, dtype=complex)
    logger.debug(f"Read {len(amplitudes)} amplitude(s) from '{path}'.")
    return amplitudes


def write_amplitudes(path: str, state: State, precision: Optional[int] = None):
    digits = precision or plp_config.output.precision
    array = state.to_array()
    np.savetxt(path, np.column_stack([array.real, array.imag]), fmt=f"%.{digits}g")
    logger.info(f"Wrote {len(array)} amplitude(s) to '{path}'.")


def format_complex(value: complex, precision: int) -> str:
    real = round(value.real, precision) + 0.0
    imag = round(value.imag, precision) + 0.0
    return f"{real:.{precision}g}{imag:+.{precision}g}j"


def format_amplitudes(state: State, threshold: Optional[float] = None, precision: Optional[int] = None) -> str:
    """``bitstring amplitude`` lines for every amplitude above the threshold."""
    if threshold is None:
        threshold = plp_config.output.amplitude_threshold
    digits = precision or plp_config.output.precision
    lines = []
    for index, amplitude in state.nonzero(threshold):
        bitstring = format(index, f"0{state.num_wires}b") if state.num_wires else "-"
        lines.append(f"{bitstring} {format_complex(amplitude, digits)}")
    return "\n".join(lines)
