import numpy as np
import pytest
from numpy.testing import assert_allclose

from plp.errors import SizeError
from plp.interpreter import Lengths
from plp.state_utils import (basis_state, format_amplitudes, parse_input_bits, parse_size_assignment,
                             read_amplitudes, write_amplitudes)
from plp.statevector import make_state


def test_size_assignment():
    assert parse_size_assignment("q1=14,q2=1") == {"q1": 14, "q2": 1}
    assert parse_size_assignment(" q1 = 3 ") == {"q1": 3}


@pytest.mark.parametrize("text", ["q1", "q1=-1", "q1=x", "q1=1,q1=2"])
def test_bad_size_assignment(text):
    with pytest.raises(SizeError):
        parse_size_assignment(text)


def test_input_bits_are_concatenated_in_variable_order():
    lengths = Lengths([("q1", 4), ("q2", 1)])
    assert parse_input_bits("q1=0001,q2=0", lengths) == 0b00010
    assert parse_input_bits("q2=1", lengths) == 0b00001


@pytest.mark.parametrize("text", ["q1=01", "q1=0002", "q3=1"])
def test_bad_input_bits(text):
    with pytest.raises(SizeError):
        parse_input_bits(text, Lengths([("q1", 4)]))


def test_amplitude_file_round_trip(tmp_path):
    state = make_state(2, [0.5, -0.5j, 0, np.sqrt(0.5)])
    path = tmp_path / "state.txt"
    write_amplitudes(str(path), state)
    assert_allclose(read_amplitudes(str(path)), state.to_array(), atol=1e-9)


def test_amplitude_file_needs_two_columns(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 0 0\n")
    with pytest.raises(SizeError):
        read_amplitudes(str(path))


def test_format_amplitudes_skips_small_entries():
    state = make_state(2, [0, 1, 1e-15, 0])
    assert format_amplitudes(state) == "01 1+0j"


def test_format_amplitudes_with_no_wires():
    assert format_amplitudes(basis_state(0, 0)) == "- 1+0j"
