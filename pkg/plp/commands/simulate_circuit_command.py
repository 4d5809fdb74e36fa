"""
``plp simulate-circuit``: run a serialized circuit on a statevector.
"""
import argparse
import logging
from typing import TYPE_CHECKING

from ..circuit import deserialize, simulate_circuit
from ..cli import EXIT_OK, Command, read_source
from ..config import plp_config
from ..errors import SizeError
from ..state_utils import basis_state, format_amplitudes, read_amplitudes
from ..statevector import make_state

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)


class SimulateCircuitCommand(Command):
    name = "simulate-circuit"
    help = "Simulate a circuit file on a basis input or an amplitude file."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("file", metavar="FILE")
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--input", metavar="BITS", help="one bit per input wire, wire 0 first")
        source.add_argument("--state", metavar="FILE", help="amplitude file, one 're im' pair per line")

    def run(self, args: argparse.Namespace) -> int:
        circuit = deserialize(read_source(args.file))
        size = circuit.input_wires
        sparse = size > plp_config.interpreter.dense_qubit_limit
        if args.state:
            state = make_state(size, read_amplitudes(args.state), sparse=sparse)
        else:
            bits = args.input.strip()
            if len(bits) != size or set(bits) - {"0", "1"}:
                raise SizeError(f"--input must be {size} binary digit(s), got '{bits}'")
            state = basis_state(size, int(bits, 2) if bits else 0, sparse=sparse)
        text = format_amplitudes(simulate_circuit(circuit, state))
        if text:
            print(text)
        return EXIT_OK


def setup(cli: "PlpCli") -> None:
    cli.add_command(SimulateCircuitCommand(cli))
