"""
``plp run``: execute a program on a basis state or an amplitude file.
"""
import argparse
import logging
from typing import TYPE_CHECKING

from ..cli import EXIT_FAILURE, EXIT_OK, Command, load_program
from ..config import plp_config
from ..interpreter import Lengths, meter_program, run_program
from ..state_utils import (basis_state, format_amplitudes, parse_input_bits, parse_size_assignment,
                           read_amplitudes, write_amplitudes)
from ..statevector import make_state

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)


class RunCommand(Command):
    name = "run"
    help = "Run a program and print the nonzero amplitudes of the final state."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("file", metavar="FILE")
        parser.add_argument("--size", required=True, metavar="q1=N,...", help="length of every qubit list")
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--input", metavar="q1=BITS,...", help="basis input, per variable")
        source.add_argument("--state", metavar="FILE", help="amplitude file, one 're im' pair per line")
        parser.add_argument("--steps", action="store_true", help="print the step meter")
        parser.add_argument("-o", "--output", metavar="OUT", help="write the final amplitudes to OUT")
        parser.add_argument("--meter-only", action="store_true",
                            help="compute status and meter classically, without a statevector")

    def run(self, args: argparse.Namespace) -> int:
        program = load_program(args.file)
        if program is None:
            return EXIT_FAILURE
        lengths = Lengths.for_program(program, parse_size_assignment(args.size))
        size = lengths.total

        if args.meter_only:
            outcome = meter_program(program, lengths)
            print(f"status: {outcome.status.value}")
            print(f"steps: {outcome.steps}")
            return EXIT_OK if outcome.ok else EXIT_FAILURE

        sparse = size > plp_config.interpreter.dense_qubit_limit
        if args.state:
            state = make_state(size, read_amplitudes(args.state), sparse=sparse)
        else:
            state = basis_state(size, parse_input_bits(args.input or "", lengths), sparse=sparse)

        outcome = run_program(program, lengths, state)
        if not outcome.ok:
            logger.error(f"Program reached an error after {outcome.steps} step(s).")
            return EXIT_FAILURE
        text = format_amplitudes(outcome.state)
        if text:
            print(text)
        if args.steps:
            print(f"steps: {outcome.steps}")
        if args.output:
            write_amplitudes(args.output, outcome.state)
        return EXIT_OK


def setup(cli: "PlpCli") -> None:
    cli.add_command(RunCommand(cli))
