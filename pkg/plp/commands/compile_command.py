"""
``plp compile``: turn a program at fixed sizes into a circuit.
"""
import argparse
import logging
from typing import TYPE_CHECKING

from ..circuit import PERM_MODES, serialize, to_qasm
from ..cli import EXIT_FAILURE, EXIT_OK, Command, load_program, write_text
from ..compiler import STRATEGIES, Compiler
from ..state_utils import parse_size_assignment

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)

STATS_HEADER = "n\tsize\tdepth\tancillas\tkeychain"


class CompileCommand(Command):
    name = "compile"
    help = "Compile a program to a circuit at the given sizes."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("file", metavar="FILE")
        parser.add_argument("--size", required=True, metavar="q1=N,...")
        parser.add_argument("--perm", choices=PERM_MODES, default=None,
                            help="controlled permutation layout (default from config)")
        parser.add_argument("--strategy", choices=STRATEGIES, default=None,
                            help="merge recursive calls, or inline them in depth")
        parser.add_argument("-o", "--output", metavar="circuit.json")
        parser.add_argument("--qasm", metavar="OUT", help="also write OpenQASM 3")
        parser.add_argument("--stats", action="store_true", help="print size, depth, ancillas and key chain")

    def run(self, args: argparse.Namespace) -> int:
        program = load_program(args.file)
        if program is None:
            return EXIT_FAILURE
        compiler = Compiler(program, parse_size_assignment(args.size), args.perm, args.strategy)
        circuit = compiler.compile()

        if args.output:
            write_text(args.output, serialize(circuit) + "\n")
        if args.qasm:
            write_text(args.qasm, to_qasm(circuit))
        if args.stats:
            report = compiler.report(circuit)
            print(STATS_HEADER)
            print(report.tsv_row())
            logger.debug(f"Gate counts: {report.counts}")
        if not (args.output or args.qasm or args.stats):
            print(serialize(circuit))
        return EXIT_OK


def setup(cli: "PlpCli") -> None:
    cli.add_command(CompileCommand(cli))
