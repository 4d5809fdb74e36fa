"""
``plp invert``: write the inverse program.
"""
import argparse
import logging
from typing import TYPE_CHECKING

from ..cli import EXIT_FAILURE, EXIT_OK, Command, load_program, write_text
from ..inverse import invert_program
from ..parser import pretty_print

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)


class InvertCommand(Command):
    name = "invert"
    help = "Write a program computing the inverse unitary."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", metavar="IN")
        parser.add_argument("-o", "--output", required=True, metavar="OUT")

    def run(self, args: argparse.Namespace) -> int:
        program = load_program(args.input)
        if program is None:
            return EXIT_FAILURE
        write_text(args.output, pretty_print(invert_program(program)))
        return EXIT_OK


def setup(cli: "PlpCli") -> None:
    cli.add_command(InvertCommand(cli))
