"""
``plp check``: well-formedness and PLP membership of source files.
"""
import argparse
import logging
from typing import TYPE_CHECKING

from ..analysis import check_source, verdict
from ..cli import EXIT_FAILURE, EXIT_OK, Command, read_source

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)


class CheckCommand(Command):
    name = "check"
    help = "Report diagnostics and the PLP verdict of each file."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("files", nargs="+", metavar="FILE")
        parser.add_argument("--verbose", action="store_true",
                            help="also print per-procedure widths and recursive components")

    def run(self, args: argparse.Namespace) -> int:
        all_plp = True
        several = len(args.files) > 1
        for path in args.files:
            prefix = f"{path}: " if several else ""
            program, diagnostics = check_source(read_source(path))
            if diagnostics:
                for diagnostic in diagnostics:
                    print(diagnostic.format(path))
                print(f"{prefix}PLP: no (not well-formed)")
                all_plp = False
                continue

            result = verdict(program)
            for diagnostic in result.diagnostics:
                print(diagnostic.format(path))
            print(f"{prefix}{result.summary()}")
            if args.verbose:
                for proc, width in result.procedure_widths.items():
                    print(f"  width {proc} = {width}")
                for component in result.recursive_components:
                    print(f"  recursive component: {', '.join(sorted(component))}")
            all_plp = all_plp and result.is_plp
        return EXIT_OK if all_plp else EXIT_FAILURE


def setup(cli: "PlpCli") -> None:
    cli.add_command(CheckCommand(cli))
