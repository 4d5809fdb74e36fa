"""
Command-line entry point for the PLP toolchain.

Subcommands live in ``plp/commands/*_command.py``; each module exposes a
``setup(cli)`` that registers its command, the same way extensions are
loaded one file at a time.
"""
import argparse
import importlib
import json
import logging
import pkgutil
import sys
from typing import Dict, List, Optional

from . import commands as command_package
from .analysis import check_source
from .ast import Program
from .config import plp_config
from .errors import CircuitFormatError, PlpError, SizeError
from .utils import load_config

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOGGING_LEVELS: Dict[str, int] = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL
}


def setup_logging(level_name: str):
    log_level: int = LOGGING_LEVELS.get(level_name.upper(), logging.INFO)
    logging.basicConfig(
        level=log_level,
        format='%(asctime)s %(levelname)-8s %(name)-15s %(message)s',
        handlers=[logging.StreamHandler()],
        force=True
    )
    effective_level_name: str = logging.getLevelName(logging.getLogger().getEffectiveLevel())
    logger.debug(f"Root logger initialized. Effective log level set to: {effective_level_name}")

    logging.getLogger('lark').setLevel(logging.WARNING)
    logging.getLogger('matplotlib').setLevel(logging.WARNING)


def read_source(path: str) -> str:
    with open(path, 'r') as f:
        return f.read()


def load_program(path: str) -> Optional[Program]:
    """Parse and check a source file; diagnostics are logged and give None."""
    program, diagnostics = check_source(read_source(path))
    for diagnostic in diagnostics:
        logger.error(diagnostic.format(path))
    if diagnostics:
        return None
    logger.info(f"Parsed and checked '{path}'.")
    return program


def write_text(path: str, text: str):
    with open(path, 'w') as f:
        f.write(text)
    logger.info(f"Wrote '{path}'.")


class Command:
    """Base class for subcommands."""
    name: str = ""
    help: str = ""

    def __init__(self, cli: "PlpCli"):
        self.cli = cli

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    def run(self, args: argparse.Namespace) -> int:
        raise NotImplementedError


class PlpCli:
    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def add_command(self, command: Command) -> None:
        self.commands[command.name] = command

    def load_commands(self) -> None:
        for module_info in pkgutil.iter_modules(command_package.__path__):
            if module_info.name.endswith("_command"):
                module = importlib.import_module(f"{command_package.__name__}.{module_info.name}")
                module.setup(self)
                logger.debug(f"Loaded command module: {module_info.name}")

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog="plp", description="Toolchain for the PLP quantum language.")
        parser.add_argument("--config", metavar="PATH", default=None,
                            help=f"JSON configuration file (default: {CONFIG_FILE} if present)")
        parser.add_argument("--log-level", metavar="LEVEL", default=None,
                            choices=sorted(LOGGING_LEVELS, key=LOGGING_LEVELS.get), type=str.upper,
                            help="override the configured log level")
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True
        for name in sorted(self.commands):
            command = self.commands[name]
            command.add_arguments(subparsers.add_parser(name, help=command.help, description=command.help))
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        if not self.commands:
            self.load_commands()
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_OK if e.code in (0, None) else EXIT_USAGE

        try:
            load_config(args.config or CONFIG_FILE, required=args.config is not None)
        except (FileNotFoundError, json.JSONDecodeError) as e:
            setup_logging(args.log_level or "INFO")
            logger.error(f"Error loading configuration from '{args.config or CONFIG_FILE}': {e}.")
            return EXIT_USAGE
        setup_logging(args.log_level or plp_config.log_level)

        try:
            return self.commands[args.command].run(args)
        except (SizeError, CircuitFormatError) as e:
            logger.error(str(e))
            return EXIT_USAGE
        except OSError as e:
            logger.error(f"{e.strerror or e}: '{e.filename}'" if e.filename else str(e))
            return EXIT_USAGE
        except PlpError as e:
            logger.error(str(e))
            return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    return PlpCli().run(argv if argv is not None else sys.argv[1:])
