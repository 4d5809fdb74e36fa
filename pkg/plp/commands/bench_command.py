"""
``plp bench``: meter and circuit metrics over a sweep of sizes.
"""
import argparse
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional, Union

from ..ast import Program
from ..circuit import PERM_MODES
from ..cli import EXIT_FAILURE, EXIT_OK, Command, load_program
from ..compiler import STRATEGIES, Compiler, verify_compilation
from ..config import plp_config
from ..errors import SizeError
from ..interpreter import Lengths, meter_program

if TYPE_CHECKING:
    from ..cli import PlpCli

logger = logging.getLogger(__name__)

BENCH_HEADER = "n\tmeter\tsize\tdepth\tancillas\tkeychain\tseconds"
LOG_SIZE = "log"


@dataclass
class BenchRow:
    n: int  # total qubits of the run
    meter: int
    size: int
    depth: int
    ancillas: int
    key_chain: int
    seconds: float
    deviation: Optional[float] = None

    def tsv(self) -> str:
        return (f"{self.n}\t{self.meter}\t{self.size}\t{self.depth}\t{self.ancillas}"
                f"\t{self.key_chain}\t{self.seconds:.3f}")


def log_size(n: int) -> int:
    """``ceil(log2 n) + 1``, with n <= 1 giving 1."""
    return (math.ceil(math.log2(n)) if n > 1 else 0) + 1


def parse_sweep(text: str) -> List[int]:
    sizes = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise SizeError(f"--sizes expects natural numbers, got '{part}'")
        sizes.append(int(part))
    return sizes


def parse_fixed_sizes(text: Optional[str]) -> Dict[str, Union[int, str]]:
    """``q2=1`` or ``q2=log``; ``log`` follows the swept size."""
    fixed: Dict[str, Union[int, str]] = {}
    for part in (text or "").split(","):
        if not part.strip():
            continue
        name, _, value = part.partition("=")
        name, value = name.strip(), value.strip()
        if not name or not (value.isdigit() or value == LOG_SIZE):
            raise SizeError(f"--size expects NAME=N or NAME={LOG_SIZE}, got '{part.strip()}'")
        fixed[name] = int(value) if value.isdigit() else value
    return fixed


def sizes_for(program: Program, var: str, n: int, fixed: Dict[str, Union[int, str]]) -> Lengths:
    sizes = {var: n}
    for name, value in fixed.items():
        sizes[name] = log_size(n) if value == LOG_SIZE else value
    for name in program.vars:
        sizes.setdefault(name, 1)
    return Lengths.for_program(program, sizes)


def bench_one(program: Program, lengths: Lengths, perm_mode: Optional[str], strategy: Optional[str],
              verify: bool) -> BenchRow:
    start = time.perf_counter()
    outcome = meter_program(program, lengths)
    compiler = Compiler(program, lengths, perm_mode, strategy)
    circuit = compiler.compile()
    report = compiler.report(circuit)
    deviation = None
    if verify:
        if lengths.total <= plp_config.bench.verify_max_qubits:
            deviation = verify_compilation(program, lengths, circuit)
        else:
            logger.info(f"Skipping verification at n = {lengths.total}: above "
                        f"{plp_config.bench.verify_max_qubits} qubit(s).")
    seconds = time.perf_counter() - start
    return BenchRow(lengths.total, outcome.steps, report.size, report.depth, report.ancillas,
                    report.key_chain, seconds, deviation)


class BenchCommand(Command):
    name = "bench"
    help = "Tabulate meter and circuit metrics over a list of sizes."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("file", metavar="FILE")
        parser.add_argument("--sizes", required=True, metavar="N,N,...", help="sizes of the swept variable")
        parser.add_argument("--var", default=None, help="swept variable (default: the first one)")
        parser.add_argument("--size", default=None, metavar="q2=N|q2=log",
                            help="sizes of the other variables; unmentioned ones get 1")
        parser.add_argument("--perm", choices=PERM_MODES, default=None)
        parser.add_argument("--strategy", choices=STRATEGIES, default=None)
        parser.add_argument("--verify", action="store_true",
                            help="compare circuit and interpreter on random states at small sizes")
        parser.add_argument("--workers", type=int, default=None, metavar="K")

    def run(self, args: argparse.Namespace) -> int:
        program = load_program(args.file)
        if program is None:
            return EXIT_FAILURE
        if not program.vars:
            raise SizeError("program has no qubit variables to sweep")
        var = args.var or program.vars[0]
        if var not in program.vars:
            raise SizeError(f"unknown variable '{var}'")
        fixed = parse_fixed_sizes(args.size)
        sweeps = [sizes_for(program, var, n, fixed) for n in parse_sweep(args.sizes)]
        workers = args.workers or plp_config.bench.workers

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda lengths: bench_one(program, lengths, args.perm, args.strategy, args.verify), sweeps))

        print(BENCH_HEADER)
        failed = False
        for row in rows:
            print(row.tsv())
            if row.deviation is not None and row.deviation > plp_config.interpreter.tolerance:
                logger.error(f"Circuit disagrees with the interpreter at n = {row.n} "
                             f"(deviation {row.deviation:.3e}).")
                failed = True
        return EXIT_FAILURE if failed else EXIT_OK


def setup(cli: "PlpCli") -> None:
    cli.add_command(BenchCommand(cli))
