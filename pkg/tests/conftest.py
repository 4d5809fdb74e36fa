import itertools
from pathlib import Path

import pytest

from plp.parser import parse_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_path(name: str) -> Path:
    return CORPUS / name


def load_corpus(name: str):
    return parse_program(corpus_path(name).read_text())


def aligned_size(k: int) -> int:
    """Sizes where every recursive call of ``search`` splits evenly: 2(2^k - 1)."""
    return 2 * (2 ** k - 1)


@pytest.fixture
def search():
    return load_corpus("search.plp")


@pytest.fixture
def sqlog():
    return load_corpus("sqlog.plp")


@pytest.fixture
def nonhalving():
    return load_corpus("search_nonhalving.plp")


@pytest.fixture
def double_recursion():
    return load_corpus("double_recursion.plp")


@pytest.fixture
def program():
    """Parse a source string."""
    return parse_program


CHARACTERS = {"0": "00", "1": "01", "2": "10"}


def encode(x: str) -> str:
    """Two qubits per character of a string over 0, 1, 2."""
    return "".join(CHARACTERS[c] for c in x)


def sorted_strings(length: int):
    """Every string of the given length in 0*1*2*."""
    return [x for x in map("".join, itertools.product("012", repeat=length)) if list(x) == sorted(x)]
