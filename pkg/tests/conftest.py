from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from harrop.parser import parse_program, parse_source

CORPUS = Path(__file__).parent.parent / "corpus"
GOLDEN = Path(__file__).parent / "golden"


def corpus_text(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def append_program():
    return parse_program(corpus_text("append.hh"))


@pytest.fixture(scope="session")
def typeof_program():
    return parse_program(corpus_text("typeof.hh"))


@pytest.fixture(scope="session")
def list_minus_program():
    return parse_program(corpus_text("list_minus.hh"))


@pytest.fixture(scope="session")
def branching_program():
    return parse_program(corpus_text("branching.hh"))


@pytest.fixture(scope="session")
def guarded_program():
    return parse_program(corpus_text("guarded.hh"))
