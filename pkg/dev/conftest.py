import json
import os

import pytest

from asmcheck import parse_source, translate_model, read_bir
from asmcheck.checker import Checker
from asmcheck.report import TraceRenderer

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as f:
        return f.read()


def load_model(name: str):
    return parse_source(read_fixture(name), name)


def load_system(name: str):
    if name.endswith(".bir"):
        return read_bir(read_fixture(name), name)
    return translate_model(load_model(name))


def expected_verdicts(name: str) -> dict:
    stem = os.path.splitext(name)[0]
    with open(fixture_path(f"{stem}.expected.json"), encoding="utf-8") as f:
        return json.load(f)


def reachable(system, limit: int = 200_000) -> set:
    """Visible states reachable from the initial ones."""
    checker = Checker(system)
    seen = set(checker.initial_states())
    todo = list(seen)
    while todo:
        for t in checker.successors(todo.pop()):
            if t not in seen:
                seen.add(t)
                todo.append(t)
        assert len(seen) <= limit
    return seen


def projections(system, states) -> set:
    """Location text and value of every visible slot, per state."""
    renderer = TraceRenderer(system)
    return {frozenset(renderer.bindings(s)) for s in states}


@pytest.fixture
def collatz():
    return load_system("collatz.bir")


@pytest.fixture
def subset_domain():
    return load_system("subsetDomain.asm")
