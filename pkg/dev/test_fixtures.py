import pytest

from asmcheck.checker import Checker

from conftest import expected_verdicts, load_system

QUICK = ["collatz.bir", "subsetDomain.asm", "checkAxiomAndProperty.asm", "criticalSectionProblem.asm",
         "oneWayTrafficLightControl.asm", "sluiceGateControl.asm"]
LARGE = ["ferryman.asm", "diningPhilosophers.asm", "ticTacToe_simulator.asm"]


def check_against_expected(name: str):
    expected = expected_verdicts(name)
    system = load_system(name)
    assert system.name == expected["model"]
    assert [p.name for p in system.properties] == list(expected["properties"])

    deadlock, *props = Checker(system).check()
    assert deadlock.outcome == expected["deadlock"], deadlock.message
    assert {v.name: v.outcome for v in props} == expected["properties"]
    for v in props:
        # violations come with a counterexample, holding properties without
        assert (v.trace is not None) == (v.outcome == "violated")


@pytest.mark.parametrize("name", QUICK)
def test_verdicts(name):
    check_against_expected(name)


@pytest.mark.slow
@pytest.mark.parametrize("name", LARGE)
def test_verdicts_large(name):
    check_against_expected(name)
