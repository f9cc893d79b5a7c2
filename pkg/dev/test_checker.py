import pytest

from asmcheck.bir_reader import read_bir
from asmcheck.checker import Checker, Limits, check_ltl, explore
from asmcheck.globals import Gl
from asmcheck.gts import EnumValue
from asmcheck.report import TraceRenderer

from conftest import load_system

COLLATZ_FROM_100 = [100, 50, 25, 76, 38, 19, 58, 29, 88, 44, 22, 11, 34, 17, 52, 26, 13, 40, 20, 10, 5, 16, 8,
                    4, 2, 1]

STUCK = """
system stuck {
  fun settles() returns boolean =
    LTL.temporalProperty(
      Property.createObservableDictionary(Property.createObservableKey("done", x == 3)),
      LTL.eventually(LTL.always(LTL.prop("done"))));

  int x := 0;
  main thread MAIN() {
    loc loc0:
    when x < 3 do { x := x + 1; } goto loc0;
  }
}
"""

FAILING_ASSERT = """
system failing {
  int x := 0;
  main thread MAIN() {
    loc loc0:
    do invisible { x := x + 1; } goto loc1;
    loc loc1:
    do { assert(x < 2); } goto loc0;
  }
}
"""

TWO_THREADS = """
system pair {
  boolean go := false;
  int x := 0;
  main thread MAIN() {
    loc loc0:
    when go do { x := (x + 1) % 4; } goto loc0;
    when !go do { x := x; } goto loc0;
  }
  active thread ENV() {
    loc e0:
    do { go := true; } goto e0;
    do { go := false; } goto e0;
  }
}
"""


def xs(states) -> list:
    return [s.values[0] for s in states]


def test_collatz_visits_the_sequence(collatz):
    checker = Checker(collatz)
    [start] = checker.initial_states()
    walk = [start]
    while len(walk) < len(COLLATZ_FROM_100) + 3:
        [nxt] = checker.successors(walk[-1])
        walk.append(nxt)
    assert xs(walk) == COLLATZ_FROM_100 + [4, 2, 1]


def test_collatz_has_no_deadlock(collatz):
    verdict = explore(collatz)
    assert verdict.outcome == Gl.HOLDS
    assert verdict.stats.states == len(COLLATZ_FROM_100)
    assert verdict.stats.transitions == len(COLLATZ_FROM_100)


def test_collatz_response_is_violated_by_a_lasso(collatz):
    verdict = check_ltl(collatz, collatz.property("fail"))
    assert verdict.outcome == Gl.VIOLATED
    trace = verdict.trace
    assert trace.is_lasso
    values = xs(trace.states)
    assert values[0] == 100
    # consecutive states follow the Collatz step and the last one loops back
    step = {a: b for a, b in zip(COLLATZ_FROM_100, COLLATZ_FROM_100[1:])} | {1: 4}
    for a, b in zip(values, values[1:]):
        assert step[a] == b
    assert step[values[-1]] == values[trace.loop_start]
    assert set(values[trace.loop_start:]) <= {4, 2, 1}


def test_collatz_invariant_holds(collatz):
    verdict = check_ltl(collatz, collatz.property("hold"))
    assert verdict.outcome == Gl.HOLDS and verdict.trace is None
    assert verdict.stats.states > 0


def test_deadlock_is_reported_with_its_path():
    verdict = explore(read_bir(STUCK))
    assert (verdict.kind, verdict.outcome) == (Gl.DEADLOCK, Gl.VIOLATED)
    assert xs(verdict.trace.states) == [0, 1, 2, 3]
    assert not verdict.trace.is_lasso


def test_deadlock_state_stutters_for_ltl():
    system = read_bir(STUCK)
    verdicts = Checker(system).check()
    assert [(v.kind, v.outcome) for v in verdicts] == [(Gl.DEADLOCK, Gl.VIOLATED), (Gl.LTL, Gl.HOLDS)]


def test_assertion_violation():
    verdict = explore(read_bir(FAILING_ASSERT))
    assert (verdict.kind, verdict.outcome) == (Gl.ASSERTION, Gl.VIOLATED)
    assert "assertion failed in MAIN" in verdict.message
    assert verdict.stats.errors_found == 1


def test_invisible_chains_are_not_stored():
    checker = Checker(read_bir(FAILING_ASSERT))
    [start] = checker.initial_states()
    [nxt] = checker.successors(start)
    assert nxt.locations == ("loc0",)
    assert nxt.values == (1,)


def test_environment_choices_are_combined():
    checker = Checker(read_bir(TWO_THREADS))
    starts = checker.initial_states()
    # the environment thread moves once before the first main step
    assert sorted(s.values[0] for s in starts) == [False, True]
    go = next(s for s in starts if s.values[0])
    nexts = checker.successors(go)
    assert sorted((s.values[0], s.values[1]) for s in nexts) == [(False, 1), (True, 1)]


@pytest.mark.parametrize("limits", [Limits(max_states=5), Limits(max_depth=3)])
def test_bounds_give_an_error_outcome(collatz, limits):
    verdict = explore(collatz, limits)
    assert verdict.outcome == Gl.OUTCOME_ERROR
    assert verdict.message.startswith("bound exhausted")
    ltl_verdict = check_ltl(collatz, collatz.property("hold"), limits)
    assert ltl_verdict.outcome == Gl.OUTCOME_ERROR


@pytest.mark.parametrize("text", [STUCK, FAILING_ASSERT, TWO_THREADS])
def test_parallel_exploration_agrees(text):
    system = read_bir(text)
    sequential = explore(system)
    parallel = Checker(system).explore_parallel(workers=4)
    assert (parallel.kind, parallel.outcome) == (sequential.kind, sequential.outcome)
    if sequential.trace is not None:
        assert xs(parallel.trace.states)[-1] == xs(sequential.trace.states)[-1]


def test_parallel_exploration_counts_states(collatz):
    verdict = Checker(collatz).explore_parallel(workers=2)
    assert verdict.outcome == Gl.HOLDS
    assert verdict.stats.states == len(COLLATZ_FROM_100)


def test_subset_domain_runs_forever(subset_domain):
    verdicts = Checker(subset_domain).check()
    assert verdicts[0].kind == Gl.DEADLOCK
    assert verdicts[0].outcome == Gl.HOLDS


def test_collatz_counterexample_is_the_exact_sequence(collatz):
    trace = check_ltl(collatz, collatz.property("fail")).trace
    assert xs(trace.states) == COLLATZ_FROM_100
    assert trace.loop_start == COLLATZ_FROM_100.index(4)


def test_ferryman_solution_trace_replays():
    system = load_system("ferryman.asm")
    checker = Checker(system)
    verdict = checker.check_ltl(system.property("ltl_noSolution"))
    assert verdict.outcome == Gl.VIOLATED
    states = verdict.trace.states
    renderer = TraceRenderer(system)
    right = EnumValue("SideDomain", "RIGHT")

    def position(state) -> dict:
        return {name[len("position("):-1]: v for name, v in renderer.bindings(state) if name.startswith("position(")}

    assert set(position(states[-1])) == {"ferryman", "goat", "cabbage", "wolf"}
    assert all(v is right for v in position(states[-1]).values())
    for state in states:
        p = position(state)
        if p["goat"] is p["cabbage"]:
            assert p["goat"] is p["ferryman"]
        if p["wolf"] is p["goat"]:
            assert p["wolf"] is p["ferryman"]
    assert states[0] in checker.initial_states()
    for a, b in zip(states, states[1:]):
        assert b in checker.successors(a)
    assert states[verdict.trace.loop_start] in checker.successors(states[-1])


@pytest.mark.parametrize("name", ["collatz.bir", "ferryman.asm", "criticalSectionProblem.asm"])
def test_two_runs_give_the_same_verdicts(name):
    def run():
        return [(v.name, v.outcome, v.message, None if v.trace is None else (v.trace.states, v.trace.loop_start),
                 v.stats.states, v.stats.transitions)
                for v in Checker(load_system(name)).check()]

    assert run() == run()


def test_uninitialized_direction_starts_at_its_first_value():
    system = load_system("sluiceGateControl.asm")
    renderer = TraceRenderer(system)
    for state in Checker(system).initial_states():
        assert dict(renderer.bindings(state))["dir"] is EnumValue("DirectionDomain", "CLOCKWISE")
