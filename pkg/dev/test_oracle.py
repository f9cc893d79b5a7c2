import pytest

from asmcheck import parse_source, translate_model
from asmcheck.checker import Checker
from asmcheck.globals import Gl
from asmcheck.gts import EnumValue

from asm_oracle import AsmOracle
from conftest import expected_verdicts, load_model, load_system, projections, reachable


PAR_CONFLICT = """
asm parConflict
import StandardLibrary
signature:
  enum domain Light = {RED | GREEN}
  domain Small subsetof Integer
  dynamic controlled x: Small
  dynamic controlled light: Light
  dynamic monitored go: Boolean
definitions:
  domain Small = {0..3}

  main rule r_Main =
    par
      if go then x := (x + 1) mod 4 endif
      x := 0
      choose $l in Light with $l != light do light := $l
    endpar

default init s0:
  function x = 0
  function light = RED
"""

FORALL_SWITCH = """
asm forallSwitch
import StandardLibrary
signature:
  enum domain Id = {AA | BB}
  dynamic controlled done: Id -> Boolean
  dynamic controlled turn: Id
definitions:
  main rule r_Main =
    par
      forall $i in Id with $i = turn do done($i) := true
      switch turn
        case AA: turn := BB
        otherwise turn := AA
      endswitch
    endpar

default init s0:
  function done($i in Id) = false
  function turn = AA
"""

MACRO_LET = """
asm macroLet
import StandardLibrary
signature:
  enum domain Mode = {IDLE | BUSY}
  domain Level subsetof Integer
  dynamic controlled mode: Mode
  dynamic controlled level: Level
  dynamic monitored request: Mode -> Boolean
  derived wanted: Boolean
definitions:
  domain Level = {0..2}
  function wanted = request(mode)

  rule r_set($m in Mode) =
    mode := $m

  main rule r_Main =
    let ($next = if mode = IDLE then BUSY else IDLE endif) in
      if wanted then
        par
          r_set[$next]
          if level < 2 then level := level + 1 else level := 0 endif
        endpar
      endif
    endlet

default init s0:
  function mode = IDLE
  function level = 0
"""


COLLATZ = """
asm collatz
import StandardLibrary
signature:
  domain Num subsetof Integer
  dynamic controlled x: Num
definitions:
  domain Num = {1..100}
  LTLSPEC NAME fail := g(x > 0 implies f(x < 0))
  LTLSPEC NAME hold := g(x > 0 and x <= 100)
  main rule r_Main =
    if x mod 2 = 0 then x := x / 2 else x := 3 * x + 1 endif
default init s0:
  function x = 100
"""


def checker_verdicts(system) -> dict:
    checker = Checker(system)
    return {p.name: checker.check_ltl(p).outcome for p in system.properties}


def compare(model):
    system = translate_model(model)
    oracle = AsmOracle(model)
    got = projections(system, reachable(system))
    assert got == oracle.reachable()
    assert checker_verdicts(system) == oracle.verdicts()
    return got


@pytest.mark.parametrize("name", ["checkAxiomAndProperty.asm", "subsetDomain.asm", "criticalSectionProblem.asm",
                                  "ferryman.asm"])
def test_fixture_state_space_and_verdicts_match_interpreter(name):
    assert compare(load_model(name))
    expected = expected_verdicts(name)["properties"]
    assert AsmOracle(load_model(name)).verdicts() == expected


def test_collatz_model_matches_hand_written_ir():
    model = parse_source(COLLATZ, "collatz.asm")
    states = compare(model)
    oracle = AsmOracle(model)
    assert oracle.verdicts() == {"fail": Gl.VIOLATED, "hold": Gl.HOLDS}
    hand_written = load_system("collatz.bir")
    assert projections(hand_written, reachable(hand_written)) == states
    assert {k: v for k, v in checker_verdicts(hand_written).items() if k in ("fail", "hold")} == \
        oracle.verdicts()
    assert len(states) == 26


@pytest.mark.slow
def test_as_printed_dining_properties_match_interpreter():
    model = load_model("diningPhilosophers.asm")
    oracle = AsmOracle(model)
    formulas = oracle.formulas()
    system = translate_model(model)
    checker = Checker(system)
    expected = expected_verdicts("diningPhilosophers.asm")["properties"]
    for i in range(2, 6):
        name = f"ltl_HungryToEatingPhil{i}"
        verdict = Gl.HOLDS if oracle.holds(formulas[name]) else Gl.VIOLATED
        assert checker.check_ltl(system.property(name)).outcome == verdict
        assert expected[name] == verdict


def test_first_fired_update_wins_in_par():
    states = compare(parse_source(PAR_CONFLICT, "parConflict.asm"))
    assert len(states) == 16


def test_forall_and_switch():
    states = compare(parse_source(FORALL_SWITCH, "forallSwitch.asm"))
    assert len(states) == 4
    first = {("done(AA)", False), ("done(BB)", False), ("turn", EnumValue("Id", "AA"))}
    assert frozenset(first) in states


def test_macro_let_and_derived_guard():
    states = compare(parse_source(MACRO_LET, "macroLet.asm"))
    assert len(states) == 24
