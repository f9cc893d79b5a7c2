import math

import pytest

from asmcheck import ltl
from asmcheck.bir_writer import emit_bir_text
from asmcheck.checker import Checker
from asmcheck.domains import build_domain_table
from asmcheck.evaluator import evaluator_for
from asmcheck.exceptions import TranslationError
from asmcheck.globals import Gl
from asmcheck.gts import Allocate, Assert, Assign, GuardedCmd, RecordType, VarRef, Const
from asmcheck.model import Literal
from asmcheck.parser import parse_source
from asmcheck.translator import Translator, translate_model

from conftest import load_model, read_fixture
from test_parser import ALL_FIXTURES


def par_of_conditionals(n: int) -> str:
    decls = "\n".join(f"  dynamic controlled f{i}: Boolean" for i in range(1, n + 1))
    children = "\n".join(f"      if b then f{i} := true endif" for i in range(1, n + 1))
    inits = "\n".join(f"  function f{i} = false" for i in range(1, n + 1))
    return f"""
asm lattice{n}
import StandardLibrary
signature:
  dynamic monitored b: Boolean
{decls}
definitions:
  main rule r_Main =
    par
{children}
    endpar
default init s0:
{inits}
"""


@pytest.mark.parametrize("n, created", [(2, 2), (3, 6), (4, 14)])
def test_lattice_intermediate_locations(n, created):
    translator = Translator(parse_source(par_of_conditionals(n)))
    system = translator.translate()
    assert [(children, count) for _, children, count in translator.lattices] == [(n, created)]
    labels = [loc.label for loc in system.main.locations]
    assert len(labels) == len(set(labels))
    k = translator.lattices[0][0]
    assert sum(1 for label in labels if label.startswith(f"loc{k}_")) == created


def test_guards_stack_is_balanced():
    translator = Translator(load_model("oneWayTrafficLightControl.asm"))
    translator.translate()
    assert translator.stack.items == []
    assert translator.stack.pushes == translator.stack.pops > 0


def test_subset_domain_matches_golden_text():
    system = translate_model(load_model("subsetDomain.asm"))
    assert emit_bir_text(system) == read_fixture("subsetDomain.bir")


def test_main_thread_shape():
    system = translate_model(load_model("subsetDomain.asm"))
    main = system.main
    assert main.name == Gl.MAIN_THREAD
    assert main.init_location == Gl.INIT_LOCATION
    assert [loc.label for loc in main.locations] == [Gl.INIT_LOCATION, Gl.FIRST_LOCATION, Gl.END_LOCATION]
    end = main.location(Gl.END_LOCATION)
    assert end.commands == [GuardedCmd(None, (), True, Gl.FIRST_LOCATION)]
    body = main.location(Gl.FIRST_LOCATION).commands[0]
    assert not body.visible
    assert body.actions[0] == Assign(VarRef("foo"), Const(2))
    assert isinstance(body.actions[1], Assert)


def test_monitored_function_gets_an_environment_thread():
    system = translate_model(load_model("sluiceGateControl.asm"))
    env = [t for t in system.threads if t.kind == Gl.MONITORED]
    assert env
    for thread in env:
        assert thread.name.endswith(Gl.MONITORED_SUFFIX)
        assert not thread.active_at_start
        assert [loc.label for loc in thread.locations] == [Gl.INIT_LOCATION]
        assert all(cmd.visible and cmd.target == Gl.INIT_LOCATION for cmd in thread.locations[0].commands)


def test_function_with_arguments_unfolds_per_tuple():
    source = """
asm unfold
import StandardLibrary
signature:
  enum domain Id = {AA | BB | CC}
  dynamic controlled seen: Prod(Id, Boolean) -> Boolean
definitions:
  main rule r_Main = skip
default init s0:
  function seen($i in Id, $b in Boolean) = false
"""
    system = translate_model(parse_source(source))
    names = [v.name for v in system.variables]
    assert len(names) == 6
    assert "seen_AA_true" in names and "seen_CC_false" in names
    assert system.symbols["seen_BB_true"] == "seen(BB, true)"


def test_abstract_domain_becomes_record():
    system = translate_model(load_model("diningPhilosophers.asm"))
    assert any(isinstance(t, RecordType) for t in system.types)
    constants = [v.name for v in system.record_constants]
    assert constants
    # every record constant is allocated by the initialization command
    init = system.main.location(Gl.INIT_LOCATION).commands[0]
    allocated = {a.target.name for a in init.actions if isinstance(a, Allocate)}
    assert set(constants) <= allocated


def test_invariants_become_always_properties():
    source = """
asm inv
import StandardLibrary
signature:
  dynamic controlled x: Boolean
definitions:
  invariant stay over x: x = true
  main rule r_Main = x := true
default init s0:
  function x = true
"""
    system = translate_model(parse_source(source))
    prop = system.property("ltl_stay")
    assert prop is not None
    assert isinstance(prop.formula, ltl.Always)


def test_update_of_monitored_function_is_rejected():
    source = """
asm bad
import StandardLibrary
signature:
  dynamic monitored b: Boolean
definitions:
  main rule r_Main = b := true
default init s0:
"""
    with pytest.raises(TranslationError, match="update of monitored function b"):
        translate_model(parse_source(source))


def test_strict_updates_assert_consistency():
    source = """
asm strict
import StandardLibrary
signature:
  dynamic controlled x: Boolean
  dynamic monitored b: Boolean
definitions:
  main rule r_Main =
    par
      if b then x := true endif
      x := false
    endpar
default init s0:
  function x = false
"""
    relaxed = translate_model(parse_source(source))
    strict = translate_model(parse_source(source), strict_updates=True)

    def messages(system):
        return [a.message for loc in system.main.locations for c in loc.commands
                for a in c.actions if isinstance(a, Assert)]

    assert not any("inconsistent update" in m for m in messages(relaxed))
    assert any("inconsistent update of x" in m for m in messages(strict))


def test_equal_valued_literals_of_different_types_stay_apart():
    source = """
asm literals
import StandardLibrary
signature:
  domain SubInt subsetof Integer
  dynamic controlled n: SubInt
  dynamic controlled b: Boolean
definitions:
  domain SubInt = {0..3}
  invariant double over n: n * 2 <= 6
  main rule r_Main =
    par
      n := 1
      b := true
    endpar
default init s0:
  function n = 0
  function b = true
"""
    assert Literal(1) != Literal(True) and Literal(1) != Literal(1.0)
    system = translate_model(parse_source(source))
    checker = Checker(system)
    states = {t for s in checker.initial_states() for t in checker.successors(s)}
    n = evaluator_for(system).layout.slot("n")
    assert {type(s.values[n]) for s in states} == {int}
    assert checker.check_ltl(system.property("ltl_double")).outcome == Gl.HOLDS


def test_non_boolean_atom_is_rejected_with_its_position():
    source = """
asm atoms
import StandardLibrary
signature:
  domain Small subsetof Integer
  dynamic controlled n: Small
definitions:
  domain Small = {0..3}
  LTLSPEC NAME ltl_bad := g(n)
  main rule r_Main = n := 1
default init s0:
  function n = 0
"""
    with pytest.raises(TranslationError, match="atom of ltl_bad is not boolean") as info:
        translate_model(parse_source(source))
    assert info.value.line == 9


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_every_location_is_unfolded_once(name):
    model = load_model(name)
    domains = build_domain_table(model)
    system = translate_model(model)
    symbols = list(system.symbols.values())
    for decl in model.function_decls:
        if decl.kind not in (Gl.CONTROLLED, Gl.MONITORED):
            continue
        expected = math.prod(len(domains.finite_values(d)) for d in decl.arg_domains)
        unfolded = [s for s in symbols if s == decl.name or s.startswith(f"{decl.name}(")]
        assert len(unfolded) == len(set(unfolded)) == expected, decl.name
