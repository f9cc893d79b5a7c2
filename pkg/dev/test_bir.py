import pytest

from asmcheck import ltl
from asmcheck.bir_reader import read_bir
from asmcheck.bir_writer import emit_bir_text
from asmcheck.exceptions import BirSyntaxError
from asmcheck.globals import Gl
from asmcheck.gts import Assign, Binary, Const, VarRef, INT

from conftest import load_system, read_fixture
from test_parser import ALL_FIXTURES


def test_collatz_system(collatz):
    assert collatz.name == "example"
    x = collatz.variable("x")
    assert (x.type, x.kind, x.initial) == (INT, Gl.CONTROLLED, Const(100))
    main = collatz.main
    assert main.name == Gl.MAIN_THREAD and main.init_location is None
    loc0 = main.location("loc0")
    assert [c.target for c in loc0.commands] == ["loc0", "loc0"]
    assert loc0.commands[0].guard == Binary("==", Binary("%", VarRef("x"), Const(2)), Const(0))
    assert loc0.commands[1].actions == (Assign(VarRef("x"), Binary("+", Binary("*", Const(3), VarRef("x")),
                                                                  Const(1))),)
    assert all(c.visible for c in loc0.commands)


def test_collatz_properties(collatz):
    fail, hold = collatz.property("fail"), collatz.property("hold")
    assert fail.formula == ltl.Always(ltl.Implies(ltl.Atom("p"), ltl.Eventually(ltl.Atom("q"))))
    assert dict(fail.propositions)["q"] == Binary("<", VarRef("x"), Const(0))
    assert hold.formula == ltl.Always(ltl.And(ltl.Atom("p"), ltl.Atom("q")))


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_emitted_text_reads_back(name):
    system = load_system(name)
    text = emit_bir_text(system)
    again = read_bir(text, f"{name}.bir")
    assert emit_bir_text(again) == text
    assert [(v.name, v.kind) for v in again.variables] == [(v.name, v.kind) for v in system.variables]
    assert [t.name for t in again.threads] == [t.name for t in system.threads]
    for mine, theirs in zip(system.threads, again.threads):
        assert [loc.label for loc in mine.locations] == [loc.label for loc in theirs.locations]
        assert [loc.commands for loc in mine.locations] == [loc.commands for loc in theirs.locations]
    assert [p.name for p in again.properties] == [p.name for p in system.properties]
    assert [p.formula for p in again.properties] == [p.formula for p in system.properties]
    assert again.pure_functions == system.pure_functions


def test_golden_text_reads_back():
    text = read_fixture("subsetDomain.bir")
    system = read_bir(text)
    assert system.main.init_location == "loc0"
    assert system.type_named("SubInt").members == (1, 2, 3)
    assert emit_bir_text(system) == text


def test_nary_conjunction_folds_left():
    text = """
system s {
  fun all() returns boolean =
    LTL.temporalProperty(
      Property.createObservableDictionary(
        Property.createObservableKey("a", x > 0), Property.createObservableKey("b", x > 1),
        Property.createObservableKey("c", x > 2)),
      LTL.always(LTL.conjunction(LTL.prop("a"), LTL.prop("b"), LTL.prop("c"))));
  int x := 0;
  main thread MAIN() {
    loc loc0:
    do {} goto loc0;
  }
}
"""
    prop = read_bir(text).property("all")
    a, b, c = ltl.Atom("a"), ltl.Atom("b"), ltl.Atom("c")
    assert prop.formula == ltl.Always(ltl.And(ltl.And(a, b), c))


@pytest.mark.parametrize("text, message", [
    ("system s { int x := ; }", "in expression"),
    ("system s { int x; }", "main thread"),
    ("system s { main thread MAIN() { loc a: do {} goto b; } }", "unknown location b"),
    ("system s { widget x; main thread MAIN() { loc a: do {} goto a; } }", "unknown type widget"),
])
def test_malformed_text(text, message):
    with pytest.raises(BirSyntaxError, match=message):
        read_bir(text, "bad.bir")


@pytest.mark.parametrize("name", ["ferryman.asm", "diningPhilosophers.asm"])
def test_record_constants_read_back_as_variables(name):
    system = load_system(name)
    again = read_bir(emit_bir_text(system))
    constants = {v.name for v in again.variables if v.kind == Gl.STATIC_CONST}
    assert constants
    body = repr([t.locations for t in again.threads]) + repr(again.pure_functions)
    assert "RecordRef" not in body
    assert any(f"VarRef(name='{c}')" in body for c in constants)
