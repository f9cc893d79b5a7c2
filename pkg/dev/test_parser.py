import pytest

from asmcheck import ltl
from asmcheck.exceptions import AsmSyntaxError
from asmcheck.globals import Gl
from asmcheck.model import (Binary, FunctionApp, Literal, ParRule, Unary, Update, ChooseRule, MacroCall,
                            InitGroup, IntRange)
from asmcheck.parser import parse_source
from asmcheck.printer import print_model

from conftest import load_model

ALL_FIXTURES = [
    "checkAxiomAndProperty.asm",
    "subsetDomain.asm",
    "sluiceGateControl.asm",
    "oneWayTrafficLightControl.asm",
    "diningPhilosophers.asm",
    "criticalSectionProblem.asm",
    "ticTacToe_simulator.asm",
    "ferryman.asm",
]

HEADER = """
asm t
import StandardLibrary
signature:
  domain Small subsetof Integer
  dynamic controlled x: Small
  dynamic monitored b: Boolean
definitions:
  domain Small = {0..2}
"""


def parse_main(body: str, init: str = "default init s0:\n  function x = 0\n"):
    return parse_source(HEADER + "  main rule r_Main =\n" + body + "\n" + init, "t.asm")


def test_check_axiom_and_property():
    model = load_model("checkAxiomAndProperty.asm")
    assert model.name == "checkAxiomAndProperty"
    assert model.imports == ["StandardLibrary", "LTLlibrary"]
    assert [f.name for f in model.function_decls] == ["m", "n"]
    m, n = FunctionApp("m"), FunctionApp("n")
    assert model.main_rule == ParRule((Update(m, Unary("not", n)), Update(n, Unary("not", m))))
    specs = {s.name: s.formula for s in model.ltl_specs}
    assert specs["ltl_neverEQ"] == ltl.Not(ltl.Eventually(ltl.Atom(Binary("=", m, n))))
    assert specs["ltl_inv"] == ltl.Always(ltl.Atom(Binary("!=", m, n)))


def test_subset_domain_extension():
    model = load_model("subsetDomain.asm")
    decl = model.domain("SubInt")
    assert decl.kind == Gl.CONCRETE_SUBSET
    assert decl.extension == IntRange(1, 3)


def test_precedence():
    model = parse_main("    if b and x + 1 * 2 = 2 or not b then x := 1 endif")
    cond = model.main_rule.cond
    assert cond == Binary("or",
                          Binary("and", FunctionApp("b"),
                                 Binary("=", Binary("+", FunctionApp("x"),
                                                    Binary("*", Literal(1), Literal(2))), Literal(2))),
                          Unary("not", FunctionApp("b")))


def test_choose_ifnone_and_macro_call():
    source = HEADER + """
  rule r_inc($v in Small) =
    x := $v

  main rule r_Main =
    choose $y in Small with $y > x do r_inc[$y] ifnone x := 0

default init s0:
  function x = 0
"""
    model = parse_source(source)
    rule = model.main_rule
    assert isinstance(rule, ChooseRule)
    assert rule.bindings == (("$y", "Small"),)
    assert isinstance(rule.body, MacroCall) and rule.body.name == "r_inc"
    assert rule.ifnone == Update(FunctionApp("x"), Literal(0))


def test_init_group():
    source = """
asm g
import StandardLibrary
signature:
  enum domain Id = {A | B}
  dynamic controlled flag: Id -> Boolean
definitions:
  main rule r_Main = skip
default init s0:
  function flag($i in Id) = true
"""
    entry = parse_source(source).init.entries[0]
    assert entry == InitGroup("flag", (("$i", "Id"),), Literal(True))


@pytest.mark.parametrize("body, message", [
    ("    x := $z", "unbound variable $z"),
    ("    x(1) := 0", "expects 0 arguments"),
    ("    r_missing[]", "unknown rule r_missing"),
    ("    x := y", "unresolved name y"),
    ("    par endpar", "empty par block"),
])
def test_errors_carry_positions(body, message):
    with pytest.raises(AsmSyntaxError) as err:
        parse_main(body)
    assert message in str(err.value)
    assert err.value.line is not None
    assert str(err.value).startswith("t.asm:")


def test_modules_and_missing_main_are_rejected():
    with pytest.raises(AsmSyntaxError, match="modules are not supported"):
        parse_source("module m signature: definitions:")
    with pytest.raises(AsmSyntaxError, match="missing main rule"):
        parse_source(HEADER)


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_printed_model_parses_back(name):
    model = load_model(name)
    again = parse_source(print_model(model))
    assert again.domain_decls == model.domain_decls
    assert again.function_decls == model.function_decls
    assert again.static_defs == model.static_defs
    assert again.rule_defs == model.rule_defs
    assert again.main_rule == model.main_rule
    assert [s.formula for s in again.ltl_specs] == [s.formula for s in model.ltl_specs]
