import pickle

import pytest

from asmcheck.evaluator import StateVector, apply_command, eval_expr, evaluator_for
from asmcheck.exceptions import AssertionViolation, EvaluationError
from asmcheck.globals import Gl
from asmcheck.gts import (GuardedTransitionSystem, ThreadDef, Location, GuardedCmd, VariableDef, PureFunction,
                          AliasType, EnumType, SeqType, INT, BOOLEAN, STRING, EnumValue, RecordRef, Const,
                          VarRef, Param, Unary, Binary, Ternary, Call, SeqOp, Assign, Assert, StartThread,
                          assertion_template, check_system, default_value, render_value, substitute_params)
from asmcheck.seq import Seq


def small_system() -> GuardedTransitionSystem:
    main = ThreadDef("MAIN", [Location("loc0", [GuardedCmd(None, (), True, "loc0")])], True, Gl.MAIN_KIND)
    worker = ThreadDef("W", [Location("w0", [GuardedCmd(None, (), True, "w0")])])
    return GuardedTransitionSystem(
        name="small",
        variables=[VariableDef("x", INT, Gl.CONTROLLED, Const(0)),
                   VariableDef("s", SeqType(INT), Gl.CONTROLLED),
                   VariableDef("b", BOOLEAN, Gl.CONTROLLED)],
        pure_functions=[PureFunction("inc", (("v", INT),), INT, Binary("+", Param("v"), Const(1)))],
        threads=[main, worker],
    )


SYSTEM = small_system()
STATE = StateVector((5, Seq((1, 2, 3)), True), ("loc0", "w0"), (True, False))


def ev(expr):
    return eval_expr(expr, STATE, SYSTEM)


@pytest.mark.parametrize("op, a, b, result", [
    ("+", 2, 3, 5),
    ("-", 2, 3, -1),
    ("*", -4, 3, -12),
    ("/", 7, 2, 3),
    ("/", -7, 2, -3),
    ("/", 7, -2, -3),
    ("%", 7, 3, 1),
    ("%", -7, 3, -1),
    ("%", 7, -3, 1),
    ("<", 1, 2, True),
    (">=", 1, 2, False),
    ("==", True, 1, False),
    ("!=", "a", "b", True),
])
def test_binary_operators(op, a, b, result):
    value = ev(Binary(op, Const(a), Const(b)))
    assert value == result and type(value) is type(result)


@pytest.mark.parametrize("expr, message", [
    (Binary("/", Const(1), Const(0)), "division by zero"),
    (Binary("%", Const(1), Const(0)), "mod by zero"),
    (Binary("+", Const(Gl.INT_MAX), Const(1)), "integer overflow"),
    (Binary("<", Const(None), Const(1)), "null"),
    (Binary("&&", Const(1), Const(True)), "expected a boolean"),
    (Binary("+", Const(True), Const(1)), "not a number"),
    (VarRef("missing"), "unknown variable missing"),
    (Call("nothing", ()), "unknown function nothing"),
    (SeqOp("first", (SeqOp("create", ()),)), "first of an empty sequence"),
])
def test_runtime_errors(expr, message):
    with pytest.raises(EvaluationError, match=message):
        ev(expr)


def test_variables_calls_and_sequences():
    assert ev(VarRef("x")) == 5
    assert ev(Call("inc", (VarRef("x"),))) == 6
    assert ev(SeqOp("length", (VarRef("s"),))) == 3
    assert ev(SeqOp("prepend", (Const(0), VarRef("s")))) == Seq((0, 1, 2, 3))
    assert ev(Ternary(VarRef("b"), Const("yes"), Const("no"))) == "yes"
    assert ev(Unary("-", VarRef("x"))) == -5
    assert ev(Unary("!", VarRef("b"))) is False


def test_short_circuit():
    # the right operand would fail
    assert ev(Binary("||", Const(True), Binary("/", Const(1), Const(0)))) is True
    assert ev(Binary("&&", Const(False), Binary("/", Const(1), Const(0)))) is False


def test_apply_runs_actions_in_order():
    cmd = GuardedCmd(None, (Assign(VarRef("x"), Binary("+", VarRef("x"), Const(1))),
                            Assign(VarRef("b"), Binary("==", VarRef("x"), Const(6))),
                            StartThread("W")), True, "loc0")
    after = apply_command(cmd, STATE, SYSTEM)
    assert after.values[0] == 6
    assert after.values[2] is True
    assert after.active == (True, True)
    assert STATE.values[0] == 5


def test_failed_assertion():
    cmd = GuardedCmd(None, (Assert(Binary(">", VarRef("x"), Const(10)), "x too small"),), True, "loc0")
    with pytest.raises(AssertionViolation, match="x too small"):
        apply_command(cmd, STATE, SYSTEM)


def test_guard_must_be_boolean():
    ev_ = evaluator_for(SYSTEM)
    assert ev_.guard(GuardedCmd(Binary(">", VarRef("x"), Const(1)), (), True, "loc0"), STATE.values)
    with pytest.raises(EvaluationError):
        ev_.guard(GuardedCmd(VarRef("x"), (), True, "loc0"), STATE.values)


def test_values_are_interned():
    assert EnumValue("Color", "RED") is EnumValue("Color", "RED")
    assert pickle.loads(pickle.dumps(EnumValue("Color", "RED"))) is EnumValue("Color", "RED")
    assert RecordRef("Fork", "f1") is RecordRef("Fork", "f1")
    assert Const(1) != Const(True) and Const(1) != Const(1.0)


def test_render_value():
    assert [render_value(v) for v in (None, True, 3, "s", EnumValue("E", "A"), Seq((1, 2)))] == \
        ["null", "true", "3", '"s"', "A", "<1,2>"]


def test_assertion_templates():
    contiguous = assertion_template(AliasType("Small", INT, (1, 2, 3)))
    assert contiguous == Binary("&&", Binary(">=", Param("v"), Const(1)), Binary("<=", Param("v"), Const(3)))
    sparse = assertion_template(AliasType("Odd", INT, (1, 5)))
    assert sparse == Binary("||", Binary("==", Param("v"), Const(1)), Binary("==", Param("v"), Const(5)))
    assert assertion_template(INT) is None
    bound = substitute_params(sparse, {"v": VarRef("x")})
    assert ev(bound) is True


def test_default_values():
    assert default_value(BOOLEAN) is True
    assert default_value(INT) == 0
    assert default_value(STRING) == ""
    assert default_value(EnumType("E", ("A", "B"))) is EnumValue("E", "A")
    assert default_value(AliasType("Small", INT, (2, 3))) == 2
    assert default_value(SeqType(INT)) == Seq()


def test_check_system_rejects_malformed_threads():
    system = small_system()
    check_system(system)
    system.threads[0].locations[0].commands.append(GuardedCmd(None, (), True, "nowhere"))
    with pytest.raises(ValueError, match="unknown location nowhere"):
        check_system(system)

    system = small_system()
    system.threads.reverse()
    with pytest.raises(ValueError, match="main thread"):
        check_system(system)

    system = small_system()
    system.threads[1].locations.append(Location("w0"))
    with pytest.raises(ValueError, match="duplicate location"):
        check_system(system)
