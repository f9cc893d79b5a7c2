import math
from typing import NamedTuple, Optional

from .exceptions import EvaluationError, AssertionViolation
from .globals import Gl
from .gts import (GuardedTransitionSystem, GuardedCmd, RecordRef, Const, VarRef,
                  FieldRef, Param, Unary, Binary, Ternary, Call, SeqOp, Assign, Assert, Allocate,
                  StartThread, render_value, values_equal)
from .seq import seq_ops


class StateVector(NamedTuple):
    values: tuple        # slot values, variables first then record fields
    locations: tuple     # current location label per thread
    active: tuple        # active flag per thread


class Layout:
    """Slot numbering of a system: variables in declaration order, then record fields."""

    def __init__(self, system: GuardedTransitionSystem):
        self.slots: dict = {}
        self.names: list = []
        self.types: list = []
        self.kinds: list = []
        for var in system.variables:
            self._add(var.name, var.type, var.kind)
        self.field_slots: dict = {}
        for record in system.records:
            for inst in record.instances:
                for f in record.fields:
                    self.field_slots[(inst, f.name)] = len(self.names)
                    self._add(f"{inst}.{f.name}", f.type, f.kind)
        self.threads = {t.name: i for i, t in enumerate(system.threads)}

    def _add(self, name, ir_type, kind):
        self.slots[name] = len(self.names)
        self.names.append(name)
        self.types.append(ir_type)
        self.kinds.append(kind)

    def __len__(self) -> int:
        return len(self.names)

    def slot(self, name: str) -> int:
        try:
            return self.slots[name]
        except KeyError:
            raise EvaluationError(f"unknown variable {name}") from None


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _check_int(v: int) -> int:
    if not Gl.INT_MIN <= v <= Gl.INT_MAX:
        raise EvaluationError(f"integer overflow: {v} does not fit in 64 bits")
    return v


def _numbers(op: str, a, b):
    for v in (a, b):
        if v is None:
            raise EvaluationError(f"operand of {op} is null")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise EvaluationError(f"operand {render_value(v)} of {op} is not a number")


def _divide(a, b):
    _numbers("/", a, b)
    if b == 0:
        raise EvaluationError("division by zero")
    if _is_int(a) and _is_int(b):
        q = abs(a) // abs(b)
        return _check_int(q if (a < 0) == (b < 0) else -q)
    return a / b


def _modulo(a, b):
    _numbers("%", a, b)
    if b == 0:
        raise EvaluationError("mod by zero")
    if _is_int(a) and _is_int(b):
        # sign of the dividend
        r = abs(a) % abs(b)
        return -r if a < 0 else r
    return math.fmod(a, b)


def _arith(fn, op):
    def run(a, b):
        _numbers(op, a, b)
        r = fn(a, b)
        return _check_int(r) if _is_int(r) else r
    return run


def _ordering(fn, op):
    def run(a, b):
        if a is None or b is None:
            raise EvaluationError(f"ordering comparison {op} involving null")
        try:
            return fn(a, b)
        except TypeError:
            raise EvaluationError(f"cannot compare {render_value(a)} {op} {render_value(b)}") from None
    return run


BINARY_FUNCTIONS = {
    "+": _arith(lambda a, b: a + b, "+"),
    "-": _arith(lambda a, b: a - b, "-"),
    "*": _arith(lambda a, b: a * b, "*"),
    "/": _divide,
    "%": _modulo,
    "==": values_equal,
    "!=": lambda a, b: not values_equal(a, b),
    "<": _ordering(lambda a, b: a < b, "<"),
    "<=": _ordering(lambda a, b: a <= b, "<="),
    ">": _ordering(lambda a, b: a > b, ">"),
    ">=": _ordering(lambda a, b: a >= b, ">="),
}


def _truth(v, what: str) -> bool:
    if v is True or v is False:
        return v
    raise EvaluationError(f"{what} evaluated to {render_value(v)}, expected a boolean")


class Evaluator:
    """Compiled evaluation of one system's expressions and commands."""

    def __init__(self, system: GuardedTransitionSystem):
        self.system = system
        self.layout = Layout(system)
        self._compiled: dict = {}
        self._functions: dict = {}
        self._record_constants = {v.name for v in system.variables if v.kind == Gl.STATIC_CONST}

    # ------------------------------------------------------------ compile

    def compile(self, expr):
        fn = self._compiled.get(expr)
        if fn is None:
            fn = self._compile(expr)
            self._compiled[expr] = fn
        return fn

    def _compile(self, expr):
        match expr:
            case Const(value):
                return lambda values, env: value
            case VarRef(name):
                slot = self.layout.slot(name)
                return lambda values, env: values[slot]
            case Param(name):
                def param(values, env):
                    try:
                        return env[name]
                    except (KeyError, TypeError):
                        raise EvaluationError(f"unbound parameter {name}") from None
                return param
            case FieldRef():
                slot_of = self._field_slot(expr)
                return lambda values, env: values[slot_of(values, env)]
            case Unary("!", operand):
                f = self.compile(operand)
                return lambda values, env: not _truth(f(values, env), "operand of !")
            case Unary("-", operand):
                f = self.compile(operand)

                def negate(values, env):
                    v = f(values, env)
                    _numbers("-", v, 0)
                    return _check_int(-v) if _is_int(v) else -v
                return negate
            case Binary("&&", left, right):
                fl, fr = self.compile(left), self.compile(right)
                return lambda values, env: _truth(fl(values, env), "operand of &&") and _truth(fr(values, env), "operand of &&")
            case Binary("||", left, right):
                fl, fr = self.compile(left), self.compile(right)
                return lambda values, env: _truth(fl(values, env), "operand of ||") or _truth(fr(values, env), "operand of ||")
            case Binary(op, left, right):
                fn = BINARY_FUNCTIONS.get(op)
                if fn is None:
                    raise EvaluationError(f"unknown operator {op}")
                fl, fr = self.compile(left), self.compile(right)
                return lambda values, env: fn(fl(values, env), fr(values, env))
            case Ternary(cond, then, otherwise):
                fc, ft, fo = self.compile(cond), self.compile(then), self.compile(otherwise)
                return lambda values, env: ft(values, env) if _truth(fc(values, env), "condition") else fo(values, env)
            case Call(function, args):
                fargs = [self.compile(a) for a in args]

                def call(values, env):
                    params, body = self._function(function)
                    return body(values, dict(zip(params, (f(values, env) for f in fargs))))
                return call
            case SeqOp(op, args):
                fargs = [self.compile(a) for a in args]
                return lambda values, env: seq_ops(op, [f(values, env) for f in fargs])
        raise EvaluationError(f"cannot evaluate {expr!r}")

    def _function(self, name: str):
        entry = self._functions.get(name)
        if entry is None:
            fn = self.system.function(name)
            if fn is None:
                raise EvaluationError(f"unknown function {name}")
            entry = (tuple(p for p, _ in fn.params), self.compile(fn.body))
            self._functions[name] = entry
        return entry

    def _field_slot(self, ref: FieldRef):
        """Slot resolver for a field access; record constants resolve statically."""
        target, name = ref.target, ref.field
        if isinstance(target, VarRef) and target.name in self._record_constants:
            slot = self.layout.field_slots.get((target.name, name))
            if slot is None:
                raise EvaluationError(f"record constant {target.name} has no field {name}")
            return lambda values, env: slot
        ft = self.compile(target)
        field_slots = self.layout.field_slots

        def dynamic(values, env):
            ref_value = ft(values, env)
            if not isinstance(ref_value, RecordRef):
                raise EvaluationError(f"field {name} of {render_value(ref_value)}: not a record reference")
            try:
                return field_slots[(ref_value.name, name)]
            except KeyError:
                raise EvaluationError(f"record {ref_value.name} has no field {name}") from None
        return dynamic

    # ------------------------------------------------------------ run

    def eval(self, expr, values, env=None):
        return self.compile(expr)(values, env)

    def guard(self, cmd: GuardedCmd, values) -> bool:
        if cmd.guard is None:
            return True
        return _truth(self.eval(cmd.guard, values), "guard")

    def apply(self, cmd: GuardedCmd, state: StateVector, thread_index: int) -> StateVector:
        """Run the actions of `cmd` in order on a copy of `state`."""
        values = list(state.values)
        active = state.active
        for action in cmd.actions:
            match action:
                case Assign(target, expr):
                    value = self.eval(expr, values)
                    values[self._target_slot(target, values)] = value
                case Assert(expr, message):
                    if not _truth(self.eval(expr, values), "assertion"):
                        raise AssertionViolation(message or f"assertion failed in {self.system.threads[thread_index].name}")
                case Allocate(target, record):
                    values[self.layout.slot(target.name)] = RecordRef(record, target.name)
                case StartThread(thread):
                    idx = self.layout.threads[thread]
                    active = active[:idx] + (True,) + active[idx + 1:]
                case _:
                    raise EvaluationError(f"unknown action {action!r}")
        locations = state.locations[:thread_index] + (cmd.target,) + state.locations[thread_index + 1:]
        return StateVector(tuple(values), locations, active)

    def _target_slot(self, target, values) -> int:
        if isinstance(target, VarRef):
            return self.layout.slot(target.name)
        if isinstance(target, FieldRef):
            return self._field_slot(target)(values, None)
        raise EvaluationError(f"cannot assign to {target!r}")

    def written_slots(self, cmd: GuardedCmd, state: StateVector) -> list:
        """Slots the command's assignments write when run from `state`."""
        values = list(state.values)
        slots = []
        for action in cmd.actions:
            if isinstance(action, Assign):
                slot = self._target_slot(action.target, values)
                values[slot] = self.eval(action.expr, values)
                slots.append(slot)
        return slots


def evaluator_for(system: GuardedTransitionSystem) -> Evaluator:
    """Evaluator cached on the system object."""
    ev = system.__dict__.get("_evaluator")
    if ev is None:
        ev = Evaluator(system)
        system.__dict__["_evaluator"] = ev
    return ev


def eval_expr(expr, state: StateVector, system: GuardedTransitionSystem, env: Optional[dict] = None):
    return evaluator_for(system).eval(expr, state.values, env)


def apply_command(cmd: GuardedCmd, state: StateVector, system: GuardedTransitionSystem,
                  thread_index: int = 0) -> StateVector:
    return evaluator_for(system).apply(cmd, state, thread_index)
