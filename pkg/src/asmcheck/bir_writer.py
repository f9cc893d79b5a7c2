from . import ltl
from .globals import Gl
from .gts import (GuardedTransitionSystem, EnumType, RecordType, AliasType, SeqType,
                  EnumValue, RecordRef, Const, VarRef, FieldRef, Param, Unary, Binary, Ternary, Call, SeqOp,
                  Assign, Assert, Allocate, StartThread, GuardedCmd, ThreadDef, PropertyDef)
from .seq import Seq


INDENT = "  "
STATE_COMMENT = "/*visible state*/"


def type_text(t) -> str:
    if isinstance(t, SeqType):
        return f"Seq.type<{type_text(t.element)}>"
    return t.name


def const_text(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, EnumValue):
        return f"{value.enum}.{value.name}"
    if isinstance(value, RecordRef):
        return value.name
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(value, Seq):
        return "Seq.create(" + ", ".join(const_text(v) for v in value) + ")"
    if isinstance(value, int) and value < 0:
        return f"-{-value}"
    return repr(value)


def expr_text(e) -> str:
    match e:
        case Const(value):
            return const_text(value)
        case VarRef(name) | Param(name):
            return name
        case FieldRef(target, name):
            base = expr_text(target)
            if not isinstance(target, (VarRef, Param, FieldRef)):
                base = f"({base})"
            return f"{base}.{name}"
        case Unary(op, operand):
            return f"{op}({expr_text(operand)})"
        case Binary(op, left, right):
            return f"({expr_text(left)} {op} {expr_text(right)})"
        case Ternary(cond, then, otherwise):
            return f"({expr_text(cond)} ? {expr_text(then)} : {expr_text(otherwise)})"
        case Call(function, args):
            return f"{function}({', '.join(expr_text(a) for a in args)})"
        case SeqOp(op, args):
            return f"Seq.{op}({', '.join(expr_text(a) for a in args)})"
    raise ValueError(f"cannot render expression {e!r}")


def guard_text(e) -> str:
    text = expr_text(e)
    return text if text.startswith("(") else f"({text})"


def action_text(a) -> str:
    match a:
        case Assign(target, expr):
            return f"{expr_text(target)} := {expr_text(expr)};"
        case Assert(expr):
            return f"assert({expr_text(expr)});"
        case Allocate(target, record):
            return f"{target.name} := new {record};"
        case StartThread(thread):
            return f"start {thread}();"
    raise ValueError(f"cannot render action {a!r}")


def ltl_text(f) -> str:
    match f:
        case ltl.Atom(name):
            return f'LTL.prop("{name}")'
        case ltl.LtlTrue():
            return "true"
        case ltl.LtlFalse():
            return "false"
        case ltl.Not(g):
            return f"LTL.negation({ltl_text(g)})"
        case ltl.Always(g):
            return f"LTL.always({ltl_text(g)})"
        case ltl.Eventually(g):
            return f"LTL.eventually({ltl_text(g)})"
        case ltl.Xor(l, r):
            return f"LTL.negation(LTL.equivalence({ltl_text(l)}, {ltl_text(r)}))"
    ops = {ltl.And: "conjunction", ltl.Or: "disjunction", ltl.Implies: "implication",
           ltl.Iff: "equivalence", ltl.Until: "until", ltl.Release: "release"}
    return f"LTL.{ops[type(f)]}({ltl_text(f.left)}, {ltl_text(f.right)})"


def property_lines(prop: PropertyDef) -> list:
    lines = []
    if prop.text:
        lines.append(f"{INDENT}//{prop.text}")
    keys = ",\n".join(f'{INDENT * 4}Property.createObservableKey("{pid}", {expr_text(e)})'
                      for pid, e in prop.propositions)
    lines += [f"{INDENT}fun {prop.name}() returns boolean =",
              f"{INDENT * 2}LTL.temporalProperty(",
              f"{INDENT * 3}Property.createObservableDictionary(",
              keys + "),",
              f"{INDENT * 3}{ltl_text(prop.formula)});"]
    return lines


def _kind_comment(kind: str) -> str:
    return "static" if kind == Gl.STATIC_CONST else kind


def type_lines(t) -> list:
    match t:
        case EnumType(name, elements):
            return [f"{INDENT}enum {name} {{{', '.join(elements)}}}"]
        case AliasType(name, base, members):
            line = f"{INDENT}typealias {name} {type_text(base)};"
            if members:
                line += "//members " + ", ".join(const_text(m) for m in members)
            return [line]
        case RecordType(name):
            lines = [f"{INDENT}record {name} {{"]
            lines += [f"{INDENT * 2}{type_text(f.type)} {f.name};//{_kind_comment(f.kind)}" for f in t.fields]
            return lines + [f"{INDENT}}}"]
    return []


def command_lines(cmd: GuardedCmd, depth: int) -> list:
    pad = INDENT * depth
    lines = [f"{pad}//{cmd.comment}"] if cmd.comment else []
    head = f"when {guard_text(cmd.guard)} do" if cmd.guard is not None else "do"
    if not cmd.visible:
        head += " invisible"
    actions = [action_text(a) for a in cmd.actions]
    if cmd.visible and not actions:
        actions = [STATE_COMMENT]
    body = "{ " + " ".join(actions) + " }" if actions else "{}"
    lines.append(f"{pad}{head} {body} goto {cmd.target};")
    return lines


def thread_lines(thread: ThreadDef, main: bool) -> list:
    prefix = "main thread" if main else ("active thread" if thread.active_at_start else "thread")
    lines = [f"{INDENT}{prefix} {thread.name}() {{"]
    for loc in thread.locations:
        marker = "//initialization" if loc.label == thread.init_location else ""
        lines.append(f"{INDENT * 2}loc {loc.label}:{marker}")
        if loc.comment:
            lines.append(f"{INDENT * 2}//{loc.comment}")
        for cmd in loc.commands:
            lines += command_lines(cmd, 2)
    return lines + [f"{INDENT}}}"]


def emit_bir_text(system: GuardedTransitionSystem) -> str:
    lines = [f"system {system.name} {{"]
    for prop in system.properties:
        lines += property_lines(prop)
    for t in system.types:
        lines += type_lines(t)
    for var in system.variables:
        init = f" := {expr_text(var.initial)}" if var.initial is not None else ""
        lines.append(f"{INDENT}{type_text(var.type)} {var.name}{init};//{_kind_comment(var.kind)}")
    for fn in system.pure_functions:
        params = ", ".join(f"{type_text(t)} {p}" for p, t in fn.params)
        lines.append(f"{INDENT}fun {fn.name}({params}) returns {type_text(fn.return_type)} =")
        lines.append(f"{INDENT * 2}{expr_text(fn.body)};")
    for thread in system.threads[1:]:
        lines += thread_lines(thread, False)
    lines += thread_lines(system.main, True)
    lines.append("}")
    return "\n".join(lines) + "\n"
