"""
AsmetaL pretty printer. Output is fully parenthesized so that parsing it
again yields an equal AST.
"""
from . import ltl
from .model import (ModelAst, IntRange, SeqOf, Literal, EnumElement, Var, FunctionApp, Binary, Unary,
                    CondTerm, CaseTerm, Quantified, IsUndef, SelfTerm, SeqLiteral, SeqCall, Temporal,
                    Update, CondRule, CaseRule, ChooseRule, ForallRule, ParRule, SeqRule, LetRule,
                    SkipRule, MacroCall, ProgramCall, InitSimple, InitGroup, InitConditional)
from .globals import Gl


INDENT = "  "


def _literal(value) -> str:
    if value is None:
        return "undef"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    return repr(value)


def _bindings(bindings) -> str:
    return ", ".join(f"{v} in {d}" for v, d in bindings)


def print_term(t) -> str:
    match t:
        case Literal(value):
            return _literal(value)
        case EnumElement(_, name):
            return name
        case Var(name):
            return name
        case SelfTerm():
            return Gl.SELF
        case FunctionApp(name, args):
            if not args:
                return name
            return f"{name}({', '.join(print_term(a) for a in args)})"
        case Binary(op, left, right):
            return f"({print_term(left)} {op} {print_term(right)})"
        case Unary("not", operand):
            return f"not({print_term(operand)})"
        case Unary(op, operand):
            return f"{op}({print_term(operand)})"
        case CondTerm(cond, then, otherwise):
            text = f"if {print_term(cond)} then {print_term(then)}"
            if otherwise is not None:
                text += f" else {print_term(otherwise)}"
            return text + " endif"
        case CaseTerm(scrutinee, branches, otherwise):
            parts = [f"switch {print_term(scrutinee)}"]
            parts += [f"case {print_term(v)}: {print_term(r)}" for v, r in branches]
            if otherwise is not None:
                parts.append(f"otherwise {print_term(otherwise)}")
            parts.append("endswitch")
            return " ".join(parts)
        case Quantified(kind, bindings, cond):
            return f"({kind} {_bindings(bindings)} with {print_term(cond)})"
        case IsUndef(operand):
            return f"isUndef({print_term(operand)})"
        case SeqLiteral(items):
            return f"[{', '.join(print_term(i) for i in items)}]"
        case SeqCall(op, args):
            return f"{op}({', '.join(print_term(a) for a in args)})"
        case Temporal(op, (operand,)):
            return f"{op}({print_term(operand)})"
        case Temporal(op, (left, right)):
            return f"({print_term(left)} {op} {print_term(right)})"
    raise ValueError(f"cannot print term {t!r}")


def print_ltl(f) -> str:
    """AsmetaL text of a lifted formula; atoms are printed as terms."""
    match f:
        case ltl.Atom(term):
            return f"({print_term(term)})"
        case ltl.LtlTrue():
            return "true"
        case ltl.LtlFalse():
            return "false"
        case ltl.Not(g):
            return f"not({print_ltl(g)})"
        case ltl.Always(g):
            return f"{Gl.LTL_ALWAYS}({print_ltl(g)})"
        case ltl.Eventually(g):
            return f"{Gl.LTL_EVENTUALLY}({print_ltl(g)})"
    ops = {ltl.And: "and", ltl.Or: "or", ltl.Xor: "xor", ltl.Implies: "implies", ltl.Iff: "iff",
           ltl.Until: Gl.LTL_UNTIL, ltl.Release: Gl.LTL_RELEASE}
    op = ops.get(type(f))
    if op is None:
        raise ValueError(f"cannot print formula {f!r}")
    return f"({print_ltl(f.left)} {op} {print_ltl(f.right)})"


def print_rule(r, depth: int = 0) -> str:
    pad = INDENT * depth
    inner = depth + 1
    match r:
        case Update(lhs, rhs):
            return f"{pad}{print_term(lhs)} := {print_term(rhs)}"
        case CondRule(cond, then, otherwise):
            lines = [f"{pad}if {print_term(cond)} then", print_rule(then, inner)]
            if otherwise is not None:
                lines += [f"{pad}else", print_rule(otherwise, inner)]
            lines.append(f"{pad}endif")
            return "\n".join(lines)
        case CaseRule(scrutinee, branches, otherwise):
            lines = [f"{pad}switch {print_term(scrutinee)}"]
            for value, body in branches:
                lines += [f"{pad}case {print_term(value)}:", print_rule(body, inner)]
            if otherwise is not None:
                lines += [f"{pad}otherwise", print_rule(otherwise, inner)]
            lines.append(f"{pad}endswitch")
            return "\n".join(lines)
        case ChooseRule(bindings, cond, body, ifnone):
            lines = [f"{pad}choose {_bindings(bindings)} with {print_term(cond)} do", print_rule(body, inner)]
            if ifnone is not None:
                lines += [f"{pad}ifnone", print_rule(ifnone, inner)]
            lines.append(f"{pad}endchoose")
            return "\n".join(lines)
        case ForallRule(bindings, cond, body):
            return "\n".join([f"{pad}forall {_bindings(bindings)} with {print_term(cond)} do",
                              print_rule(body, inner), f"{pad}endforall"])
        case ParRule(children):
            return "\n".join([f"{pad}par"] + [print_rule(c, inner) for c in children] + [f"{pad}endpar"])
        case SeqRule(children):
            return "\n".join([f"{pad}seq"] + [print_rule(c, inner) for c in children] + [f"{pad}endseq"])
        case LetRule(bindings, body):
            head = ", ".join(f"{v} = {print_term(t)}" for v, t in bindings)
            return "\n".join([f"{pad}let ({head}) in", print_rule(body, inner), f"{pad}endlet"])
        case SkipRule():
            return f"{pad}skip"
        case MacroCall(name, args):
            return f"{pad}{name}[{', '.join(print_term(a) for a in args)}]"
        case ProgramCall(agent):
            return f"{pad}program({print_term(agent)})"
    raise ValueError(f"cannot print rule {r!r}")


def _domain_expr(d) -> str:
    return str(d) if isinstance(d, SeqOf) else d


def print_model(model: ModelAst) -> str:
    out = [f"asm {model.name}", ""]
    out += [f"import {name}" for name in model.imports]
    if model.exports:
        out.append("export " + ", ".join(model.exports))
    out += ["", "signature:"]
    for d in model.domain_decls:
        if d.kind == Gl.ENUM:
            out.append(f"{INDENT}enum domain {d.name} = {{{' | '.join(d.enum_elements)}}}")
        elif d.kind == Gl.ABSTRACT:
            out.append(f"{INDENT}abstract domain {d.name}")
        else:
            out.append(f"{INDENT}domain {d.name} subsetof {d.parent}")
    for f in model.function_decls:
        prefix = "dynamic " if f.dynamic else ""
        if not f.arg_domains:
            signature = _domain_expr(f.codomain)
        else:
            args = [_domain_expr(a) for a in f.arg_domains]
            arg_text = args[0] if len(args) == 1 else f"Prod({', '.join(args)})"
            signature = f"{arg_text} -> {_domain_expr(f.codomain)}"
        out.append(f"{INDENT}{prefix}{f.kind} {f.name}: {signature}")

    out += ["", "definitions:"]
    for d in model.domain_decls:
        if d.extension is None:
            continue
        if isinstance(d.extension, IntRange):
            out.append(f"{INDENT}domain {d.name} = {{{d.extension.low}..{d.extension.high}}}")
        else:
            out.append(f"{INDENT}domain {d.name} = {{{', '.join(print_term(v) for v in d.extension)}}}")
    for fd in model.static_defs:
        params = f"({_bindings(fd.params)})" if fd.params else ""
        out.append(f"{INDENT}function {fd.name}{params} = {print_term(fd.body)}")
    for rd in model.rule_defs:
        params = f"({_bindings(rd.params)})" if rd.params else ""
        keyword = "macro rule" if rd.macro else "rule"
        out += ["", f"{INDENT}{keyword} {rd.name}{params} =", print_rule(rd.body, 2)]
    if model.ltl_specs:
        out.append("")
    for spec in model.ltl_specs:
        out.append(f"{INDENT}LTLSPEC NAME {spec.name} := {print_ltl(spec.formula)}")
    for inv in model.invariants:
        name = f" {inv.name}" if inv.named else ""
        out.append(f"{INDENT}invariant{name} over {', '.join(inv.over)}: {print_term(inv.term)}")
    out += ["", f"{INDENT}main rule {model.main_rule_name} =", print_rule(model.main_rule, 2), ""]

    init = model.init
    if init.entries or init.agent_bindings:
        out.append(f"default init {init.name}:")
        for e in init.entries:
            match e:
                case InitSimple(location, value):
                    out.append(f"{INDENT}function {print_term(location)} = {print_term(value)}")
                case InitGroup(function, bindings, value):
                    out.append(f"{INDENT}function {function}({_bindings(bindings)}) = {print_term(value)}")
                case InitConditional(function, bindings, case):
                    out.append(f"{INDENT}function {function}({_bindings(bindings)}) = {print_term(case)}")
        for b in init.agent_bindings:
            out.append(f"{INDENT}agent {b.domain}: {b.rule}[]")
    return "\n".join(out) + "\n"
