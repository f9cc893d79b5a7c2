"""
Lowering of a validated ModelAst into a GuardedTransitionSystem. The main
thread allocates and initializes at loc0, encodes the main rule from loc1,
and ends every step in endloc, its only visible command.
"""
import dataclasses
import itertools
from contextlib import contextmanager
from typing import NamedTuple, Optional

from . import ltl
from .domains import (DomainTable, VariableTable, build_domain_table, build_variable_table, field_name,
                      value_expr, value_term)
from .evaluator import BINARY_FUNCTIONS
from .exceptions import TranslationError, EvaluationError
from .globals import Gl
from .gts import (GuardedTransitionSystem, GuardedCmd, Location, ThreadDef, PureFunction, VariableDef,
                  PropertyDef, RecordType, RecordRef, Const, VarRef, FieldRef, Param, Ternary, Call, SeqOp,
                  Assign, Assert, Allocate, StartThread, TRUE, FALSE, assertion_template, substitute_params,
                  check_system, finite_values)
from . import gts
from .model import (ModelAst, Literal, EnumElement, Var, FunctionApp, Binary, Unary, CondTerm, CaseTerm,
                    Quantified, IsUndef, SelfTerm, SeqLiteral, SeqCall, Temporal, Update, CondRule, CaseRule,
                    ChooseRule, ForallRule, ParRule, SeqRule, LetRule, SkipRule, MacroCall, ProgramCall,
                    InitSimple, InitGroup, InitConditional)


ARITHMETIC_OPS = ("+", "-", "*", "/", "mod")


# ---------------------------------------------------------------- AST substitution

def substitute_term(t, mapping: dict, self_term=None):
    """Replace bound variables (and `self`) by terms; inner binders shadow."""
    if t is None:
        return None
    sub = lambda x: substitute_term(x, mapping, self_term)
    match t:
        case Var(name):
            return mapping.get(name, t)
        case SelfTerm():
            return self_term if self_term is not None else t
        case Literal() | EnumElement():
            return t
        case FunctionApp(_, args) | SeqLiteral(args) | SeqCall(_, args) | Temporal(_, args):
            field_name_ = "items" if isinstance(t, SeqLiteral) else "args"
            return dataclasses.replace(t, **{field_name_: tuple(sub(a) for a in args)})
        case Binary(op, left, right):
            return dataclasses.replace(t, left=sub(left), right=sub(right))
        case Unary(op, operand):
            return dataclasses.replace(t, operand=sub(operand))
        case IsUndef(operand):
            return dataclasses.replace(t, operand=sub(operand))
        case CondTerm(cond, then, otherwise):
            return dataclasses.replace(t, cond=sub(cond), then=sub(then), otherwise=sub(otherwise))
        case CaseTerm(scrutinee, branches, otherwise):
            return dataclasses.replace(t, scrutinee=sub(scrutinee),
                                       branches=tuple((sub(v), sub(r)) for v, r in branches),
                                       otherwise=sub(otherwise))
        case Quantified(_, bindings, cond):
            inner = _shadow(mapping, bindings)
            return dataclasses.replace(t, cond=substitute_term(cond, inner, self_term))
    raise TranslationError(f"cannot substitute into {type(t).__name__}")


def _shadow(mapping: dict, bindings) -> dict:
    bound = {v for v, _ in bindings}
    return {k: v for k, v in mapping.items() if k not in bound}


def substitute_rule(r, mapping: dict, self_term=None):
    if r is None:
        return None
    term = lambda x: substitute_term(x, mapping, self_term)
    rule = lambda x: substitute_rule(x, mapping, self_term)
    match r:
        case Update(lhs, rhs):
            return dataclasses.replace(r, lhs=term(lhs), rhs=term(rhs))
        case CondRule(cond, then, otherwise):
            return dataclasses.replace(r, cond=term(cond), then=rule(then), otherwise=rule(otherwise))
        case CaseRule(scrutinee, branches, otherwise):
            return dataclasses.replace(r, scrutinee=term(scrutinee),
                                       branches=tuple((term(v), rule(b)) for v, b in branches),
                                       otherwise=rule(otherwise))
        case ChooseRule(bindings, cond, body, ifnone):
            inner = _shadow(mapping, bindings)
            return dataclasses.replace(r, cond=substitute_term(cond, inner, self_term),
                                       body=substitute_rule(body, inner, self_term), ifnone=rule(ifnone))
        case ForallRule(bindings, cond, body):
            inner = _shadow(mapping, bindings)
            return dataclasses.replace(r, cond=substitute_term(cond, inner, self_term),
                                       body=substitute_rule(body, inner, self_term))
        case ParRule(children) | SeqRule(children):
            return dataclasses.replace(r, children=tuple(rule(c) for c in children))
        case LetRule(bindings, body):
            inner = _shadow(mapping, [(v, None) for v, _ in bindings])
            return dataclasses.replace(r, bindings=tuple((v, term(t)) for v, t in bindings),
                                       body=substitute_rule(body, inner, self_term))
        case SkipRule():
            return r
        case MacroCall(_, args):
            return dataclasses.replace(r, args=tuple(term(a) for a in args))
        case ProgramCall(agent):
            return dataclasses.replace(r, agent=term(agent))
    raise TranslationError(f"cannot substitute into {type(r).__name__}")


# ---------------------------------------------------------------- IR folding

def negate(e):
    return fold(gts.Unary("!", e))


def conj(exprs) -> object:
    out = TRUE
    for e in exprs:
        out = fold(gts.Binary("&&", out, e))
    return out


def disj(exprs) -> object:
    out = FALSE
    for e in exprs:
        out = fold(gts.Binary("||", out, e))
    return out


def fold(e, constants: dict = None):
    """Constant folding; `constants` maps record constant names to their references."""
    constants = constants or {}
    match e:
        case gts.Unary("!", a):
            if isinstance(a, Const) and isinstance(a.value, bool):
                return Const(not a.value)
            if isinstance(a, gts.Unary) and a.op == "!":
                return a.operand
        case gts.Unary("-", Const(v)) if isinstance(v, (int, float)) and not isinstance(v, bool):
            return Const(-v)
        case gts.Binary("&&", a, b):
            if a == FALSE or b == FALSE:
                return FALSE
            if a == TRUE:
                return b
            if b == TRUE:
                return a
        case gts.Binary("||", a, b):
            if a == TRUE or b == TRUE:
                return TRUE
            if a == FALSE:
                return b
            if b == FALSE:
                return a
        case gts.Binary(op, a, b) if op in BINARY_FUNCTIONS:
            if _is_const(a, constants) and _is_const(b, constants):
                try:
                    return Const(BINARY_FUNCTIONS[op](_const_value(a, constants), _const_value(b, constants)))
                except EvaluationError:
                    return e
        case Ternary(c, a, b):
            if c == TRUE:
                return a
            if c == FALSE:
                return b
    return e


def _is_const(e, constants: dict) -> bool:
    return isinstance(e, Const) or (isinstance(e, VarRef) and e.name in constants)


def _const_value(e, constants: dict):
    if isinstance(e, Const):
        return e.value
    return constants[e.name]


# ---------------------------------------------------------------- guards

class GuardsStack:
    """Translation-time stack of conditions guarding the rule being visited."""

    def __init__(self):
        self.items: list = []
        self.pushes = 0
        self.pops = 0

    def push(self, guard):
        self.items.append(guard)
        self.pushes += 1

    def pop(self):
        self.pops += 1
        return self.items.pop()

    def snapshot(self) -> tuple:
        return tuple(g for g in self.items if g != TRUE)

    @contextmanager
    def pushed(self, guard):
        self.push(guard)
        try:
            yield
        finally:
            self.pop()

    @contextmanager
    def fresh(self):
        saved, self.items = self.items, []
        try:
            yield
        finally:
            self.items = saved


class Ctx(NamedTuple):
    depth: int = 0
    self_term: object = None


@dataclasses.dataclass
class Leaf:
    guards: tuple
    actions: tuple = ()
    block: object = None
    ctx: Ctx = Ctx()


# ---------------------------------------------------------------- translator

class Translator:

    def __init__(self, model: ModelAst, strict_updates: bool = False):
        self.model = model
        self.strict = strict_updates
        self.domains: DomainTable = build_domain_table(model)
        self.vtab: VariableTable = build_variable_table(model, self.domains)
        self.constants: dict = {}
        for f in model.function_decls:
            if f.is_constant_element:
                self.constants[f.name] = RecordRef(f.codomain, f.name)
        self.stack = GuardsStack()
        self.locations: dict = {}
        self.counter = 2
        # (K, children, intermediate locations) per emitted lattice
        self.lattices: list = []
        self.pure: dict = {}
        self._pure_order: list = []
        self._pure_in_progress: set = set()
        self._call_depth = 0
        self._writes: dict = {}
        self._saw_choose = False
        self._terms: dict = {}

    # ------------------------------------------------------------ helpers

    def next_k(self) -> int:
        k = self.counter
        self.counter += 1
        return k

    def location(self, label: str, comment: str = "") -> Location:
        loc = self.locations.get(label)
        if loc is None:
            loc = Location(label, [], comment)
            self.locations[label] = loc
        return loc

    def tuples(self, bindings):
        """Variable -> value term mappings over the product of the binding domains."""
        domains = []
        for var, dom in bindings:
            values = self.domains.values(dom)
            if values is None:
                raise TranslationError(f"quantification of {var} over infinite domain {dom}")
            domains.append(values)
        for values in itertools.product(*domains):
            yield {var: value_term(v) for (var, _), v in zip(bindings, values)}

    def is_const(self, e) -> bool:
        return _is_const(e, self.constants)

    def const_value(self, e):
        return _const_value(e, self.constants)

    def fold(self, e):
        return fold(e, self.constants)

    # ------------------------------------------------------------ terms

    def term(self, t, params: Optional[dict] = None):
        if params is None:
            cached = self._terms.get(t)
            if cached is not None:
                return cached
        e = self._term(t, params)
        if params is None:
            self._terms[t] = e
        return e

    def _term(self, t, params):
        sub = lambda x: self.term(x, params)
        match t:
            case Literal(value):
                return Const(value)
            case EnumElement(domain, name):
                return Const(gts.EnumValue(domain, name))
            case Var(name):
                if params and name in params:
                    return params[name]
                raise TranslationError(f"unbound variable {name}", *self._pos(t))
            case SelfTerm():
                raise TranslationError("self used outside an agent program", *self._pos(t))
            case FunctionApp():
                return self.application(t, params)
            case Binary(op, left, right):
                a, b = sub(left), sub(right)
                if op == "implies":
                    return self.fold(gts.Binary("||", negate(a), b))
                if op == "iff":
                    return self.fold(gts.Binary("==", a, b))
                if op == "xor":
                    return self.fold(gts.Binary("!=", a, b))
                return self.fold(gts.Binary(Gl.BINARY_OPS[op], a, b))
            case Unary("not", operand):
                return negate(sub(operand))
            case Unary("-", operand):
                return self.fold(gts.Unary("-", sub(operand)))
            case CondTerm(cond, then, otherwise):
                other = sub(otherwise) if otherwise is not None else Const(None)
                return self.fold(Ternary(sub(cond), sub(then), other))
            case CaseTerm(scrutinee, branches, otherwise):
                s = sub(scrutinee)
                acc = sub(otherwise) if otherwise is not None else Const(None)
                for value, result in reversed(branches):
                    acc = self.fold(Ternary(self.fold(gts.Binary("==", s, sub(value))), sub(result), acc))
                return acc
            case Quantified(kind, bindings, cond):
                parts = [self.term(substitute_term(cond, m), params) for m in self.tuples(bindings)]
                return conj(parts) if kind == "forall" else disj(parts)
            case IsUndef(operand):
                return self.fold(gts.Binary("==", sub(operand), Const(None)))
            case SeqLiteral(items):
                return SeqOp("create", tuple(sub(i) for i in items))
            case SeqCall(op, args):
                return SeqOp(op, tuple(sub(a) for a in args))
            case Temporal():
                raise TranslationError("temporal operator outside an LTLSPEC", *self._pos(t))
        raise TranslationError(f"unsupported term {type(t).__name__}", *self._pos(t))

    @staticmethod
    def _pos(node) -> tuple:
        return getattr(node, "pos", None) or (None, None)

    def application(self, t: FunctionApp, params):
        decl = self.model.function(t.name)
        if decl is None:
            raise TranslationError(f"unknown function {t.name}", *self._pos(t))
        if decl.is_constant_element:
            return VarRef(t.name)
        args = [self.term(a, params) for a in t.args]
        if decl.kind in (Gl.STATIC, Gl.DERIVED):
            fd = self.model.definition(t.name)
            if fd is None:
                raise TranslationError(f"{decl.kind} function {t.name} has no definition", *self._pos(t))
            if all(self.is_const(a) for a in args):
                folded = self.inline_call(fd, args, t)
                if self.is_const(folded):
                    return folded
            self.pure_function(t.name)
            return Call(t.name, tuple(args))
        return self.read_location(decl, args)

    def inline_call(self, fd, args: list, node):
        self._call_depth += 1
        try:
            if self._call_depth > Gl.MAX_INLINE_DEPTH:
                raise TranslationError(f"unbounded inlining of function {fd.name}", *self._pos(node))
            mapping = {p: value_term(self.const_value(a)) for (p, _), a in zip(fd.params, args)}
            return self.term(substitute_term(fd.body, mapping))
        finally:
            self._call_depth -= 1

    def pure_function(self, name: str) -> PureFunction:
        fn = self.pure.get(name)
        if fn is not None:
            return fn
        if name in self._pure_in_progress:
            raise TranslationError(f"recursive definition of function {name}")
        fd = self.model.definition(name)
        decl = self.model.function(name)
        self._pure_in_progress.add(name)
        try:
            params = {v: Param(v.lstrip("$")) for v, _ in fd.params}
            body = self.term(fd.body, params)
        finally:
            self._pure_in_progress.discard(name)
        fn = PureFunction(name, tuple((v.lstrip("$"), self.domains[d]) for v, d in fd.params),
                          self.domains[decl.codomain], body)
        self.pure[name] = fn
        self._pure_order.append(fn)
        return fn

    def location_keys(self, decl, args: list) -> list:
        """(condition, lvalue) pairs covering the locations `args` may denote."""
        if all(self.is_const(a) for a in args):
            values = tuple(self.const_value(a) for a in args)
            return [(TRUE, self.vtab.lookup(decl.name, values))]
        first = self.domains[decl.arg_domains[0]]
        rest = args[1:]
        if isinstance(first, RecordType) and all(self.is_const(a) for a in rest):
            fname = field_name(decl, tuple(self.const_value(a) for a in rest))
            return [(TRUE, FieldRef(args[0], fname))]
        out = []
        for key in self.vtab.by_function[decl.name]:
            tests = [self.fold(gts.Binary("==", a, value_expr(v))) for a, v in zip(args, key[1])]
            cond = conj(tests)
            if cond != FALSE:
                out.append((cond, self.vtab.locations[key]))
        return out

    def read_location(self, decl, args: list):
        cases = self.location_keys(decl, args)
        if len(cases) == 1 and cases[0][0] == TRUE:
            return cases[0][1]
        acc = Const(None)
        for cond, lvalue in reversed(cases):
            acc = self.fold(Ternary(cond, lvalue, acc))
        return acc

    def slots_of(self, decl, lvalue) -> set:
        if isinstance(lvalue, VarRef):
            return {lvalue.name}
        if isinstance(lvalue.target, VarRef) and lvalue.target.name in self.constants:
            return {f"{lvalue.target.name}.{lvalue.field}"}
        return set(self.vtab.field_slots(decl.name, lvalue.field))

    # ------------------------------------------------------------ updates

    def update_targets(self, rule: Update) -> tuple:
        lhs = rule.lhs
        if not isinstance(lhs, FunctionApp):
            raise TranslationError("left side of an update is not a function location", *self._pos(rule))
        decl = self.model.function(lhs.name)
        if decl is None or decl.kind != Gl.CONTROLLED:
            kind = decl.kind if decl else "unknown"
            raise TranslationError(f"update of {kind} function {lhs.name}", *self._pos(rule))
        args = [self.term(a) for a in lhs.args]
        return decl, self.location_keys(decl, args)

    def assign_actions(self, decl, lvalue, value, changed: frozenset) -> tuple:
        actions = []
        slots = self.slots_of(decl, lvalue)
        if self.strict and slots & changed:
            actions.append(Assert(self.fold(gts.Binary("==", lvalue, value)),
                                  f"inconsistent update of {self.model_location(decl, lvalue)}"))
        actions.append(Assign(lvalue, value))
        ir_type = self.domains[decl.codomain]
        template = assertion_template(ir_type)
        if template is not None:
            actions.append(Assert(substitute_params(template, {"v": lvalue}),
                                  f"{self.model_location(decl, lvalue)} outside {ir_type.name}"))
        return tuple(actions)

    def model_location(self, decl, lvalue) -> str:
        slots = self.slots_of(decl, lvalue)
        if len(slots) == 1:
            return self.vtab.symbols.get(next(iter(slots)), decl.name)
        return decl.name

    # ------------------------------------------------------------ inlining

    def inline(self, rule, ctx: Ctx) -> tuple:
        """Resolve macro calls, programs, lets and foralls until a structural rule remains."""
        while True:
            match rule:
                case MacroCall(name, args):
                    rd = self.model.rule(name)
                    if rd is None:
                        raise TranslationError(f"unknown rule {name}", *self._pos(rule))
                    mapping = {p: a for (p, _), a in zip(rd.params, args)}
                    nxt = substitute_rule(rd.body, mapping, ctx.self_term)
                    ctx = ctx._replace(depth=ctx.depth + 1)
                    where = name
                case ProgramCall(agent):
                    if not (isinstance(agent, FunctionApp) and agent.name in self.constants):
                        raise TranslationError("program(...) of a non-constant agent", *self._pos(rule))
                    domain = self.constants[agent.name].record
                    program = self.model.program_of(domain)
                    rd = self.model.rule(program) if program else None
                    if rd is None:
                        raise TranslationError(f"agent domain {domain} has no program", *self._pos(rule))
                    nxt = substitute_rule(rd.body, {}, agent)
                    ctx = Ctx(ctx.depth + 1, agent)
                    where = program
                case LetRule(bindings, body):
                    mapping = {}
                    for var, t in bindings:
                        mapping[var] = substitute_term(t, mapping)
                    nxt = substitute_rule(body, mapping)
                    where = None
                case ForallRule(bindings, cond, body):
                    children = []
                    for m in self.tuples(bindings):
                        c = substitute_term(cond, m)
                        test = self.term(c)
                        if test == FALSE:
                            continue
                        b = substitute_rule(body, m)
                        children.append(b if test == TRUE else CondRule(c, b, pos=rule.pos))
                    if not children:
                        nxt = SkipRule(pos=rule.pos)
                    elif len(children) == 1:
                        nxt = children[0]
                    else:
                        nxt = ParRule(tuple(children), pos=rule.pos)
                    where = None
                case _:
                    return rule, ctx
            if ctx.depth > Gl.MAX_INLINE_DEPTH:
                raise TranslationError(f"unbounded inlining of rule {where}", *self._pos(rule))
            rule = nxt

    def writes(self, rule, ctx: Ctx) -> frozenset:
        """Slots a rule may write on any branch."""
        key = (rule, ctx.self_term)
        cached = self._writes.get(key)
        if cached is not None:
            return cached
        rule, ctx = self.inline(rule, ctx)
        out = set()
        match rule:
            case Update():
                decl, cases = self.update_targets(rule)
                for _, lvalue in cases:
                    out |= self.slots_of(decl, lvalue)
            case CondRule(_, then, otherwise):
                out |= self.writes(then, ctx)
                if otherwise is not None:
                    out |= self.writes(otherwise, ctx)
            case CaseRule(_, branches, otherwise):
                for _, body in branches:
                    out |= self.writes(body, ctx)
                if otherwise is not None:
                    out |= self.writes(otherwise, ctx)
            case ChooseRule(bindings, _, body, ifnone):
                for m in self.tuples(bindings):
                    out |= self.writes(substitute_rule(body, m), ctx)
                if ifnone is not None:
                    out |= self.writes(ifnone, ctx)
            case ParRule(children) | SeqRule(children):
                for c in children:
                    out |= self.writes(c, ctx)
        result = frozenset(out)
        self._writes[key] = result
        return result

    def collapsible(self, rule, ctx: Ctx) -> bool:
        rule, ctx = self.inline(rule, ctx)
        match rule:
            case SkipRule():
                return True
            case Update():
                _, cases = self.update_targets(rule)
                return len(cases) == 1 and cases[0][0] == TRUE
            case ParRule(children):
                return all(self.collapsible(c, ctx) for c in children)
        return False

    def par_actions(self, rule: ParRule, changed: frozenset, ctx: Ctx) -> tuple:
        acc = set(changed)
        actions = []

        def visit(r, c: Ctx):
            r, c = self.inline(r, c)
            match r:
                case Update(_, rhs):
                    decl, ((_, lvalue),) = self.update_targets(r)
                    actions.extend(self.assign_actions(decl, lvalue, self.term(rhs), frozenset(acc)))
                case ParRule(children):
                    for child in children:
                        w = self.writes(child, c)
                        if w & acc and not self.strict:
                            continue
                        visit(child, c)
                        acc.update(w)

        visit(rule, ctx)
        return tuple(actions)

    # ------------------------------------------------------------ leaves

    def leaves(self, rule, changed: frozenset, ctx: Ctx) -> list:
        try:
            return self._leaves(rule, changed, ctx)
        except TranslationError as err:
            if err.line is None and getattr(rule, "pos", None):
                err.line, err.column = rule.pos
            raise

    def guarded(self, guard, rule, changed, ctx) -> list:
        if guard == FALSE:
            return []
        with self.stack.pushed(guard):
            if rule is None:
                return [Leaf(self.stack.snapshot())]
            return self.leaves(rule, changed, ctx)

    def _leaves(self, rule, changed: frozenset, ctx: Ctx) -> list:
        rule, ctx = self.inline(rule, ctx)
        match rule:
            case SkipRule():
                return [Leaf(self.stack.snapshot())]
            case Update(_, rhs):
                decl, cases = self.update_targets(rule)
                value = self.term(rhs)
                if len(cases) == 1 and cases[0][0] == TRUE:
                    return [Leaf(self.stack.snapshot(), self.assign_actions(decl, cases[0][1], value, changed))]
                out = []
                for cond, lvalue in cases:
                    with self.stack.pushed(cond):
                        out.append(Leaf(self.stack.snapshot(), self.assign_actions(decl, lvalue, value, changed)))
                out += self.guarded(negate(disj(c for c, _ in cases)), None, changed, ctx)
                return out
            case CondRule(cond, then, otherwise):
                c = self.term(cond)
                return (self.guarded(c, then, changed, ctx)
                        + self.guarded(negate(c), otherwise, changed, ctx))
            case CaseRule(scrutinee, branches, otherwise):
                s = self.term(scrutinee)
                tests, out = [], []
                for value, body in branches:
                    eq = self.fold(gts.Binary("==", s, self.term(value)))
                    out += self.guarded(conj([negate(t) for t in tests] + [eq]), body, changed, ctx)
                    tests.append(eq)
                out += self.guarded(conj(negate(t) for t in tests), otherwise, changed, ctx)
                return out
            case ChooseRule(bindings, cond, body, ifnone):
                self._saw_choose = True
                conds, out = [], []
                for m in self.tuples(bindings):
                    ck = self.term(substitute_term(cond, m))
                    conds.append(ck)
                    out += self.guarded(ck, substitute_rule(body, m), changed, ctx)
                out += self.guarded(conj(negate(c) for c in conds), ifnone, changed, ctx)
                return out
            case ParRule():
                if self.collapsible(rule, ctx):
                    return [Leaf(self.stack.snapshot(), self.par_actions(rule, changed, ctx))]
                return [Leaf(self.stack.snapshot(), block=rule, ctx=ctx)]
            case SeqRule():
                return [Leaf(self.stack.snapshot(), block=rule, ctx=ctx)]
        raise TranslationError(f"unsupported rule {type(rule).__name__}", *self._pos(rule))

    # ------------------------------------------------------------ encoding

    def encode(self, rule, at: str, fired: str, none: str, changed: frozenset, ctx: Ctx):
        """Emit the commands of `rule` at location `at`; firing paths go to `fired`, idle ones to `none`."""
        with self.stack.fresh():
            self._saw_choose = False
            leaves = self.leaves(rule, changed, ctx)
            has_choose = self._saw_choose
        if len(leaves) == 1 and leaves[0].block is not None and not leaves[0].guards:
            self.encode_block(leaves[0].block, at, fired, none, changed, leaves[0].ctx)
            return
        loc = self.location(at)
        busy, idle = [], False
        for leaf in leaves:
            g = conj(leaf.guards)
            guard = None if g == TRUE else g
            if leaf.block is not None:
                entry = f"loc{self.next_k()}"
                self.location(entry, self.changed_comment(changed))
                loc.commands.append(GuardedCmd(guard, (), False, entry))
                self.encode_block(leaf.block, entry, fired, none, changed, leaf.ctx)
                busy.append(g)
            elif leaf.actions:
                loc.commands.append(GuardedCmd(guard, leaf.actions, False, fired))
                busy.append(g)
            elif has_choose:
                loc.commands.append(GuardedCmd(guard, (), False, none))
            else:
                idle = True
        if idle:
            rest = negate(disj(busy))
            if rest != FALSE:
                loc.commands.append(GuardedCmd(None if rest == TRUE else rest, (), False, none))
        if not loc.commands:
            loc.commands.append(GuardedCmd(None, (), False, none))

    def encode_block(self, rule, at: str, fired: str, none: str, changed: frozenset, ctx: Ctx):
        match rule:
            case ParRule(children):
                self.lattice(children, at, fired, none, changed, ctx)
            case SeqRule(children):
                self.sequence(children, at, fired, none, changed, ctx)
            case _:
                self.encode(rule, at, fired, none, changed, ctx)

    @staticmethod
    def changed_comment(changed: frozenset) -> str:
        return "changed={" + ",".join(sorted(changed)) + "}"

    def lattice(self, children: tuple, at: str, fired: str, none: str, changed: frozenset, ctx: Ctx):
        k = self.next_k()
        n = len(children)
        created = 0
        # (location, path suffix, changed set, anything fired on the path)
        nodes = [(at, "", changed, False)]
        for i, child in enumerate(children, 1):
            writes = self.writes(child, ctx)
            nxt = []
            for loc, path, path_changed, path_fired in nodes:
                if i == n:
                    c_target, n_target = fired, (fired if path_fired else none)
                else:
                    c_target, n_target = f"loc{k}{path}_C{i}", f"loc{k}{path}_N{i}"
                    self.location(c_target, self.changed_comment(path_changed | writes))
                    self.location(n_target, self.changed_comment(path_changed))
                    created += 2
                    nxt += [(c_target, f"{path}_C{i}", path_changed | writes, True),
                            (n_target, f"{path}_N{i}", path_changed, path_fired)]
                if writes & path_changed and not self.strict:
                    self.location(loc).commands.append(
                        GuardedCmd(None, (), False, n_target, comment=f"skip: {','.join(sorted(writes & path_changed))}"))
                else:
                    self.encode(child, loc, c_target, n_target, path_changed, ctx)
            nodes = nxt
        self.lattices.append((k, n, created))

    def sequence(self, children: tuple, at: str, fired: str, none: str, changed: frozenset, ctx: Ctx):
        k = self.next_k()
        n = len(children)
        track = fired != none
        self.location(at).commands.append(GuardedCmd(None, (), False, f"loc{k}_S1"))
        for i in range(1, n + 1):
            self.location(f"loc{k}_S{i}")
            if track and i > 1:
                self.location(f"loc{k}_S{i}_F")
        for i, child in enumerate(children, 1):
            last = i == n
            plain_next = none if last else f"loc{k}_S{i + 1}"
            if last:
                fired_next = fired
            else:
                fired_next = f"loc{k}_S{i + 1}_F" if track else plain_next
            self.encode(child, f"loc{k}_S{i}", fired_next, plain_next, changed, ctx)
            if track and i > 1:
                self.encode(child, f"loc{k}_S{i}_F", fired_next, fired_next, changed, ctx)

    # ------------------------------------------------------------ init

    def encode_init(self, monitored_threads: list) -> GuardedCmd:
        actions = []
        for record in self.domains.declared:
            if isinstance(record, RecordType):
                actions += [Allocate(VarRef(inst), record.name) for inst in record.instances]
        for entry in self.model.init.entries:
            actions += self.init_entry(entry)
        actions += [StartThread(t.name) for t in monitored_threads]
        return GuardedCmd(None, tuple(actions), True, Gl.FIRST_LOCATION)

    def init_entry(self, entry) -> list:
        name = entry.location.name if isinstance(entry, InitSimple) else entry.function
        decl = self.model.function(name)
        if decl is None or decl.kind != Gl.CONTROLLED:
            raise TranslationError(f"initialization of non-controlled function {name}", *self._pos(entry))
        actions = []

        def assign(values: tuple, value_t):
            lvalue = self.vtab.lookup(name, values)
            actions.extend(self.assign_actions(decl, lvalue, self.term(value_t), frozenset()))

        match entry:
            case InitSimple(location, value):
                args = [self.term(a) for a in location.args]
                if not all(self.is_const(a) for a in args):
                    raise TranslationError(f"initialization of {name} needs constant arguments", *self._pos(entry))
                assign(tuple(self.const_value(a) for a in args), value)
            case InitGroup(_, bindings, value):
                if len(bindings) != decl.arity:
                    raise TranslationError(f"initialization of {name} binds {len(bindings)} of {decl.arity} arguments",
                                           *self._pos(entry))
                for m in self.tuples(bindings):
                    values = tuple(self.const_value(self.term(m[v])) for v, _ in bindings)
                    assign(values, substitute_term(value, m))
            case InitConditional(_, bindings, case):
                if len(bindings) != 1 or decl.arity != 1:
                    raise TranslationError(f"conditional initialization of {name} needs one argument", *self._pos(entry))
                var = bindings[0][0]
                listed = []
                for value_t, result in case.branches:
                    v = self.term(value_t)
                    if not self.is_const(v):
                        raise TranslationError(f"case value of {name} is not a constant", *self._pos(entry))
                    listed.append(self.const_value(v))
                    assign((listed[-1],), substitute_term(result, {var: value_t}))
                if case.otherwise is not None:
                    for m in self.tuples(bindings):
                        v = self.const_value(self.term(m[var]))
                        if not any(v is x or (v == x and type(v) is type(x)) for x in listed):
                            assign((v,), substitute_term(case.otherwise, m))
        return actions

    # ------------------------------------------------------------ threads and properties

    def monitored_threads(self) -> list:
        threads = []
        for slot, lvalue, ir_type in self.vtab.monitored():
            values = finite_values(ir_type)
            if not values:
                raise TranslationError(f"monitored location {slot} has no finite codomain")
            cmds = [GuardedCmd(None, (Assign(lvalue, value_expr(v)),), True, Gl.INIT_LOCATION) for v in values]
            name = slot.replace(".", "_") + Gl.MONITORED_SUFFIX
            threads.append(ThreadDef(name, [Location(Gl.INIT_LOCATION, cmds)], False, Gl.MONITORED))
        return threads

    def is_boolean(self, t) -> Optional[bool]:
        """Whether a term is boolean by the signature; None when it cannot tell."""
        match t:
            case Literal(value):
                return isinstance(value, bool)
            case EnumElement():
                return False
            case FunctionApp(fname):
                decl = self.model.function(fname)
                if decl is None:
                    return None
                if decl.is_constant_element:
                    return False
                return decl.codomain == Gl.BOOLEAN
            case Binary(op):
                return op not in ARITHMETIC_OPS
            case Unary(op):
                return op == "not"
            case CondTerm(_, then, _):
                return self.is_boolean(then)
            case CaseTerm(_, branches, _):
                return self.is_boolean(branches[0][1]) if branches else None
            case Quantified() | IsUndef():
                return True
            case SeqCall(op):
                return True if op in ("contains", "isEmpty") else None
        return None

    def lower_property(self, name: str, formula, text: str) -> PropertyDef:
        exprs = []
        ids = {}
        for atom in ltl.atoms(formula):
            if self.is_boolean(atom) is False:
                raise TranslationError(f"atom of {name} is not boolean", *self._pos(atom))
            e = self.term(atom)
            if isinstance(e, Const) and not isinstance(e.value, bool):
                raise TranslationError(f"atom of {name} is not boolean", *self._pos(atom))
            if e not in exprs:
                exprs.append(e)
            ids[atom] = e
        names = ["P"] if len(exprs) == 1 else [f"P{i}" for i in range(1, len(exprs) + 1)]
        lowered = ltl.map_atoms(formula, lambda a: names[exprs.index(ids[a])])
        return PropertyDef(name, lowered, tuple(zip(names, exprs)), text)

    def lower_ltl_spec(self, spec) -> PropertyDef:
        return self.lower_property(spec.name, spec.formula, spec.text)

    def lower_invariant(self, inv) -> PropertyDef:
        return self.lower_property(f"ltl_{inv.name}", ltl.Always(ltl.Atom(inv.term)), inv.text)

    # ------------------------------------------------------------ model

    def translate(self) -> GuardedTransitionSystem:
        monitored = self.monitored_threads()
        loc0 = self.location(Gl.INIT_LOCATION)
        loc0.commands.append(self.encode_init(monitored))
        self.location(Gl.FIRST_LOCATION)
        self.encode(self.model.main_rule, Gl.FIRST_LOCATION, Gl.END_LOCATION, Gl.END_LOCATION, frozenset(), Ctx())
        end = self.location(Gl.END_LOCATION)
        end.commands.append(GuardedCmd(None, (), True, Gl.FIRST_LOCATION))
        if self.stack.items or self.stack.pushes != self.stack.pops:
            raise TranslationError("unbalanced guards stack")

        properties = [self.lower_ltl_spec(s) for s in self.model.ltl_specs]
        properties += [self.lower_invariant(v) for v in self.model.invariants]

        variables = [VariableDef(name, self.domains[ref.record], Gl.STATIC_CONST)
                     for name, ref in self.constants.items()]
        variables += self.vtab.variables
        main = ThreadDef(Gl.MAIN_THREAD, list(self.locations.values()), True, Gl.MAIN_KIND, Gl.INIT_LOCATION)
        system = GuardedTransitionSystem(
            name=self.model.name,
            types=list(self.domains.declared),
            variables=variables,
            pure_functions=list(self._pure_order),
            threads=[main] + monitored,
            properties=properties,
            symbols=dict(self.vtab.symbols),
        )
        try:
            check_system(system)
        except ValueError as err:
            raise TranslationError(str(err)) from None
        return system


def translate_model(model: ModelAst, strict_updates: bool = False) -> GuardedTransitionSystem:
    return Translator(model, strict_updates).translate()
