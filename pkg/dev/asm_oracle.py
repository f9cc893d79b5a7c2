"""
Reference interpreter for small AsmetaL models.

One ASM step is run directly on the AST: updates are evaluated against the
current state and applied together, every choose candidate opens its own
branch, and inside a par a child whose possible writes meet the locations
already changed by a fired sibling is skipped. Par children must not read
what an earlier sibling writes (the translated system runs siblings in order).
"""
import itertools

from asmcheck import ltl, seq
from asmcheck.buchi import to_buchi
from asmcheck.domains import build_domain_table, build_variable_table
from asmcheck.gts import EnumValue, RecordRef, default_value
from asmcheck.model import (Literal, EnumElement, Var, FunctionApp, Binary, Unary, CondTerm, CaseTerm,
                            Quantified, IsUndef, SelfTerm, SeqLiteral, SeqCall, Update, CondRule, CaseRule,
                            ChooseRule, ForallRule, ParRule, SeqRule, LetRule, SkipRule, MacroCall, ProgramCall,
                            InitSimple, InitGroup, InitConditional)
from asmcheck.globals import Gl

SELF = "self"


class _Unknown(Exception):
    """A term needs the state while only the bound variables are known."""


def _eq(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    return a == b


def _div(a, b):
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _mod(a, b):
    r = abs(a) % abs(b)
    return -r if a < 0 else r


BINARY = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "xor": lambda a, b: a != b,
    "implies": lambda a, b: (not a) or b,
    "iff": lambda a, b: a == b,
    "=": _eq,
    "!=": lambda a, b: not _eq(a, b),
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "mod": _mod,
}


def accepting_cycle(roots, step, accepting) -> bool:
    """Tarjan's SCCs over the nodes reachable from `roots`; True when a cyclic one holds an accepting node."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    for root in roots:
        if root in index:
            continue
        index[root] = low[root] = len(index)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(step(root)))]
        while work:
            node, edges = work[-1]
            pushed = False
            for nxt in edges:
                if nxt not in index:
                    index[nxt] = low[nxt] = len(index)
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(step(nxt))))
                    pushed = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if pushed:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] != index[node]:
                continue
            component = []
            while True:
                member = stack.pop()
                on_stack.discard(member)
                component.append(member)
                if member == node:
                    break
            cyclic = len(component) > 1 or node in step(node)
            if cyclic and any(accepting(c) for c in component):
                return True
    return False


class AsmOracle:

    def __init__(self, model):
        self.model = model
        self.domains = build_domain_table(model)
        self.vtab = build_variable_table(model, self.domains)
        self.controlled = [k for k in self.vtab.locations
                           if self.vtab.kinds[self.vtab.slot_names[k]] == Gl.CONTROLLED]
        self.monitored = [k for k in self.vtab.locations
                          if self.vtab.kinds[self.vtab.slot_names[k]] == Gl.MONITORED]
        self._graph = None

    # ------------------------------------------------------------ terms

    def domain_values(self, name) -> tuple:
        return self.domains.finite_values(name)

    def bindings(self, bindings, env: dict):
        for values in itertools.product(*(self.domain_values(d) for _, d in bindings)):
            yield {**env, **{v: x for (v, _), x in zip(bindings, values)}}

    def eval(self, t, state, env: dict):
        match t:
            case Literal(value):
                return value
            case EnumElement(domain, name):
                return EnumValue(domain, name)
            case Var(name):
                value = env[name]
                if value is _Unknown:
                    raise _Unknown()
                return value
            case SelfTerm():
                return env[SELF]
            case FunctionApp(name, args):
                decl = self.model.function(name)
                if decl.is_constant_element:
                    return RecordRef(decl.codomain, name)
                values = tuple(self.eval(a, state, env) for a in args)
                if decl.kind in (Gl.CONTROLLED, Gl.MONITORED):
                    if state is None:
                        raise _Unknown()
                    return state[(name, values)]
                fd = self.model.definition(name)
                return self.eval(fd.body, state, {p: v for (p, _), v in zip(fd.params, values)})
            case Binary(op, left, right):
                return BINARY[op](self.eval(left, state, env), self.eval(right, state, env))
            case Unary("not", operand):
                return not self.eval(operand, state, env)
            case Unary("-", operand):
                return -self.eval(operand, state, env)
            case CondTerm(cond, then, otherwise):
                if self.eval(cond, state, env):
                    return self.eval(then, state, env)
                return None if otherwise is None else self.eval(otherwise, state, env)
            case CaseTerm(scrutinee, branches, otherwise):
                s = self.eval(scrutinee, state, env)
                for value, result in branches:
                    if _eq(s, self.eval(value, state, env)):
                        return self.eval(result, state, env)
                return None if otherwise is None else self.eval(otherwise, state, env)
            case Quantified(kind, bindings, cond):
                tests = (self.eval(cond, state, m) for m in self.bindings(bindings, env))
                return all(tests) if kind == "forall" else any(tests)
            case IsUndef(operand):
                return self.eval(operand, state, env) is None
            case SeqLiteral(items):
                return seq.create(*(self.eval(i, state, env) for i in items))
            case SeqCall(op, args):
                return seq.seq_ops(op, [self.eval(a, state, env) for a in args])
        raise NotImplementedError(type(t).__name__)

    def macro_env(self, name: str, args, state, env: dict):
        rd = self.model.rule(name)
        inner = {SELF: env[SELF]} if SELF in env else {}
        for (p, _), a in zip(rd.params, args):
            try:
                inner[p] = self.eval(a, state, env)
            except _Unknown:
                inner[p] = _Unknown
        return rd.body, inner

    def program_of(self, agent: RecordRef):
        return self.model.rule(self.model.program_of(agent.record)).body

    # ------------------------------------------------------------ writes

    def writes(self, rule, env: dict) -> frozenset:
        """Locations a rule may update, whatever the state."""
        match rule:
            case Update(FunctionApp(name, args)):
                pattern = []
                for a in args:
                    try:
                        pattern.append(self.eval(a, None, env))
                    except _Unknown:
                        pattern.append(_Unknown)
                return frozenset(k for k in self.vtab.by_function[name]
                                 if all(p is _Unknown or _eq(p, v) for p, v in zip(pattern, k[1])))
            case CondRule(_, then, otherwise):
                out = self.writes(then, env)
                return out | self.writes(otherwise, env) if otherwise is not None else out
            case CaseRule(_, branches, otherwise):
                out = frozenset().union(*(self.writes(b, env) for _, b in branches))
                return out | self.writes(otherwise, env) if otherwise is not None else out
            case ChooseRule(bindings, _, body, ifnone):
                out = frozenset().union(*(self.writes(body, m) for m in self.bindings(bindings, env)))
                return out | self.writes(ifnone, env) if ifnone is not None else out
            case ForallRule(bindings, _, body):
                return frozenset().union(*(self.writes(body, m) for m in self.bindings(bindings, env)))
            case ParRule(children) | SeqRule(children):
                return frozenset().union(*(self.writes(c, env) for c in children))
            case LetRule(bindings, body):
                inner = dict(env)
                for var, t in bindings:
                    try:
                        inner[var] = self.eval(t, None, inner)
                    except _Unknown:
                        inner[var] = _Unknown
                return self.writes(body, inner)
            case MacroCall(name, args):
                return self.writes(*self.macro_env(name, args, None, env))
            case ProgramCall(agent):
                try:
                    agents = [self.eval(agent, None, env)]
                except _Unknown:
                    agents = [RecordRef(f.codomain, f.name) for f in self.model.function_decls
                              if f.is_constant_element and self.model.program_of(f.codomain)]
                return frozenset().union(*(self.writes(self.program_of(a), {SELF: a}) for a in agents))
            case SkipRule():
                return frozenset()
        raise NotImplementedError(type(rule).__name__)

    # ------------------------------------------------------------ rules

    def updates(self, rule, state, env: dict, changed: frozenset) -> list:
        """Every update set the rule can produce in `state`."""
        match rule:
            case SkipRule():
                return [{}]
            case Update(FunctionApp(name, args), rhs):
                key = (name, tuple(self.eval(a, state, env) for a in args))
                return [{key: self.eval(rhs, state, env)}]
            case CondRule(cond, then, otherwise):
                if self.eval(cond, state, env):
                    return self.updates(then, state, env, changed)
                return [{}] if otherwise is None else self.updates(otherwise, state, env, changed)
            case CaseRule(scrutinee, branches, otherwise):
                s = self.eval(scrutinee, state, env)
                for value, body in branches:
                    if _eq(s, self.eval(value, state, env)):
                        return self.updates(body, state, env, changed)
                return [{}] if otherwise is None else self.updates(otherwise, state, env, changed)
            case ChooseRule(bindings, cond, body, ifnone):
                out = []
                for m in self.bindings(bindings, env):
                    if self.eval(cond, state, m):
                        out += self.updates(body, state, m, changed)
                if out:
                    return out
                return [{}] if ifnone is None else self.updates(ifnone, state, env, changed)
            case ForallRule(bindings, cond, body):
                children = [(CondRule(cond, body), m) for m in self.bindings(bindings, env)]
                return self.par(children, state, changed)
            case ParRule(children):
                return self.par([(c, env) for c in children], state, changed)
            case SeqRule(children):
                results = [{}]
                for child in children:
                    nxt = []
                    for done in results:
                        current = {**state, **done}
                        nxt += [{**done, **u} for u in self.updates(child, current, env, changed)]
                    results = nxt
                return results
            case LetRule(bindings, body):
                inner = dict(env)
                for var, t in bindings:
                    inner[var] = self.eval(t, state, inner)
                return self.updates(body, state, inner, changed)
            case MacroCall(name, args):
                body, inner = self.macro_env(name, args, state, env)
                return self.updates(body, state, inner, changed)
            case ProgramCall(agent):
                a = self.eval(agent, state, env)
                return self.updates(self.program_of(a), state, {SELF: a}, changed)
        raise NotImplementedError(type(rule).__name__)

    def par(self, children: list, state, changed: frozenset) -> list:
        results = [({}, changed)]
        for rule, env in children:
            w = self.writes(rule, env)
            nxt = []
            for done, acc in results:
                if w & acc:
                    nxt.append((done, acc))
                    continue
                for u in self.updates(rule, state, env, acc):
                    nxt.append(({**done, **u}, acc | w if u else acc))
            results = nxt
        return [u for u, _ in results]

    # ------------------------------------------------------------ runs

    def with_monitored(self, state: dict) -> list:
        choices = [self.domains.finite_values(self.model.function(k[0]).codomain) for k in self.monitored]
        out = []
        for values in itertools.product(*choices):
            s = dict(state)
            s.update(zip(self.monitored, values))
            out.append(s)
        return out

    def initial_states(self) -> list:
        state: dict = {}
        for entry in self.model.init.entries:
            match entry:
                case InitSimple(FunctionApp(name, args), value):
                    state[(name, tuple(self.eval(a, state, {}) for a in args))] = self.eval(value, state, {})
                case InitGroup(name, bindings, value):
                    for m in self.bindings(bindings, {}):
                        key = (name, tuple(m[v] for v, _ in bindings))
                        state[key] = self.eval(value, state, m)
                case InitConditional(name, bindings, case):
                    for m in self.bindings(bindings, {}):
                        result = self.eval(case, state, m)
                        if result is not None or case.otherwise is not None:
                            state[(name, (m[bindings[0][0]],))] = result
        for key in self.controlled:
            if key not in state:
                state[key] = default_value(self.vtab.types[self.vtab.slot_names[key]])
        return self.with_monitored(state)

    def successors(self, state: dict) -> list:
        out = []
        for u in self.updates(self.model.main_rule, state, {}, frozenset()):
            nxt = dict(state)
            nxt.update(u)
            out += self.with_monitored(nxt)
        return out

    def freeze(self, state: dict) -> frozenset:
        return frozenset((self.vtab.symbols[self.vtab.slot_names[k]], v) for k, v in state.items())

    def graph(self, limit: int = 200_000) -> tuple:
        """Initial keys, state per key and successor keys per key of the reachable part."""
        if self._graph is not None:
            return self._graph
        states: dict = {}
        edges: dict = {}
        for s in self.initial_states():
            states.setdefault(self.freeze(s), s)
        initial = list(states)
        todo = list(initial)
        while todo:
            key = todo.pop()
            out = []
            for t in self.successors(states[key]):
                nxt = self.freeze(t)
                if nxt not in states:
                    states[nxt] = t
                    todo.append(nxt)
                if nxt not in out:
                    out.append(nxt)
            edges[key] = out
            assert len(states) <= limit
        self._graph = (initial, states, edges)
        return self._graph

    def reachable(self, limit: int = 200_000) -> set:
        return set(self.graph(limit)[1])

    # ------------------------------------------------------------ properties

    def formulas(self) -> dict:
        """Property name -> LTL formula over model terms, named as the translator names them."""
        out = {spec.name: spec.formula for spec in self.model.ltl_specs}
        out.update({f"ltl_{inv.name}": ltl.Always(ltl.Atom(inv.term)) for inv in self.model.invariants})
        return out

    def holds(self, formula) -> bool:
        """No run from an initial state is accepted by the automaton of the negation."""
        automaton = to_buchi(ltl.to_nnf(ltl.Not(formula)))
        atoms = ltl.atoms(formula)
        initial, states, edges = self.graph()
        letters: dict = {}
        steps: dict = {}

        def letter(key):
            if key not in letters:
                letters[key] = frozenset(a for a in atoms if self.eval(a, states[key], {}))
            return letters[key]

        def step(node):
            if node not in steps:
                key, q = node
                steps[node] = [(t, q2) for label, q2 in automaton.successors(q) if label.matches(letter(key))
                               for t in edges[key]]
            return steps[node]

        roots = [(key, q) for key in initial for q in sorted(automaton.initial)]
        return not accepting_cycle(roots, step, lambda node: node[1] in automaton.accepting)

    def verdicts(self) -> dict:
        return {name: Gl.HOLDS if self.holds(f) else Gl.VIOLATED for name, f in self.formulas().items()}
