"""Explicit-state exploration of a GuardedTransitionSystem; only visible states are stored."""
import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

from .buchi import to_buchi
from .evaluator import StateVector, evaluator_for
from .exceptions import EvaluationError, AssertionViolation, BoundExhausted
from .globals import Gl
from .gts import GuardedTransitionSystem, PropertyDef, default_value
from . import ltl


@dataclass
class Limits:
    max_states: Optional[int] = None
    max_depth: Optional[int] = None
    max_seconds: Optional[float] = None


@dataclass
class Stats:
    transitions: int = 0
    states: int = 0
    matched_states: int = 0
    max_depth: int = 0
    errors_found: int = 0
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trace:
    """Visible states of a counterexample; `loop_start` indexes the cycle entry of a lasso."""
    states: list = field(default_factory=list)
    loop_start: Optional[int] = None

    @property
    def is_lasso(self) -> bool:
        return self.loop_start is not None


@dataclass
class Verdict:
    name: str
    kind: str
    outcome: str
    trace: Optional[Trace] = None
    message: str = ""
    # property text as declared, for the report
    text: str = ""
    stats: Optional[Stats] = None

    @property
    def holds(self) -> bool:
        return self.outcome == Gl.HOLDS


class _Bounds:

    def __init__(self, limits: Limits):
        self.limits = limits
        self.start = time.monotonic()

    def check(self, states: int, depth: int):
        lim = self.limits
        if lim.max_states is not None and states > lim.max_states:
            raise BoundExhausted(f"bound exhausted: more than {lim.max_states} states")
        if lim.max_depth is not None and depth > lim.max_depth:
            raise BoundExhausted(f"bound exhausted: depth above {lim.max_depth}")
        if lim.max_seconds is not None and time.monotonic() - self.start > lim.max_seconds:
            raise BoundExhausted(f"bound exhausted: more than {lim.max_seconds}s")


class SeenSet:
    """Lock-protected state set with insert-if-absent."""

    def __init__(self):
        self._items: dict = {}
        self._lock = threading.Lock()

    def add(self, state, parent=None) -> bool:
        with self._lock:
            if state in self._items:
                return False
            self._items[state] = parent
            return True

    def parent(self, state):
        return self._items.get(state)

    def __contains__(self, state) -> bool:
        return state in self._items

    def __len__(self) -> int:
        return len(self._items)


class Checker:

    def __init__(self, system: GuardedTransitionSystem, limits: Limits = None):
        self.system = system
        self.limits = limits or Limits()
        self.ev = evaluator_for(system)
        self.locations = [{loc.label: loc for loc in t.locations} for t in system.threads]
        self.stats = Stats()
        # visible state graph, filled on demand
        self.graph: dict = {}
        self._t0 = time.monotonic()

    # ------------------------------------------------------------ steps

    def initial_states(self) -> list:
        system, layout = self.system, self.ev.layout
        values = [None] * len(layout)
        for var in system.variables:
            if var.initial is not None:
                values[layout.slot(var.name)] = self.ev.eval(var.initial, values)
        start = StateVector(tuple(values),
                            tuple(t.locations[0].label for t in system.threads),
                            tuple(t.active_at_start or i == 0 for i, t in enumerate(system.threads)))
        main = system.main
        if main.init_location is None:
            return self.environment(start)
        loc = self.locations[0][main.init_location]
        out = []
        for cmd in loc.commands:
            if not self.ev.guard(cmd, start.values):
                continue
            written = set(self.ev.written_slots(cmd, start))
            s = self.ev.apply(cmd, start, 0)
            values = list(s.values)
            for i, kind in enumerate(layout.kinds):
                if kind == Gl.CONTROLLED and i not in written and values[i] is None:
                    values[i] = default_value(layout.types[i])
            out += self.environment(s._replace(values=tuple(values)))
        return _unique(out)

    def main_step(self, state: StateVector) -> list:
        """States reached by the main thread's invisible chains ending in a visible command."""
        done = []
        todo = [(state, frozenset())]
        while todo:
            s, visited = todo.pop()
            loc = self.locations[0][s.locations[0]]
            branch = []
            for cmd in loc.commands:
                if not self.ev.guard(cmd, s.values):
                    continue
                t = self.ev.apply(cmd, s, 0)
                if cmd.visible:
                    # None marks a finished chain
                    branch.append((t, None))
                    continue
                key = (t.locations[0], t.values)
                if key in visited or len(visited) > Gl.MAX_CHAIN_LENGTH:
                    raise EvaluationError(f"invisible commands loop at {loc.label}")
                branch.append((t, visited | {key}))
            todo.extend(reversed(branch))
            while todo and todo[-1][1] is None:
                done.append(todo.pop()[0])
        return done

    def environment(self, state: StateVector) -> list:
        """One state per choice of every active environment thread."""
        choices = []
        for i in range(1, len(self.system.threads)):
            if not state.active[i]:
                continue
            loc = self.locations[i][state.locations[i]]
            enabled = [cmd for cmd in loc.commands if self.ev.guard(cmd, state.values)]
            choices.append([(i, cmd) for cmd in enabled])
        out = []
        for combo in itertools.product(*choices):
            s = state
            for i, cmd in combo:
                s = self.ev.apply(cmd, s, i)
            out.append(s)
        return out

    def successors(self, state: StateVector) -> list:
        nexts = self.graph.get(state)
        if nexts is None:
            nexts = []
            for s in self.main_step(state):
                nexts += self.environment(s)
            nexts = _unique(nexts)
            self.graph[state] = nexts
        return nexts

    # ------------------------------------------------------------ reachability

    def explore(self) -> Verdict:
        """DFS over visible states; the first deadlock or runtime failure stops the search."""
        name = self.system.name
        stats = self.stats = Stats()
        bounds = _Bounds(self.limits)
        self._t0 = bounds.start
        seen: set = set()
        path: list = []
        try:
            for init in self.initial_states():
                if init in seen:
                    stats.matched_states += 1
                    continue
                seen.add(init)
                stats.states += 1
                stack = [iter(self._checked_successors(init, path + [init]))]
                path.append(init)
                found = self._deadlock(init, path)
                if found:
                    return found
                while stack:
                    bounds.check(stats.states, len(path))
                    stats.max_depth = max(stats.max_depth, len(path))
                    nxt = next(stack[-1], None)
                    if nxt is None:
                        stack.pop()
                        path.pop()
                        continue
                    stats.transitions += 1
                    if nxt in seen:
                        stats.matched_states += 1
                        continue
                    seen.add(nxt)
                    stats.states += 1
                    path.append(nxt)
                    found = self._deadlock(nxt, path)
                    if found:
                        return found
                    stack.append(iter(self._checked_successors(nxt, path)))
        except _StepFailure as failure:
            stats.errors_found += 1
            return self._finish(failure.verdict)
        except BoundExhausted as err:
            return self._finish(Verdict(name, Gl.DEADLOCK, Gl.OUTCOME_ERROR, message=str(err)))
        return self._finish(Verdict(name, Gl.DEADLOCK, Gl.HOLDS))

    def _finish(self, verdict: Verdict) -> Verdict:
        self.stats.seconds = time.monotonic() - self._t0
        verdict.stats = self.stats
        return verdict

    def _deadlock(self, state, path) -> Optional[Verdict]:
        if self._checked_successors(state, path):
            return None
        self.stats.errors_found += 1
        return self._finish(Verdict(self.system.name, Gl.DEADLOCK, Gl.VIOLATED, Trace(list(path))))

    def _checked_successors(self, state, path) -> list:
        try:
            return self.successors(state)
        except AssertionViolation as err:
            raise _StepFailure(Verdict(self.system.name, Gl.ASSERTION, Gl.VIOLATED, Trace(list(path)),
                                       message=err.message)) from None
        except EvaluationError as err:
            raise _StepFailure(Verdict(self.system.name, Gl.ASSERTION, Gl.OUTCOME_ERROR, Trace(list(path)),
                                       message=err.message)) from None

    def explore_parallel(self, workers: int) -> Verdict:
        """Level-synchronous reachability over a shared seen set; no LTL."""
        name = self.system.name
        stats = self.stats = Stats()
        bounds = _Bounds(self.limits)
        self._t0 = bounds.start
        seen = SeenSet()
        lock = threading.Lock()

        def path_to(state) -> list:
            out = [state]
            while (p := seen.parent(out[-1])) is not None:
                out.append(p)
            return out[::-1]

        def expand(state):
            try:
                main = self.main_step(state)
                nexts = _unique([t for s in main for t in self.environment(s)])
            except EvaluationError as err:
                return state, None, err
            return state, nexts, None

        try:
            frontier = [s for s in self.initial_states() if seen.add(s)]
            stats.states = len(frontier)
            depth = 0
            with ThreadPoolExecutor(max_workers=workers) as pool:
                while frontier:
                    depth += 1
                    bounds.check(len(seen), depth)
                    stats.max_depth = depth
                    nxt_frontier = []
                    for state, nexts, err in pool.map(expand, frontier):
                        if err is not None:
                            outcome = Gl.VIOLATED if isinstance(err, AssertionViolation) else Gl.OUTCOME_ERROR
                            stats.errors_found += 1
                            return self._finish(Verdict(name, Gl.ASSERTION, outcome, Trace(path_to(state)),
                                                        message=err.message))
                        if not nexts:
                            stats.errors_found += 1
                            return self._finish(Verdict(name, Gl.DEADLOCK, Gl.VIOLATED, Trace(path_to(state))))
                        with lock:
                            stats.transitions += len(nexts)
                        for t in nexts:
                            if seen.add(t, state):
                                nxt_frontier.append(t)
                            else:
                                stats.matched_states += 1
                    stats.states = len(seen)
                    frontier = nxt_frontier
        except BoundExhausted as err:
            return self._finish(Verdict(name, Gl.DEADLOCK, Gl.OUTCOME_ERROR, message=str(err)))
        return self._finish(Verdict(name, Gl.DEADLOCK, Gl.HOLDS))

    # ------------------------------------------------------------ LTL

    def letter(self, prop: PropertyDef, state: StateVector) -> frozenset:
        return frozenset(pid for pid, expr in prop.propositions if self.ev.eval(expr, state.values) is True)

    def check_ltl(self, prop: PropertyDef) -> Verdict:
        """Nested DFS for an accepting lasso of the product with the automaton of the negation."""
        automaton = to_buchi(ltl.to_nnf(ltl.Not(prop.formula)))
        stats = Stats()
        bounds = _Bounds(self.limits)
        letters: dict = {}

        def letter(s):
            v = letters.get(s)
            if v is None:
                v = letters[s] = self.letter(prop, s)
            return v

        def step(node) -> list:
            s, q = node
            nexts = self._checked_successors(s, [s]) or [s]
            out = []
            for label, q2 in automaton.successors(q):
                if label.matches(letter(s)):
                    out += [(t, q2) for t in nexts]
            return out

        outer_seen: set = set()
        inner_seen: set = set()
        on_stack: dict = {}
        verdict = None
        try:
            for init in self.initial_states():
                for q0 in sorted(automaton.initial):
                    root = (init, q0)
                    if root in outer_seen:
                        continue
                    lasso = self._outer(root, step, automaton.accepting, outer_seen, inner_seen, on_stack,
                                        stats, bounds)
                    if lasso is not None:
                        states, loop_start = lasso
                        stats.errors_found += 1
                        verdict = Verdict(prop.name, Gl.LTL, Gl.VIOLATED, Trace(states, loop_start), text=prop.text)
                        break
                if verdict:
                    break
        except _StepFailure as failure:
            stats.errors_found += 1
            v = failure.verdict
            verdict = Verdict(prop.name, Gl.LTL, Gl.OUTCOME_ERROR, v.trace, message=v.message, text=prop.text)
        except BoundExhausted as err:
            verdict = Verdict(prop.name, Gl.LTL, Gl.OUTCOME_ERROR, message=str(err), text=prop.text)
        except EvaluationError as err:
            verdict = Verdict(prop.name, Gl.LTL, Gl.OUTCOME_ERROR, message=err.message, text=prop.text)
        if verdict is None:
            verdict = Verdict(prop.name, Gl.LTL, Gl.HOLDS, text=prop.text)
        stats.seconds = time.monotonic() - bounds.start
        verdict.stats = stats
        return verdict

    @staticmethod
    def _outer(root, step, accepting, outer_seen, inner_seen, on_stack, stats, bounds):
        outer_seen.add(root)
        stats.states += 1
        path = [root]
        on_stack[root] = 0
        stack = [iter(step(root))]
        while stack:
            bounds.check(stats.states, len(path))
            stats.max_depth = max(stats.max_depth, len(path))
            nxt = next(stack[-1], None)
            if nxt is not None:
                stats.transitions += 1
                if nxt in outer_seen:
                    stats.matched_states += 1
                    continue
                outer_seen.add(nxt)
                stats.states += 1
                on_stack[nxt] = len(path)
                path.append(nxt)
                stack.append(iter(step(nxt)))
                continue
            # postorder: search a cycle back to the stack from accepting nodes
            node = path[-1]
            if node[1] in accepting:
                cycle = Checker._inner(node, step, inner_seen, on_stack)
                if cycle is not None:
                    states = [n[0] for n in path] + [n[0] for n in cycle[:-1]]
                    return states, on_stack[cycle[-1]]
            stack.pop()
            path.pop()
            del on_stack[node]
        return None

    @staticmethod
    def _inner(seed, step, inner_seen, on_stack) -> Optional[list]:
        """Path seed -> ... -> node on the outer stack (excluding seed), or None."""
        parents = {}
        todo = [seed]
        while todo:
            node = todo.pop()
            for nxt in step(node):
                if nxt in on_stack:
                    out = [nxt]
                    cur = node
                    while cur != seed:
                        out.append(cur)
                        cur = parents[cur]
                    return out[::-1]
                if nxt in inner_seen:
                    continue
                inner_seen.add(nxt)
                parents[nxt] = node
                todo.append(nxt)
        return None

    # ------------------------------------------------------------ all

    def check(self, properties: list = None, deadlock: bool = True) -> list:
        verdicts = []
        if deadlock:
            verdicts.append(self.explore())
        props = self.system.properties if properties is None else properties
        verdicts += [self.check_ltl(p) for p in props]
        return verdicts


class _StepFailure(Exception):

    def __init__(self, verdict: Verdict):
        super().__init__(verdict.message)
        self.verdict = verdict


def _unique(states: list) -> list:
    return list(dict.fromkeys(states))


def explore(system: GuardedTransitionSystem, limits: Limits = None) -> Verdict:
    return Checker(system, limits).explore()


def check_ltl(system: GuardedTransitionSystem, prop: PropertyDef, limits: Limits = None) -> Verdict:
    return Checker(system, limits).check_ltl(prop)


def initial_states(system: GuardedTransitionSystem) -> list:
    return Checker(system).initial_states()


def successors(system: GuardedTransitionSystem, state: StateVector) -> list:
    return Checker(system).successors(state)
