from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .ltl import (Ltl, Atom, LtlTrue, LtlFalse, Not, And, Or, Always, Eventually,
                  Until, Release, is_nnf, to_nnf)


@dataclass(frozen=True)
class Label:
    pos: frozenset
    neg: frozenset

    def matches(self, true_atoms) -> bool:
        return self.pos <= true_atoms and not (self.neg & true_atoms)

    def __str__(self) -> str:
        lits = [str(p) for p in sorted(self.pos, key=str)] + [f"!{n}" for n in sorted(self.neg, key=str)]
        return " & ".join(lits) if lits else "true"


@dataclass
class BuchiAutomaton:
    states: list
    initial: set
    transitions: list                  # of (src, Label, dst)
    accepting: set
    # obligations and level behind each state id, for dumps
    names: dict = field(default_factory=dict)

    def __post_init__(self):
        self._out: dict = {s: [] for s in self.states}
        for src, label, dst in self.transitions:
            self._out[src].append((label, dst))

    def successors(self, state) -> list:
        return self._out[state]

    def dump(self) -> str:
        lines = [f"states: {len(self.states)}",
                 "initial: " + " ".join(str(s) for s in sorted(self.initial)),
                 "accepting: " + " ".join(str(s) for s in sorted(self.accepting))]
        for src, label, dst in self.transitions:
            lines.append(f"{src} -[{label}]-> {dst}")
        return "\n".join(lines)

    def accepts_lasso(self, letters: Sequence[frozenset], loop_start: int) -> bool:
        """Acceptance of the ultimately periodic word letters[:loop_start] letters[loop_start:]^w."""
        n = len(letters)
        succ = [i + 1 for i in range(n - 1)] + [loop_start]

        def step(node):
            i, q = node
            return [(succ[i], dst) for label, dst in self._out[q] if label.matches(letters[i])]

        reachable = set()
        stack = [(0, q) for q in sorted(self.initial)]
        while stack:
            node = stack.pop()
            if node in reachable:
                continue
            reachable.add(node)
            stack.extend(step(node))
        for seed in reachable:
            if seed[1] not in self.accepting:
                continue
            seen = set()
            stack = step(seed)
            while stack:
                node = stack.pop()
                if node == seed:
                    return True
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(step(node))
        return False


def _eventualities(formula: Ltl) -> list:
    found: list = []

    def walk(f: Ltl):
        match f:
            case Until(l, r):
                walk(l)
                walk(r)
            case Eventually(g):
                walk(g)
            case Not(g) | Always(g):
                walk(g)
                return
            case And(l, r) | Or(l, r) | Release(l, r):
                walk(l)
                walk(r)
                return
            case _:
                return
        if f not in found:
            found.append(f)
    walk(formula)
    return found


def _covers(obligations: frozenset) -> list:
    """Tableau expansion of a set of obligations into (label, next, postponed) covers."""
    results: dict = {}

    def expand(todo: list, done: frozenset, pos: frozenset, neg: frozenset,
               nxt: frozenset, postponed: frozenset):
        if not todo:
            key = (Label(pos, neg), nxt, postponed)
            results.setdefault(key, None)
            return
        f, rest = todo[0], todo[1:]
        if f in done:
            expand(rest, done, pos, neg, nxt, postponed)
            return
        done = done | {f}
        match f:
            case LtlTrue():
                expand(rest, done, pos, neg, nxt, postponed)
            case LtlFalse():
                return
            case Atom(name):
                if name not in neg:
                    expand(rest, done, pos | {name}, neg, nxt, postponed)
            case Not(Atom(name)):
                if name not in pos:
                    expand(rest, done, pos, neg | {name}, nxt, postponed)
            case And(l, r):
                expand([l, r] + rest, done, pos, neg, nxt, postponed)
            case Or(l, r):
                expand([l] + rest, done, pos, neg, nxt, postponed)
                expand([r] + rest, done, pos, neg, nxt, postponed)
            case Until(l, r):
                expand([r] + rest, done, pos, neg, nxt, postponed)
                expand([l] + rest, done, pos, neg, nxt | {f}, postponed | {f})
            case Release(l, r):
                expand([r, l] + rest, done, pos, neg, nxt, postponed)
                expand([r] + rest, done, pos, neg, nxt | {f}, postponed)
            case Always(g):
                expand([g] + rest, done, pos, neg, nxt | {f}, postponed)
            case Eventually(g):
                expand([g] + rest, done, pos, neg, nxt, postponed)
                expand(rest, done, pos, neg, nxt | {f}, postponed | {f})
            case _:
                raise ValueError(f"formula not in negation normal form: {f}")

    expand(sorted(obligations, key=repr), frozenset(), frozenset(), frozenset(), frozenset(), frozenset())
    return list(results)


def to_buchi(formula: Ltl) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the words satisfying `formula`."""
    if not is_nnf(formula):
        formula = to_nnf(formula)
    eventualities = _eventualities(formula)
    k = len(eventualities)

    ids: dict = {}
    transitions: list = []
    start = (frozenset([formula]), 0)
    ids[start] = 0
    queue = deque([start])
    cover_cache: dict = {}
    while queue:
        node = queue.popleft()
        obligations, level = node
        if obligations not in cover_cache:
            cover_cache[obligations] = _covers(obligations)
        for label, nxt, postponed in cover_cache[obligations]:
            j = 0 if level == k else level
            while j < k and eventualities[j] not in postponed:
                j += 1
            target = (nxt, j)
            if target not in ids:
                ids[target] = len(ids)
                queue.append(target)
            transitions.append((ids[node], label, ids[target]))

    states = list(range(len(ids)))
    accepting = {ids[n] for n in ids if n[1] == k}
    names = {v: n for n, v in ids.items()}
    return BuchiAutomaton(states, {0}, transitions, accepting, names)
