from dataclasses import dataclass
from typing import Callable, Hashable, Sequence


class Ltl:
    pass


@dataclass(frozen=True)
class Atom(Ltl):
    name: Hashable


@dataclass(frozen=True)
class LtlTrue(Ltl):
    pass


@dataclass(frozen=True)
class LtlFalse(Ltl):
    pass


@dataclass(frozen=True)
class Not(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Or(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Implies(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Iff(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Xor(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Always(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Eventually(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Until(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Release(Ltl):
    left: Ltl
    right: Ltl


LtlFormula = Ltl
TRUE = LtlTrue()
FALSE = LtlFalse()


def to_text(formula: Ltl, atom: Callable[[Hashable], str] = str) -> str:
    match formula:
        case Atom(name):
            return atom(name)
        case LtlTrue():
            return "true"
        case LtlFalse():
            return "false"
        case Not(f):
            return f"!({to_text(f, atom)})"
        case And(l, r):
            return f"({to_text(l, atom)} & {to_text(r, atom)})"
        case Or(l, r):
            return f"({to_text(l, atom)} | {to_text(r, atom)})"
        case Implies(l, r):
            return f"({to_text(l, atom)} -> {to_text(r, atom)})"
        case Iff(l, r):
            return f"({to_text(l, atom)} <-> {to_text(r, atom)})"
        case Xor(l, r):
            return f"({to_text(l, atom)} xor {to_text(r, atom)})"
        case Always(f):
            return f"G ({to_text(f, atom)})"
        case Eventually(f):
            return f"F ({to_text(f, atom)})"
        case Until(l, r):
            return f"({to_text(l, atom)} U {to_text(r, atom)})"
        case Release(l, r):
            return f"({to_text(l, atom)} R {to_text(r, atom)})"
        case _:
            raise ValueError(f"Unsupported LTL construct: {formula}")


def atoms(formula: Ltl) -> list:
    """Atom names in first-occurrence order."""
    found: list = []

    def walk(f: Ltl):
        match f:
            case Atom(name):
                if name not in found:
                    found.append(name)
            case Not(g) | Always(g) | Eventually(g):
                walk(g)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) | Xor(l, r) | Until(l, r) | Release(l, r):
                walk(l)
                walk(r)
    walk(formula)
    return found


def map_atoms(formula: Ltl, fn: Callable[[Hashable], Hashable]) -> Ltl:
    match formula:
        case Atom(name):
            return Atom(fn(name))
        case LtlTrue() | LtlFalse():
            return formula
        case Not(f):
            return Not(map_atoms(f, fn))
        case Always(f):
            return Always(map_atoms(f, fn))
        case Eventually(f):
            return Eventually(map_atoms(f, fn))
        case _:
            return type(formula)(map_atoms(formula.left, fn), map_atoms(formula.right, fn))


def to_nnf(formula: Ltl) -> Ltl:
    """Push negations down to atoms; Implies, Iff and Xor are expanded."""
    return _nnf(formula, False)


def _nnf(f: Ltl, negate: bool) -> Ltl:
    match f:
        case Atom():
            return Not(f) if negate else f
        case LtlTrue():
            return FALSE if negate else TRUE
        case LtlFalse():
            return TRUE if negate else FALSE
        case Not(g):
            return _nnf(g, not negate)
        case And(l, r):
            if negate:
                return Or(_nnf(l, True), _nnf(r, True))
            return And(_nnf(l, False), _nnf(r, False))
        case Or(l, r):
            if negate:
                return And(_nnf(l, True), _nnf(r, True))
            return Or(_nnf(l, False), _nnf(r, False))
        case Implies(l, r):
            return _nnf(Or(Not(l), r), negate)
        case Iff(l, r):
            return _nnf(Or(And(l, r), And(Not(l), Not(r))), negate)
        case Xor(l, r):
            return _nnf(Or(And(l, Not(r)), And(Not(l), r)), negate)
        case Always(g):
            return Eventually(_nnf(g, True)) if negate else Always(_nnf(g, False))
        case Eventually(g):
            return Always(_nnf(g, True)) if negate else Eventually(_nnf(g, False))
        case Until(l, r):
            if negate:
                return Release(_nnf(l, True), _nnf(r, True))
            return Until(_nnf(l, False), _nnf(r, False))
        case Release(l, r):
            if negate:
                return Until(_nnf(l, True), _nnf(r, True))
            return Release(_nnf(l, False), _nnf(r, False))
        case _:
            raise ValueError(f"Unsupported LTL construct: {f}")


def is_nnf(formula: Ltl) -> bool:
    match formula:
        case Not(g):
            return isinstance(g, Atom)
        case Implies() | Iff() | Xor():
            return False
        case Always(g) | Eventually(g):
            return is_nnf(g)
        case And(l, r) | Or(l, r) | Until(l, r) | Release(l, r):
            return is_nnf(l) and is_nnf(r)
        case _:
            return True


def holds_on_lasso(formula: Ltl, letters: Sequence[frozenset], loop_start: int) -> bool:
    """
    Direct semantics on the infinite word letters[0..loop_start-1] (letters[loop_start..])^w,
    each letter being the set of atoms true at that position.
    """
    n = len(letters)
    if n == 0 or not 0 <= loop_start < n:
        raise ValueError("lasso needs at least one position and a loop start inside it")
    succ = [i + 1 for i in range(n - 1)] + [loop_start]

    def sat(f: Ltl) -> list[bool]:
        match f:
            case Atom(name):
                return [name in letters[i] for i in range(n)]
            case LtlTrue():
                return [True] * n
            case LtlFalse():
                return [False] * n
            case Not(g):
                return [not v for v in sat(g)]
            case And(l, r):
                return [a and b for a, b in zip(sat(l), sat(r))]
            case Or(l, r):
                return [a or b for a, b in zip(sat(l), sat(r))]
            case Implies(l, r):
                return [(not a) or b for a, b in zip(sat(l), sat(r))]
            case Iff(l, r):
                return [a == b for a, b in zip(sat(l), sat(r))]
            case Xor(l, r):
                return [a != b for a, b in zip(sat(l), sat(r))]
            case Always(g):
                return release([False] * n, sat(g))
            case Eventually(g):
                return until([True] * n, sat(g))
            case Until(l, r):
                return until(sat(l), sat(r))
            case Release(l, r):
                return release(sat(l), sat(r))
            case _:
                raise ValueError(f"Unsupported LTL construct: {f}")

    def until(a: list[bool], b: list[bool]) -> list[bool]:
        # least fixpoint
        vals = [False] * n
        for _ in range(n + 1):
            vals = [b[i] or (a[i] and vals[succ[i]]) for i in range(n)]
        return vals

    def release(a: list[bool], b: list[bool]) -> list[bool]:
        # greatest fixpoint
        vals = [True] * n
        for _ in range(n + 1):
            vals = [b[i] and (a[i] or vals[succ[i]]) for i in range(n)]
        return vals

    return sat(formula)[0]
