import itertools
import random

import pytest

from asmcheck.buchi import to_buchi
from asmcheck.ltl import (Atom, LtlTrue, LtlFalse, Not, And, Or, Implies, Iff, Xor, Always, Eventually, Until,
                          Release, atoms, holds_on_lasso, is_nnf, map_atoms, to_nnf, to_text)

P, Q = Atom("p"), Atom("q")
EMPTY, ONLY_P, ONLY_Q, BOTH = frozenset(), frozenset("p"), frozenset("q"), frozenset("pq")

UNARY = [Not, Always, Eventually]
BINARY = [And, Or, Implies, Iff, Xor, Until, Release]


def random_formula(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([P, Q, P, Q, LtlTrue(), LtlFalse()])
    if rng.random() < 0.4:
        return rng.choice(UNARY)(random_formula(rng, depth - 1))
    return rng.choice(BINARY)(random_formula(rng, depth - 1), random_formula(rng, depth - 1))


def random_lasso(rng: random.Random):
    n = rng.randint(1, 4)
    letters = [rng.choice([EMPTY, ONLY_P, ONLY_Q, BOTH]) for _ in range(n)]
    return letters, rng.randrange(n)


@pytest.mark.parametrize("formula, letters, loop_start, expected", [
    (Always(Implies(P, Eventually(Q))), [ONLY_P], 0, False),
    (Always(Implies(P, Eventually(Q))), [ONLY_P, ONLY_Q], 0, True),
    (Eventually(Always(P)), [EMPTY, ONLY_P], 1, True),
    (Always(Eventually(P)), [ONLY_P, EMPTY], 1, False),
    (Until(P, Q), [ONLY_P, ONLY_P, ONLY_Q], 2, True),
    (Until(P, Q), [ONLY_P], 0, False),
    (Release(P, Q), [ONLY_Q], 0, True),
    (Release(P, Q), [ONLY_Q, EMPTY], 1, False),
])
def test_lasso_semantics(formula, letters, loop_start, expected):
    assert holds_on_lasso(formula, letters, loop_start) is expected


def test_lasso_needs_a_loop_inside():
    with pytest.raises(ValueError):
        holds_on_lasso(P, [ONLY_P], 1)


def test_negation_normal_form():
    rng = random.Random(7)
    for _ in range(200):
        f = random_formula(rng, 4)
        nnf = to_nnf(f)
        assert is_nnf(nnf)
        letters, loop_start = random_lasso(rng)
        assert holds_on_lasso(nnf, letters, loop_start) == holds_on_lasso(f, letters, loop_start)


def formulas_with(operators: int):
    """Every formula over p and q with exactly this many operators."""
    if operators == 0:
        yield from (P, Q)
        return
    for unary in UNARY:
        for operand in formulas_with(operators - 1):
            yield unary(operand)
    for binary in BINARY:
        for k in range(operators):
            for left in formulas_with(k):
                for right in formulas_with(operators - 1 - k):
                    yield binary(left, right)


ALL_LASSOS = [(letters, loop_start)
              for n in range(1, 5)
              for letters in itertools.product([EMPTY, ONLY_P, ONLY_Q, BOTH], repeat=n)
              for loop_start in range(n)]


def test_every_small_formula_on_every_short_lasso():
    formulas = [f for k in range(3) for f in formulas_with(k)]
    assert len(formulas) == 1090 and len(ALL_LASSOS) == 1252
    for f in formulas:
        automaton = to_buchi(f)
        for letters, loop_start in ALL_LASSOS:
            assert automaton.accepts_lasso(letters, loop_start) == holds_on_lasso(f, letters, loop_start), \
                f"{to_text(f)} on {list(letters)} looping at {loop_start}"


def test_automaton_of_negated_response():
    automaton = to_buchi(to_nnf(Not(Always(Implies(P, Eventually(Q))))))
    assert automaton.accepts_lasso([ONLY_P], 0)
    assert not automaton.accepts_lasso([ONLY_P, ONLY_Q], 0)
    assert automaton.accepting
    assert "states:" in automaton.dump()


def test_atoms_and_renaming():
    f = Until(And(P, Q), Not(P))
    assert atoms(f) == ["p", "q"]
    renamed = map_atoms(f, lambda a: a.upper())
    assert renamed == Until(And(Atom("P"), Atom("Q")), Not(Atom("P")))
    assert to_text(renamed) == "((P & Q) U !(P))"
