import random

import pytest

from asmcheck import seq
from asmcheck.exceptions import EvaluationError
from asmcheck.seq import Seq, seq_ops


def test_random_operations_against_lists():
    rng = random.Random(20240611)
    current = Seq()
    model: list = []
    for _ in range(1000):
        op = rng.choice(["append", "prepend", "insertAt", "replaceAt", "excluding", "tail", "union",
                         "subSequence", "query"])
        elem = rng.randint(0, 5)
        n = len(model)
        if op == "append":
            current = seq_ops("append", [current, elem])
            model.append(elem)
        elif op == "prepend":
            current = seq_ops("prepend", [elem, current])
            model.insert(0, elem)
        elif op == "insertAt":
            pos = rng.randint(0, n)
            current = seq_ops("insertAt", [current, pos, elem])
            model.insert(pos, elem)
        elif op == "replaceAt" and n:
            pos = rng.randrange(n)
            current = seq_ops("replaceAt", [current, pos, elem])
            model[pos] = elem
        elif op == "excluding":
            current = seq_ops("excluding", [current, elem])
            if elem in model:
                model.remove(elem)
        elif op == "tail" and n:
            current = seq_ops("tail", [current])
            model = model[1:]
        elif op == "union":
            extra = [rng.randint(0, 5) for _ in range(rng.randint(0, 2))]
            current = seq_ops("union", [current, seq.create(*extra)])
            model += extra
        elif op == "subSequence" and n:
            i = rng.randint(0, n)
            j = rng.randint(i, n)
            assert list(seq_ops("subSequence", [current, i, j])) == model[i:j]
        if len(model) > 20:
            current, model = seq.tail(current), model[1:]

        assert list(current) == model
        assert seq_ops("length", [current]) == len(model)
        assert seq_ops("isEmpty", [current]) == (not model)
        assert seq_ops("contains", [current, elem]) == (elem in model)
        assert seq_ops("count", [current, elem]) == model.count(elem)
        assert seq_ops("indexOf", [current, elem]) == (model.index(elem) if elem in model else -1)
        if model:
            assert seq_ops("first", [current]) == model[0]
            assert seq_ops("last", [current]) == model[-1]
            pos = rng.randrange(len(model))
            assert seq_ops("atIndex", [current, pos]) == model[pos]


def test_sequences_are_values():
    a = seq.create(1, 2)
    b = seq.append(a, 3)
    assert a == Seq((1, 2)) and b == Seq((1, 2, 3))
    assert hash(seq.create(1, 2)) == hash(a)


@pytest.mark.parametrize("op, args, message", [
    ("atIndex", [Seq((1,)), 1], "out of bounds"),
    ("atIndex", [Seq((1,)), -1], "out of bounds"),
    ("insertAt", [Seq((1,)), 2, 0], "out of bounds"),
    ("replaceAt", [Seq(), 0, 1], "out of bounds"),
    ("subSequence", [Seq((1, 2)), 2, 1], "out of bounds"),
    ("tail", [Seq()], "empty sequence"),
    ("last", [Seq()], "empty sequence"),
    ("length", [3], "not a sequence"),
    ("union", [Seq(), 3], "not a sequence"),
    ("append", [Seq()], "expects 2 arguments"),
    ("reverse", [Seq()], "unknown sequence operation"),
])
def test_errors(op, args, message):
    with pytest.raises(EvaluationError, match=message):
        seq_ops(op, args)


def test_random_sequences_match_lists():
    rng = random.Random(16)
    for _ in range(1000):
        items = [rng.randint(0, 4) for _ in range(rng.randint(0, 16))]
        s = seq.create(*items)
        elem = rng.randint(0, 4)
        assert seq.length(s) == len(items)
        assert seq.contains(s, elem) == (elem in items)
        assert seq.count(s, elem) == items.count(elem)
        assert seq.index_of(s, elem) == (items.index(elem) if elem in items else -1)
        dropped = list(items)
        if elem in dropped:
            dropped.remove(elem)
        assert list(seq.excluding(s, elem)) == dropped
        i = rng.randint(0, len(items))
        j = rng.randint(i, len(items))
        assert list(seq.sub_sequence(s, i, j)) == items[i:j]
        assert list(seq.insert_at(s, i, elem)) == items[:i] + [elem] + items[i:]
        if items:
            k = rng.randrange(len(items))
            assert seq.at_index(s, k) == items[k]
            assert list(seq.replace_at(s, k, elem)) == items[:k] + [elem] + items[k + 1:]
            assert list(seq.tail(s)) == items[1:]
            assert (seq.first(s), seq.last(s)) == (items[0], items[-1])


def test_lookups_tell_booleans_from_integers():
    ints = seq.create(1, 0, 1)
    assert not seq.contains(ints, True)
    assert seq.count(ints, True) == 0 and seq.count(ints, 1) == 2
    assert seq.index_of(ints, False) == -1 and seq.index_of(ints, 0) == 1
    assert seq.excluding(ints, True) == ints
    assert seq.contains(seq.create(True), True)


@pytest.mark.parametrize("op, args", [
    ("create", [1, True]),
    ("create", [1, "a"]),
    ("append", [Seq((1, 2)), False]),
    ("prepend", [True, Seq((1,))]),
    ("insertAt", [Seq((1,)), 0, "x"]),
    ("replaceAt", [Seq((1, 2)), 1, True]),
    ("union", [Seq((1,)), Seq((True,))]),
])
def test_mixed_element_types_are_rejected(op, args):
    with pytest.raises(EvaluationError, match="mixed element types"):
        seq_ops(op, args)


def test_integers_and_reals_share_a_sequence():
    assert list(seq.create(1, 2.5)) == [1, 2.5]
    assert seq.length(seq.append(seq.create(), True)) == 1
