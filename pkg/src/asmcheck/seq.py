"""Built-in sequences: 0-based indices, half-open subSequence, indexOf is -1 when absent."""
from dataclasses import dataclass

from .exceptions import EvaluationError
from .gts import EnumValue, RecordRef, render_value, values_equal


@dataclass(frozen=True)
class Seq:
    items: tuple = ()

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __str__(self) -> str:
        return "<" + ",".join(render_value(v) for v in self.items) + ">"


def _index(seq: Seq, pos, upper: int, op: str) -> int:
    if isinstance(pos, bool) or not isinstance(pos, int) or not 0 <= pos < upper:
        raise EvaluationError(f"{op}: position {pos} out of bounds for length {len(seq)}")
    return pos


def _nonempty(seq: Seq, op: str):
    if not seq.items:
        raise EvaluationError(f"{op} of an empty sequence")


def _kind(value):
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, EnumValue):
        return value.enum
    if isinstance(value, RecordRef):
        return value.record
    if isinstance(value, Seq):
        return "seq"
    return type(value).__name__


def _homogeneous(items: tuple, op: str) -> tuple:
    kinds = {_kind(v) for v in items}
    if len(kinds) > 1:
        raise EvaluationError(f"{op}: mixed element types " + ", ".join(render_value(v) for v in items))
    return items


def create(*items) -> Seq:
    return Seq(_homogeneous(tuple(items), "create"))

def is_empty(seq: Seq) -> bool:
    return not seq.items

def contains(seq: Seq, elem) -> bool:
    return any(values_equal(v, elem) for v in seq.items)

def count(seq: Seq, elem) -> int:
    return sum(1 for v in seq.items if values_equal(v, elem))

def length(seq: Seq) -> int:
    return len(seq.items)

def index_of(seq: Seq, elem) -> int:
    for i, v in enumerate(seq.items):
        if values_equal(v, elem):
            return i
    return -1

def first(seq: Seq):
    _nonempty(seq, "first")
    return seq.items[0]

def last(seq: Seq):
    _nonempty(seq, "last")
    return seq.items[-1]

def at_index(seq: Seq, pos: int):
    return seq.items[_index(seq, pos, len(seq), "atIndex")]

def tail(seq: Seq) -> Seq:
    _nonempty(seq, "tail")
    return Seq(seq.items[1:])

def union(a: Seq, b: Seq) -> Seq:
    return Seq(_homogeneous(a.items + b.items, "union"))

def sub_sequence(seq: Seq, pos1: int, pos2: int) -> Seq:
    for p in (pos1, pos2):
        if isinstance(p, bool) or not isinstance(p, int):
            raise EvaluationError(f"subSequence: position {p!r} is not an integer")
    if not 0 <= pos1 <= pos2 <= len(seq):
        raise EvaluationError(f"subSequence: range [{pos1},{pos2}) out of bounds for length {len(seq)}")
    return Seq(seq.items[pos1:pos2])

def append(seq: Seq, elem) -> Seq:
    return Seq(_homogeneous(seq.items + (elem,), "append"))

def prepend(elem, seq: Seq) -> Seq:
    return Seq(_homogeneous((elem,) + seq.items, "prepend"))

def insert_at(seq: Seq, pos: int, elem) -> Seq:
    # inserting at len(seq) appends
    p = _index(seq, pos, len(seq) + 1, "insertAt")
    return Seq(_homogeneous(seq.items[:p] + (elem,) + seq.items[p:], "insertAt"))

def replace_at(seq: Seq, pos: int, elem) -> Seq:
    p = _index(seq, pos, len(seq), "replaceAt")
    return Seq(_homogeneous(seq.items[:p] + (elem,) + seq.items[p + 1:], "replaceAt"))

def excluding(seq: Seq, elem) -> Seq:
    p = index_of(seq, elem)
    if p < 0:
        return seq
    return Seq(seq.items[:p] + seq.items[p + 1:])


SEQ_OPERATIONS = {
    "create": create,
    "isEmpty": is_empty,
    "contains": contains,
    "count": count,
    "length": length,
    "indexOf": index_of,
    "first": first,
    "last": last,
    "atIndex": at_index,
    "tail": tail,
    "union": union,
    "subSequence": sub_sequence,
    "append": append,
    "prepend": prepend,
    "insertAt": insert_at,
    "replaceAt": replace_at,
    "excluding": excluding,
}

# arity of each operation; create is variadic
SEQ_ARITY = {
    "create": None, "isEmpty": 1, "contains": 2, "count": 2, "length": 1, "indexOf": 2,
    "first": 1, "last": 1, "atIndex": 2, "tail": 1, "union": 2, "subSequence": 3,
    "append": 2, "prepend": 2, "insertAt": 3, "replaceAt": 3, "excluding": 2,
}


def seq_ops(op: str, args: list):
    """Apply a sequence operation by name; the sequence argument is checked."""
    fn = SEQ_OPERATIONS.get(op)
    if fn is None:
        raise EvaluationError(f"unknown sequence operation {op}")
    arity = SEQ_ARITY[op]
    if arity is not None and len(args) != arity:
        raise EvaluationError(f"{op} expects {arity} arguments, got {len(args)}")
    if op != "create":
        seq_pos = 1 if op == "prepend" else 0
        if not isinstance(args[seq_pos], Seq):
            raise EvaluationError(f"{op}: argument {seq_pos + 1} is not a sequence")
        if op == "union" and not isinstance(args[1], Seq):
            raise EvaluationError("union: argument 2 is not a sequence")
    return fn(*args)
