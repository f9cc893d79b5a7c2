"""
Guarded transition system: the low-level intermediate representation the
translator produces and the checker explores.
"""
from dataclasses import dataclass, field
from typing import Optional, Union

from .globals import Gl
from .ltl import Ltl


# ---------------------------------------------------------------- values

class EnumValue:
    """Interned enum element; identity equality."""
    __slots__ = ("enum", "name")
    _interned: dict = {}

    def __new__(cls, enum: str, name: str):
        key = (enum, name)
        obj = cls._interned.get(key)
        if obj is None:
            obj = super().__new__(cls)
            obj.enum = enum
            obj.name = name
            cls._interned[key] = obj
        return obj

    def __reduce__(self):
        return (EnumValue, (self.enum, self.name))

    def __repr__(self) -> str:
        return f"{self.enum}.{self.name}"


class RecordRef:
    """Interned reference to a statically allocated record instance."""
    __slots__ = ("record", "name")
    _interned: dict = {}

    def __new__(cls, record: str, name: str):
        key = (record, name)
        obj = cls._interned.get(key)
        if obj is None:
            obj = super().__new__(cls)
            obj.record = record
            obj.name = name
            cls._interned[key] = obj
        return obj

    def __reduce__(self):
        return (RecordRef, (self.record, self.name))

    def __repr__(self) -> str:
        return self.name


Value = Union[bool, int, float, str, None, EnumValue, RecordRef, "Seq"]


def values_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    return a == b


def render_value(value) -> str:
    """Trace and report rendering of a runtime value."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, EnumValue):
        return value.name
    if isinstance(value, RecordRef):
        return value.name
    if isinstance(value, str):
        return f'"{value}"'
    return str(value)


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class PrimitiveType:
    name: str

    def __str__(self) -> str:
        return self.name

@dataclass(frozen=True)
class EnumType:
    name: str
    elements: tuple

    def values(self) -> tuple:
        return tuple(EnumValue(self.name, e) for e in self.elements)

    def __str__(self) -> str:
        return self.name

@dataclass(frozen=True)
class RecordField:
    name: str
    type: "IrType"
    kind: str = Gl.CONTROLLED

@dataclass(frozen=True)
class RecordType:
    name: str
    # declared constants of the record, declaration order
    instances: tuple = ()
    # filled while functions are unfolded; records may refer to each other
    fields: list = field(default_factory=list, compare=False)

    def field(self, name: str) -> Optional[RecordField]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def values(self) -> tuple:
        return tuple(RecordRef(self.name, c) for c in self.instances)

    def __str__(self) -> str:
        return self.name

@dataclass(frozen=True)
class AliasType:
    name: str
    base: "IrType"
    # finite member set, None when the alias is unrestricted
    members: Optional[tuple] = None

    def values(self) -> Optional[tuple]:
        return self.members

    def __str__(self) -> str:
        return self.name

@dataclass(frozen=True)
class SeqType:
    element: "IrType"

    def __str__(self) -> str:
        return f"Seq<{self.element}>"


IrType = Union[PrimitiveType, EnumType, RecordType, AliasType, SeqType]

BOOLEAN = PrimitiveType(Gl.IR_BOOLEAN)
INT = PrimitiveType(Gl.IR_INT)
STRING = PrimitiveType(Gl.IR_STRING)
FLOAT = PrimitiveType(Gl.IR_FLOAT)
NULL = PrimitiveType(Gl.IR_NULL)
PRIMITIVES = {t.name: t for t in (BOOLEAN, INT, STRING, FLOAT, NULL)}


def finite_values(ir_type: IrType) -> Optional[tuple]:
    """Values of a finite type in declaration order; booleans are (true, false)."""
    if ir_type == BOOLEAN:
        return (True, False)
    if ir_type == NULL:
        return (None,)
    if isinstance(ir_type, (EnumType, RecordType)):
        return ir_type.values()
    if isinstance(ir_type, AliasType):
        return ir_type.members
    return None


def default_value(ir_type: IrType):
    """First value of the type, used for locations nobody initialized."""
    values = finite_values(ir_type)
    if values:
        return values[0]
    if isinstance(ir_type, AliasType):
        return default_value(ir_type.base)
    if ir_type == INT:
        return 0
    if ir_type == FLOAT:
        return 0.0
    if ir_type == STRING:
        return ""
    if isinstance(ir_type, SeqType):
        from .seq import Seq
        return Seq()
    return None


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True, eq=False)
class Const:
    value: object

    # 1, 1.0 and true are different constants
    def __eq__(self, other) -> bool:
        return (isinstance(other, Const) and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self) -> int:
        return hash((type(self.value).__name__, self.value))

@dataclass(frozen=True)
class VarRef:
    name: str

@dataclass(frozen=True)
class FieldRef:
    target: "Expr"
    field: str

@dataclass(frozen=True)
class Param:
    name: str

@dataclass(frozen=True)
class Unary:
    op: str            # "!" | "-"
    operand: "Expr"

@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    otherwise: "Expr"

@dataclass(frozen=True)
class Call:
    function: str
    args: tuple = ()

@dataclass(frozen=True)
class SeqOp:
    op: str
    args: tuple = ()


Expr = Union[Const, VarRef, FieldRef, Param, Unary, Binary, Ternary, Call, SeqOp]
TRUE = Const(True)
FALSE = Const(False)
LValue = Union[VarRef, FieldRef]


# ---------------------------------------------------------------- actions

@dataclass(frozen=True)
class Assign:
    target: LValue
    expr: Expr

@dataclass(frozen=True)
class Assert:
    expr: Expr
    # text shown when the assertion fails
    message: str = field(default="", compare=False)

@dataclass(frozen=True)
class Allocate:
    """`v := new R;` binds a record constant to its instance."""
    target: VarRef
    record: str

@dataclass(frozen=True)
class StartThread:
    thread: str


Action = Union[Assign, Assert, Allocate, StartThread]


@dataclass(frozen=True)
class GuardedCmd:
    guard: Optional[Expr]
    actions: tuple
    visible: bool
    target: str
    comment: str = field(default="", compare=False)

@dataclass
class Location:
    label: str
    commands: list = field(default_factory=list)
    comment: str = ""

@dataclass
class ThreadDef:
    name: str
    locations: list = field(default_factory=list)
    active_at_start: bool = False
    kind: str = Gl.MONITORED
    # location executed once to build the initial state
    init_location: Optional[str] = None

    def location(self, label: str) -> Location:
        for loc in self.locations:
            if loc.label == label:
                return loc
        raise KeyError(label)

@dataclass(frozen=True)
class PureFunction:
    name: str
    params: tuple          # of (name, IrType)
    return_type: IrType
    body: Expr

@dataclass
class VariableDef:
    name: str
    type: IrType
    kind: str
    initial: Optional[Expr] = None

@dataclass(frozen=True)
class PropertyDef:
    name: str
    formula: Ltl           # atoms are proposition ids
    propositions: tuple    # of (id, Expr)
    text: str = ""

@dataclass
class GuardedTransitionSystem:
    name: str
    types: list = field(default_factory=list)            # enums, records and aliases in declaration order
    variables: list = field(default_factory=list)
    pure_functions: list = field(default_factory=list)
    threads: list = field(default_factory=list)          # main thread last in text, first here
    properties: list = field(default_factory=list)
    # IR slot name -> AsmetaL location text, for traces
    symbols: dict = field(default_factory=dict)

    @property
    def main(self) -> ThreadDef:
        return self.threads[0]

    @property
    def enums(self) -> list:
        return [t for t in self.types if isinstance(t, EnumType)]

    @property
    def records(self) -> list:
        return [t for t in self.types if isinstance(t, RecordType)]

    @property
    def record_constants(self) -> list:
        return [v for v in self.variables if v.kind == Gl.STATIC_CONST]

    def type_named(self, name: str) -> Optional[IrType]:
        for t in self.types:
            if t.name == name:
                return t
        return PRIMITIVES.get(name)

    def variable(self, name: str) -> Optional[VariableDef]:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def function(self, name: str) -> Optional[PureFunction]:
        for f in self.pure_functions:
            if f.name == name:
                return f
        return None

    def thread(self, name: str) -> Optional[ThreadDef]:
        for t in self.threads:
            if t.name == name:
                return t
        return None

    def property(self, name: str) -> Optional[PropertyDef]:
        for p in self.properties:
            if p.name == name:
                return p
        return None


def assertion_template(ir_type: IrType) -> Optional[Expr]:
    """Membership test over Param("v") for a finite alias, None otherwise."""
    if not isinstance(ir_type, AliasType) or not ir_type.members:
        return None
    v = Param("v")
    members = ir_type.members
    if all(isinstance(m, int) and not isinstance(m, bool) for m in members):
        low, high = min(members), max(members)
        if list(members) == list(range(low, high + 1)):
            return Binary("&&", Binary(">=", v, Const(low)), Binary("<=", v, Const(high)))
    test = Binary("==", v, Const(members[0]))
    for m in members[1:]:
        test = Binary("||", test, Binary("==", v, Const(m)))
    return test


def substitute_params(expr: Expr, bindings: dict) -> Expr:
    match expr:
        case Param(name) if name in bindings:
            return bindings[name]
        case Const() | VarRef() | Param():
            return expr
        case FieldRef(target, f):
            return FieldRef(substitute_params(target, bindings), f)
        case Unary(op, a):
            return Unary(op, substitute_params(a, bindings))
        case Binary(op, a, b):
            return Binary(op, substitute_params(a, bindings), substitute_params(b, bindings))
        case Ternary(c, a, b):
            return Ternary(substitute_params(c, bindings), substitute_params(a, bindings),
                           substitute_params(b, bindings))
        case Call(fn, args):
            return Call(fn, tuple(substitute_params(a, bindings) for a in args))
        case SeqOp(op, args):
            return SeqOp(op, tuple(substitute_params(a, bindings) for a in args))
    raise ValueError(f"unknown expression {expr!r}")


def check_system(system: GuardedTransitionSystem):
    """Structural well-formedness; raises ValueError on the first problem."""
    mains = [t for t in system.threads if t.kind == Gl.MAIN_KIND]
    if len(mains) != 1 or system.threads[0] is not mains[0]:
        raise ValueError("system needs exactly one main thread, listed first")
    for thread in system.threads:
        labels = [loc.label for loc in thread.locations]
        if len(labels) != len(set(labels)):
            raise ValueError(f"thread {thread.name} has duplicate location labels")
        if not labels:
            raise ValueError(f"thread {thread.name} has no locations")
        for loc in thread.locations:
            for cmd in loc.commands:
                if cmd.target not in labels:
                    raise ValueError(f"{thread.name}.{loc.label}: goto to unknown location {cmd.target}")
                for action in cmd.actions:
                    if isinstance(action, StartThread) and system.thread(action.thread) is None:
                        raise ValueError(f"{thread.name}.{loc.label}: start of unknown thread {action.thread}")
