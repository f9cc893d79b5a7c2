import itertools
import re
from typing import Optional

from .exceptions import TranslationError
from .globals import Gl
from .gts import (IrType, PRIMITIVES, EnumType, RecordType, RecordField, AliasType, SeqType, EnumValue,
                  RecordRef, VariableDef, VarRef, FieldRef, Const, finite_values)
from .model import ModelAst, DomainDecl, FunctionDecl, IntRange, SeqOf, Literal, EnumElement, FunctionApp, Unary


class DomainTable:
    """AsmetaL domain name -> IR type; seeded with the basic domains."""

    def __init__(self):
        self.entries: dict = {name: PRIMITIVES[ir] for name, ir in Gl.BASIC_DOMAINS.items()}
        # declared enums, records and aliases in declaration order
        self.declared: list = []

    def __contains__(self, name) -> bool:
        return isinstance(name, SeqOf) or name in self.entries

    def __getitem__(self, name) -> IrType:
        if isinstance(name, SeqOf):
            return SeqType(self[name.element])
        try:
            return self.entries[name]
        except KeyError:
            raise TranslationError(f"unmapped domain {name}") from None

    def add(self, name: str, ir_type: IrType):
        self.entries[name] = ir_type
        self.declared.append(ir_type)

    def values(self, name) -> Optional[tuple]:
        """Elements of a finite domain in declaration order."""
        return finite_values(self[name])

    def finite_values(self, name) -> tuple:
        values = self.values(name)
        if values is None:
            raise TranslationError(f"domain {name} is not finite")
        return values


def _constant_value(term, decl: DomainDecl):
    match term:
        case Literal(value):
            return value
        case Unary("-", Literal(value)) if isinstance(value, (int, float)) and not isinstance(value, bool):
            return -value
        case EnumElement(domain, name):
            return EnumValue(domain, name)
    line, column = getattr(term, "pos", None) or (None, None)
    raise TranslationError(f"extension of {decl.name} must list constants", line, column)


def map_domain(decl: DomainDecl, table: DomainTable, model: ModelAst = None) -> IrType:
    """Add the IR type of one declared domain to the table and return it."""
    line, column = decl.pos or (None, None)
    if decl.kind == Gl.ENUM:
        ir_type = EnumType(decl.name, tuple(decl.enum_elements))
    elif decl.kind in (Gl.ABSTRACT, Gl.AGENT_SUBSET):
        instances = tuple(f.name for f in model.constants_of(decl.name)) if model else ()
        ir_type = RecordType(decl.name, instances)
    elif decl.kind == Gl.CONCRETE_SUBSET:
        if decl.parent not in table:
            raise TranslationError(f"unmapped domain {decl.parent}", line, column)
        base = table[decl.parent]
        if decl.extension is None:
            raise TranslationError(f"concrete subset domain {decl.name} has no extension", line, column)
        if isinstance(decl.extension, IntRange):
            members = decl.extension.values()
        else:
            members = tuple(_constant_value(t, decl) for t in decl.extension)
        ir_type = AliasType(decl.name, base, members)
    else:
        raise TranslationError(f"unmapped domain kind {decl.kind} for {decl.name}", line, column)
    table.add(decl.name, ir_type)
    return ir_type


def build_domain_table(model: ModelAst) -> DomainTable:
    table = DomainTable()
    for decl in model.domain_decls:
        map_domain(decl, table, model)
    return table


def value_suffix(value) -> str:
    """Name fragment of a domain element inside an unfolded location name."""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (EnumValue, RecordRef)):
        return value.name
    if isinstance(value, int):
        return str(value) if value >= 0 else f"neg{-value}"
    return re.sub(r"\W", "_", str(value))


def value_expr(value):
    """IR expression denoting a domain element; record instances are their constants."""
    if isinstance(value, RecordRef):
        return VarRef(value.name)
    return Const(value)


def value_term(value):
    """AsmetaL term denoting a domain element, used to substitute bound variables."""
    if isinstance(value, RecordRef):
        return FunctionApp(value.name)
    if isinstance(value, EnumValue):
        return EnumElement(value.enum, value.name)
    if isinstance(value, int) and not isinstance(value, bool) and value < 0:
        return Unary("-", Literal(-value))
    return Literal(value)


def value_text(value) -> str:
    """AsmetaL spelling of a domain element for trace symbols."""
    if isinstance(value, (EnumValue, RecordRef)):
        return value.name
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return f'"{value}"'
    return str(value)


class VariableTable:
    """
    Function location -> IR location. Keys are (function name, argument
    value tuple); slot names are the variable name or `instance.field`.
    """

    def __init__(self):
        self.locations: dict = {}
        self.slot_names: dict = {}
        self.types: dict = {}
        self.kinds: dict = {}
        self.by_function: dict = {}
        self.variables: list = []
        # slot name -> AsmetaL location text
        self.symbols: dict = {}

    def add(self, function: str, args: tuple, lvalue, slot: str, ir_type: IrType, kind: str):
        key = (function, args)
        if key in self.locations or slot in self.types:
            raise TranslationError(f"location {slot} unfolded twice")
        self.locations[key] = lvalue
        self.slot_names[key] = slot
        self.types[slot] = ir_type
        self.kinds[slot] = kind
        self.by_function.setdefault(function, []).append(key)
        args_text = ", ".join(value_text(a) for a in args)
        self.symbols[slot] = f"{function}({args_text})" if args else function

    def lookup(self, function: str, args: tuple):
        try:
            return self.locations[(function, args)]
        except KeyError:
            shown = ", ".join(value_text(a) for a in args)
            raise TranslationError(f"no location {function}({shown})") from None

    def slot(self, function: str, args: tuple) -> str:
        return self.slot_names[(function, args)]

    def slots_of(self, function: str) -> list:
        return [self.slot_names[k] for k in self.by_function.get(function, [])]

    def field_slots(self, function: str, field: str) -> list:
        """Slots of one record field over every instance."""
        return [self.slot_names[k] for k in self.by_function.get(function, [])
                if isinstance(self.locations[k], FieldRef) and self.locations[k].field == field]

    def monitored(self) -> list:
        """(slot, lvalue, type) of every monitored location, unfolding order."""
        out = []
        for key, lvalue in self.locations.items():
            slot = self.slot_names[key]
            if self.kinds[slot] == Gl.MONITORED:
                out.append((slot, lvalue, self.types[slot]))
        return out


def field_name(decl: FunctionDecl, rest: tuple) -> str:
    return "_".join([decl.name] + [value_suffix(v) for v in rest])


def unfold_locations(decl: FunctionDecl, domains: DomainTable, vtab: VariableTable) -> list:
    """Register every location of a controlled or monitored function; returns the slot names."""
    line, column = decl.pos or (None, None)
    codomain = domains[decl.codomain]
    if not decl.arg_domains:
        vtab.add(decl.name, (), VarRef(decl.name), decl.name, codomain, decl.kind)
        vtab.variables.append(VariableDef(decl.name, codomain, decl.kind))
        return [decl.name]
    arg_values = []
    for d in decl.arg_domains:
        values = domains.values(d)
        if values is None:
            raise TranslationError(f"{decl.name}: argument domain {d} is not finite", line, column)
        arg_values.append(values)
    slots = []
    first = domains[decl.arg_domains[0]]
    if isinstance(first, RecordType):
        for rest in itertools.product(*arg_values[1:]):
            fname = field_name(decl, rest)
            first.fields.append(RecordField(fname, codomain, decl.kind))
            for inst in first.values():
                slot = f"{inst.name}.{fname}"
                vtab.add(decl.name, (inst,) + rest, FieldRef(VarRef(inst.name), fname), slot, codomain, decl.kind)
                slots.append(slot)
        return slots
    for args in itertools.product(*arg_values):
        name = field_name(decl, args)
        vtab.add(decl.name, args, VarRef(name), name, codomain, decl.kind)
        vtab.variables.append(VariableDef(name, codomain, decl.kind))
        slots.append(name)
    return slots


def build_variable_table(model: ModelAst, domains: DomainTable) -> VariableTable:
    vtab = VariableTable()
    for decl in model.function_decls:
        if decl.kind in (Gl.CONTROLLED, Gl.MONITORED):
            unfold_locations(decl, domains, vtab)
    return vtab
