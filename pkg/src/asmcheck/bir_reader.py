"""Reader for the textual IR written by emit_bir_text, and hand-written systems in the same style."""
from typing import Optional

from . import ltl
from .exceptions import BirSyntaxError
from .globals import Gl
from .gts import (GuardedTransitionSystem, PRIMITIVES, EnumType, RecordType, RecordField, AliasType, SeqType,
                  EnumValue, Const, VarRef, FieldRef, Param, Unary, Binary, Ternary, Call, SeqOp, Assign,
                  Assert, Allocate, StartThread, GuardedCmd, Location, ThreadDef, PureFunction, VariableDef,
                  PropertyDef, check_system)
from .lexer import Lexer, Token, BIR_KEYWORDS, BIR_SYMBOLS, KEYWORD, IDENT, INT, REAL, STRING, SYMBOL, COMMENT, EOF


_bir_lexer = Lexer(BIR_KEYWORDS, BIR_SYMBOLS, keep_comments=True, error_class=BirSyntaxError)

KIND_COMMENTS = {"controlled": Gl.CONTROLLED, "monitored": Gl.MONITORED, "static": Gl.STATIC_CONST}
LTL_UNARY = {"always": ltl.Always, "eventually": ltl.Eventually, "negation": ltl.Not}
LTL_BINARY = {"until": ltl.Until, "release": ltl.Release, "implication": ltl.Implies, "equivalence": ltl.Iff}
LTL_NARY = {"conjunction": ltl.And, "disjunction": ltl.Or}
# binary operator levels, loosest first
LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%"))


def tokenize_bir(text: str, filename: str = None) -> list:
    return list(_bir_lexer.tokens(text, filename))


class BirReader:

    def __init__(self, tokens: list, filename: Optional[str] = None):
        self.filename = filename
        self.tokens: list = []
        self.leading: list = []
        self.trailing: list = []
        pending = []
        for tok in tokens:
            if tok.kind == COMMENT:
                if self.tokens and self.tokens[-1].line == tok.line and not self.trailing[-1]:
                    self.trailing[-1] = tok.value
                else:
                    pending.append(tok.value)
                continue
            self.tokens.append(tok)
            self.leading.append(pending)
            self.trailing.append("")
            pending = []
        self.i = 0
        self.enums = {self.tokens[k + 1].value for k, t in enumerate(self.tokens[:-1])
                      if t.kind == KEYWORD and t.value == "enum"}
        self.params: dict = {}
        self.type_decls: list = []        # (kind, name, payload) in declaration order
        self.variables: list = []         # (name, type ref, kind, initial)
        self.functions: list = []         # (name, params, return ref, body)
        self.properties: list = []
        self.threads: list = []

    # ------------------------------------------------------------ token helpers

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != EOF:
            self.i += 1
        return tok

    def at(self, value, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in (KEYWORD, SYMBOL, IDENT) and tok.value == value

    def accept(self, value) -> Optional[Token]:
        return self.advance() if self.at(value) else None

    def expect(self, value) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}, found {self.describe(self.peek())}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != IDENT:
            self.error(f"expected {what}, found {self.describe(tok)}")
        return self.advance().value

    @staticmethod
    def describe(tok: Token) -> str:
        return "end of input" if tok.kind == EOF else f"{tok.kind} {tok.value!r}"

    def error(self, message: str, tok: Token = None):
        tok = tok or self.peek()
        raise BirSyntaxError(message, tok.line, tok.column, self.filename)

    def trailing_of_previous(self) -> str:
        return self.trailing[self.i - 1] if self.i else ""

    # ------------------------------------------------------------ system

    def read_system(self) -> GuardedTransitionSystem:
        self.expect("system")
        name = self.expect_ident("system name")
        self.expect("{")
        while not self.accept("}"):
            if self.peek().kind == EOF:
                self.error("unterminated system")
            self.item()
        if self.peek().kind != EOF:
            self.error(f"unexpected {self.describe(self.peek())} after system")
        return self.build(name)

    def item(self):
        tok = self.peek()
        if self.at("fun"):
            self.function()
        elif self.at("typealias"):
            self.advance()
            name = self.expect_ident("type name")
            base = self.type_ref()
            self.expect(";")
            self.type_decls.append(("alias", name, (base, self.members(self.trailing_of_previous()))))
        elif self.at("enum"):
            self.advance()
            name = self.expect_ident("enum name")
            self.expect("{")
            elements = [self.expect_ident("enum element")]
            while self.accept(","):
                elements.append(self.expect_ident("enum element"))
            self.expect("}")
            self.type_decls.append(("enum", name, tuple(elements)))
        elif self.at("record"):
            self.record()
        elif self.at("main") or self.at("active") or self.at("thread"):
            self.thread()
        elif tok.kind == IDENT:
            type_ref = self.type_ref()
            name = self.expect_ident("variable name")
            initial = self.expr() if self.accept(":=") else None
            self.expect(";")
            kind = KIND_COMMENTS.get(self.trailing_of_previous().strip(), Gl.CONTROLLED)
            self.variables.append((name, type_ref, kind, initial))
        else:
            self.error(f"unexpected {self.describe(tok)}")

    def type_ref(self):
        if self.at("Seq") and self.at(".", 1):
            self.advance()
            self.advance()
            if self.expect_ident("type") != "type":
                self.error("expected Seq.type<...>")
            self.expect("<")
            inner = self.type_ref()
            self.expect(">")
            return ("seq", inner)
        return self.expect_ident("type name")

    def members(self, comment: str) -> Optional[tuple]:
        if not comment.startswith("members"):
            return None
        sub = BirReader(tokenize_bir(comment[len("members"):], self.filename), self.filename)
        sub.enums = self.enums
        values = []
        while sub.peek().kind != EOF:
            e = sub.expr()
            if not isinstance(e, Const):
                sub.error("typealias members must be constants")
            values.append(e.value)
            sub.accept(",")
        return tuple(values)

    def record(self):
        self.advance()
        name = self.expect_ident("record name")
        self.expect("{")
        fields = []
        while not self.accept("}"):
            type_ref = self.type_ref()
            fname = self.expect_ident("field name")
            self.expect(";")
            kind = KIND_COMMENTS.get(self.trailing_of_previous().strip(), Gl.CONTROLLED)
            fields.append((fname, type_ref, kind))
        self.type_decls.append(("record", name, fields))

    # ------------------------------------------------------------ functions and properties

    def function(self):
        text = " ".join(self.leading[self.i])
        self.expect("fun")
        name = self.expect_ident("function name")
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                type_ref = self.type_ref()
                params.append((self.expect_ident("parameter name"), type_ref))
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("returns")
        returns = self.type_ref()
        self.expect("=")
        if self.at("LTL") and self.at("temporalProperty", 2):
            if params:
                self.error(f"property {name} takes no parameters")
            formula, props = self.temporal_property()
            self.properties.append(PropertyDef(name, formula, tuple(props), text))
        else:
            self.params = {p: Param(p) for p, _ in params}
            try:
                body = self.expr()
            finally:
                self.params = {}
            self.functions.append((name, params, returns, body))
        self.expect(";")

    def qualified(self, owner: str, member: str = None) -> str:
        self.expect(owner)
        self.expect(".")
        got = self.expect_ident(f"{owner} member")
        if member is not None and got != member:
            self.error(f"expected {owner}.{member}")
        return got

    def temporal_property(self) -> tuple:
        self.qualified("LTL", "temporalProperty")
        self.expect("(")
        self.qualified("Property", "createObservableDictionary")
        self.expect("(")
        props = []
        while True:
            self.qualified("Property", "createObservableKey")
            self.expect("(")
            tok = self.advance()
            if tok.kind != STRING:
                self.error("expected proposition name", tok)
            self.expect(",")
            props.append((tok.value, self.expr()))
            self.expect(")")
            if not self.accept(","):
                break
        self.expect(")")
        self.expect(",")
        formula = self.ltl_formula()
        self.expect(")")
        return formula, props

    def ltl_formula(self):
        if self.accept("true"):
            return ltl.LtlTrue()
        if self.accept("false"):
            return ltl.LtlFalse()
        tok = self.peek()
        op = self.qualified("LTL")
        self.expect("(")
        if op == "prop":
            name = self.advance()
            if name.kind != STRING:
                self.error("expected proposition name", name)
            result = ltl.Atom(name.value)
        else:
            args = [self.ltl_formula()]
            while self.accept(","):
                args.append(self.ltl_formula())
            if op in LTL_UNARY and len(args) == 1:
                result = LTL_UNARY[op](args[0])
            elif op in LTL_BINARY and len(args) == 2:
                result = LTL_BINARY[op](args[0], args[1])
            elif op in LTL_NARY and len(args) >= 2:
                result = args[0]
                for a in args[1:]:
                    result = LTL_NARY[op](result, a)
            else:
                self.error(f"LTL.{op} with {len(args)} operands", tok)
        self.expect(")")
        return result

    # ------------------------------------------------------------ threads

    def thread(self):
        main = bool(self.accept("main"))
        active = bool(self.accept("active")) or main
        self.expect("thread")
        name = self.expect_ident("thread name")
        self.expect("(")
        self.expect(")")
        self.expect("{")
        locations = []
        init_location = None
        while not self.accept("}"):
            self.expect("loc")
            label = self.expect_ident("location label")
            self.expect(":")
            if self.trailing_of_previous().strip() == "initialization":
                init_location = label
            loc = Location(label, [])
            first = True
            while self.at("when") or self.at("do"):
                notes = self.leading[self.i]
                if first:
                    loc.comment = next((n for n in notes if n.startswith("changed=")), "")
                    first = False
                comment = next((n for n in reversed(notes) if not n.startswith("changed=")), "")
                loc.commands.append(self.command(comment))
            locations.append(loc)
        if not locations:
            self.error(f"thread {name} has no locations")
        self.threads.append((name, main, active, locations, init_location))

    def command(self, comment: str) -> GuardedCmd:
        guard = self.expr() if self.accept("when") else None
        self.expect("do")
        visible = not self.accept("invisible")
        self.expect("{")
        actions = []
        while not self.accept("}"):
            actions.append(self.action())
        self.expect("goto")
        target = self.expect_ident("location label")
        self.expect(";")
        return GuardedCmd(guard, tuple(actions), visible, target, comment)

    def action(self):
        if self.accept("assert"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            self.expect(";")
            return Assert(e)
        if self.accept("start"):
            thread = self.expect_ident("thread name")
            self.expect("(")
            self.expect(")")
            self.expect(";")
            return StartThread(thread)
        tok = self.peek()
        target = self.postfix()
        if not isinstance(target, (VarRef, FieldRef)):
            self.error("left side of := is not a variable or field", tok)
        self.expect(":=")
        if self.accept("new"):
            record = self.expect_ident("record name")
            self.expect(";")
            return Allocate(target, record)
        e = self.expr()
        self.expect(";")
        return Assign(target, e)

    # ------------------------------------------------------------ expressions

    def expr(self):
        cond = self.binary(0)
        if self.accept("?"):
            then = self.expr()
            self.expect(":")
            return Ternary(cond, then, self.expr())
        return cond

    def binary(self, level: int):
        if level == len(LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        ops = LEVELS[level]
        while self.peek().kind == SYMBOL and self.peek().value in ops:
            op = self.advance().value
            left = Binary(op, left, self.binary(level + 1))
            if ops[0] == "<":
                break
        return left

    def unary(self):
        if self.accept("!"):
            return Unary("!", self.unary())
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, Const) and type(operand.value) in (int, float):
                return Const(-operand.value)
            return Unary("-", operand)
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.at(".") and self.peek(1).kind == IDENT:
            self.advance()
            e = FieldRef(e, self.advance().value)
        return e

    def primary(self):
        tok = self.advance()
        if tok.kind in (INT, REAL, STRING):
            return Const(tok.value)
        if tok.kind == KEYWORD and tok.value in ("true", "false", "null"):
            return Const({"true": True, "false": False, "null": None}[tok.value])
        if tok.kind == SYMBOL and tok.value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind != IDENT:
            self.error(f"unexpected {self.describe(tok)} in expression", tok)
        name = tok.value
        if name == "Seq" and self.at("."):
            self.advance()
            op = self.expect_ident("sequence operation")
            return SeqOp(op, self.arguments())
        if name in self.enums and self.at("."):
            self.advance()
            return Const(EnumValue(name, self.expect_ident("enum element")))
        if self.at("("):
            return Call(name, self.arguments())
        if name in self.params:
            return self.params[name]
        return VarRef(name)

    def arguments(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        return tuple(args)

    # ------------------------------------------------------------ assembly

    def build(self, name: str) -> GuardedTransitionSystem:
        table = dict(PRIMITIVES)
        records = {}
        types = []

        def resolve(ref):
            if isinstance(ref, tuple):
                return SeqType(resolve(ref[1]))
            try:
                return table[ref]
            except KeyError:
                raise BirSyntaxError(f"unknown type {ref}", filename=self.filename) from None

        for kind, tname, payload in self.type_decls:
            if kind == "enum":
                table[tname] = EnumType(tname, payload)
            elif kind == "record":
                instances = tuple(v for v, ref, k, _ in self.variables if ref == tname and k == Gl.STATIC_CONST)
                table[tname] = records[tname] = RecordType(tname, instances)
            types.append(tname)
        for kind, tname, payload in self.type_decls:
            if kind == "alias":
                base, members = payload
                table[tname] = AliasType(tname, resolve(base), members)
        for kind, tname, payload in self.type_decls:
            if kind == "record":
                records[tname].fields.extend(RecordField(f, resolve(ref), k) for f, ref, k in payload)

        variables = [VariableDef(v, resolve(ref), k, init) for v, ref, k, init in self.variables]
        functions = [PureFunction(f, tuple((p, resolve(ref)) for p, ref in params), resolve(ret), body)
                     for f, params, ret, body in self.functions]
        mains = [t for t in self.threads if t[1]] or [t for t in self.threads if t[0] == Gl.MAIN_THREAD]
        if len(mains) != 1:
            raise BirSyntaxError("system needs exactly one main thread", filename=self.filename)
        threads = []
        for tname, _, active, locations, init_location in mains + [t for t in self.threads if t not in mains]:
            main = tname == mains[0][0]
            threads.append(ThreadDef(tname, locations, active or main, Gl.MAIN_KIND if main else Gl.MONITORED,
                                     init_location))
        system = GuardedTransitionSystem(name, [table[t] for t in types], variables, functions, threads,
                                         self.properties)
        try:
            check_system(system)
        except ValueError as err:
            raise BirSyntaxError(str(err), filename=self.filename) from None
        return system


def read_bir(text: str, filename: str = None) -> GuardedTransitionSystem:
    """Parse textual IR into a system; raises BirSyntaxError with a position."""
    return BirReader(tokenize_bir(text, filename), filename).read_system()
