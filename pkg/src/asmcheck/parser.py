import re
from typing import Optional

from . import ltl
from .exceptions import AsmSyntaxError
from .globals import Gl
from .lexer import Token, tokenize, KEYWORD, IDENT, VAR, INT, REAL, STRING, SYMBOL, EOF
from .model import (ModelAst, DomainDecl, FunctionDecl, FunctionDef, RuleDef, LtlSpecDecl,
                    InvariantDecl, InitDecl, InitSimple, InitGroup, InitConditional, AgentBinding,
                    IntRange, SeqOf, Literal, EnumElement, Var, FunctionApp, Binary, Unary, CondTerm,
                    CaseTerm, Quantified, IsUndef, SelfTerm, SeqLiteral, SeqCall, Temporal, Update,
                    CondRule, CaseRule, ChooseRule, ForallRule, ParRule, SeqRule, LetRule, SkipRule,
                    MacroCall, ProgramCall)


BASIC_DOMAIN_NAMES = tuple(Gl.BASIC_DOMAINS) + (Gl.AGENT,)
COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")
TEMPORAL_UNARY = {Gl.LTL_ALWAYS: Gl.LTL_ALWAYS, Gl.LTL_EVENTUALLY: Gl.LTL_EVENTUALLY}
TEMPORAL_BINARY = (Gl.LTL_UNTIL, Gl.LTL_RELEASE)
SEQ_NAMES = set(Gl.SEQ_EXPRESSIONS) | set(Gl.SEQ_ACTIONS) | set(Gl.SEQ_ALIASES)
# items that may follow the signature or start a definition
SIGNATURE_END = ("definitions",)
DEFINITION_END = ("main", "default", "init")


class Parser:

    def __init__(self, tokens: list, source: Optional[str] = None, filename: Optional[str] = None):
        self.tokens = list(tokens)
        if not self.tokens or self.tokens[-1].kind != EOF:
            last = self.tokens[-1] if self.tokens else Token(EOF, None, 1, 1)
            self.tokens.append(Token(EOF, None, last.line, last.column))
        self.i = 0
        self.source = source
        self.filename = filename
        self.model: Optional[ModelAst] = None
        self.enum_elements: dict = {}
        self.scopes: list = []
        self.ltl_context = False
        self._line_starts = None
        if source is not None:
            self._line_starts = [0] + [m.end() for m in re.finditer("\n", source)]

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
        return tok.kind in (KEYWORD, SYMBOL) and tok.value == value

    def accept(self, value) -> Optional[Token]:
        if self.at(value):
            return self.advance()
        return None

    def expect(self, value, what: str = None) -> Token:
        tok = self.peek()
        if not self.at(value):
            self.error(f"expected {what or repr(value)}, found {self.describe(tok)}", tok)
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            self.error(f"expected {what}, found {self.describe(tok)}", tok)
        return self.advance()

    def describe(self, tok: Token) -> str:
        if tok.kind == EOF:
            return "end of input"
        return f"{tok.kind} {tok.value!r}"

    def error(self, message: str, tok: Token = None):
        tok = tok or self.peek()
        raise AsmSyntaxError(message, tok.line, tok.column, self.filename)

    @staticmethod
    def pos(tok: Token) -> tuple:
        return (tok.line, tok.column)

    def offset(self, tok: Token) -> int:
        return self._line_starts[tok.line - 1] + tok.column - 1

    def text_between(self, start: int, end: int) -> str:
        """Source text of tokens[start:end] with comments dropped and blanks collapsed."""
        if self._line_starts is None or end <= start:
            return ""
        text = self.source[self.offset(self.tokens[start]):self.offset(self.tokens[end])]
        text = re.sub(r"//[^\n]*|/\*.*?\*/", " ", text, flags=re.DOTALL)
        return " ".join(text.split())

    # ------------------------------------------------------------ scopes

    def bind(self, names: list, tok: Token):
        seen = set()
        for n in names:
            if n in seen:
                self.error(f"variable {n} bound twice", tok)
            seen.add(n)
        self.scopes.append(seen)

    def unbind(self):
        self.scopes.pop()

    def is_bound(self, name: str) -> bool:
        return any(name in s for s in self.scopes)

    # ------------------------------------------------------------ model

    def parse_model(self) -> ModelAst:
        if self.at("module"):
            self.error("modules are not supported, expected 'asm'")
        self.expect("asm")
        self.model = ModelAst(self.expect_ident("model name").value)
        while self.accept("import"):
            self.model.imports.append(self.parse_import_name())
        if self.accept("export"):
            if self.accept("*"):
                self.model.exports.append("*")
            else:
                self.model.exports.append(self.expect_ident().value)
                while self.accept(","):
                    self.model.exports.append(self.expect_ident().value)
        self.expect("signature")
        self.expect(":")
        while not self.at("definitions"):
            if self.peek().kind == EOF:
                self.error("expected 'definitions'")
            self.parse_signature_item()
        self.expect("definitions")
        self.expect(":")
        while not any(self.at(v) for v in DEFINITION_END) and self.peek().kind != EOF:
            self.parse_definition()
        if not self.at("main"):
            self.error("missing main rule")
        self.parse_main_rule()
        if self.at("default") or self.at("init"):
            self.parse_init()
        if self.peek().kind != EOF:
            self.error(f"unexpected {self.describe(self.peek())} after the initialization")
        self.resolve_rules()
        return self.model

    def parse_import_name(self) -> str:
        # paths such as ../STDL/StandardLibrary; the last segment names the module
        parts = []
        while self.peek().kind != EOF and not any(self.at(v) for v in ("import", "export", "signature")):
            tok = self.advance()
            parts.append(str(tok.value))
        if not parts:
            self.error("expected module name after 'import'")
        return "".join(parts).split("/")[-1]

    # ------------------------------------------------------------ signature

    def declare_domain(self, decl: DomainDecl, tok: Token):
        if self.model.domain(decl.name) is not None or decl.name in BASIC_DOMAIN_NAMES:
            self.error(f"duplicate declaration of domain {decl.name}", tok)
        self.model.domain_decls.append(decl)

    def parse_signature_item(self):
        tok = self.peek()
        if self.accept("enum"):
            self.expect("domain")
            name = self.expect_ident("domain name")
            self.expect("=")
            self.expect("{")
            elements = [self.expect_ident("enum element").value]
            while self.accept("|") or self.accept(","):
                elements.append(self.expect_ident("enum element").value)
            self.expect("}")
            if len(set(elements)) != len(elements):
                self.error(f"duplicate element in enum domain {name.value}", name)
            for e in elements:
                if e in self.enum_elements:
                    self.error(f"enum element {e} already belongs to {self.enum_elements[e]}", name)
                self.enum_elements[e] = name.value
            self.declare_domain(DomainDecl(Gl.ENUM, name.value, tuple(elements), pos=self.pos(tok)), name)
        elif self.accept("abstract"):
            self.expect("domain")
            name = self.expect_ident("domain name")
            self.declare_domain(DomainDecl(Gl.ABSTRACT, name.value, pos=self.pos(tok)), name)
        elif self.accept("domain"):
            name = self.expect_ident("domain name")
            self.expect("subsetof")
            parent = self.parse_domain_name()
            kind = Gl.AGENT_SUBSET if parent == Gl.AGENT else Gl.CONCRETE_SUBSET
            self.declare_domain(DomainDecl(kind, name.value, parent=parent, pos=self.pos(tok)), name)
        elif self.at("basic"):
            self.error("basic domain declarations are not supported")
        else:
            self.parse_function_decl()

    def parse_function_decl(self):
        tok = self.peek()
        dynamic = bool(self.accept("dynamic"))
        kind_tok = self.peek()
        if kind_tok.kind == KEYWORD and kind_tok.value in ("shared", "out"):
            self.error(f"{kind_tok.value} functions are not supported", kind_tok)
        kinds = {"controlled": Gl.CONTROLLED, "monitored": Gl.MONITORED,
                 "static": Gl.STATIC, "derived": Gl.DERIVED}
        if kind_tok.kind != KEYWORD or kind_tok.value not in kinds:
            self.error(f"expected a domain or function declaration, found {self.describe(kind_tok)}", kind_tok)
        self.advance()
        kind = kinds[kind_tok.value]
        if dynamic and kind in (Gl.STATIC, Gl.DERIVED):
            self.error(f"{kind} functions cannot be dynamic", kind_tok)
        name = self.expect_ident("function name")
        self.expect(":")
        first = self.parse_domain_expr()
        if self.accept("->"):
            args = first if isinstance(first, tuple) else (first,)
            codomain = self.parse_domain_expr()
            if isinstance(codomain, tuple):
                self.error("product codomains are not supported", name)
        else:
            if isinstance(first, tuple):
                self.error("product domain used as a codomain", name)
            args, codomain = (), first
        if self.model.function(name.value) is not None or name.value in self.enum_elements:
            self.error(f"duplicate declaration of {name.value}", name)
        decl = FunctionDecl(kind, name.value, tuple(args), codomain, dynamic=dynamic, pos=self.pos(tok))
        target = self.model.domain(codomain) if isinstance(codomain, str) else None
        if kind == Gl.STATIC and not args and target is not None and target.kind in (Gl.ABSTRACT, Gl.AGENT_SUBSET):
            decl.is_constant_element = True
        self.model.function_decls.append(decl)

    def parse_domain_name(self) -> str:
        tok = self.peek()
        if tok.kind not in (IDENT, KEYWORD):
            self.error(f"expected domain name, found {self.describe(tok)}", tok)
        name = tok.value
        if name not in BASIC_DOMAIN_NAMES and self.model.domain(name) is None:
            self.error(f"unknown domain {name}", tok)
        self.advance()
        return name

    def parse_domain_expr(self):
        """Domain name, Seq(D) or Prod(D1, ..., Dn); products come back as a tuple."""
        if self.accept("Prod"):
            self.expect("(")
            parts = [self.parse_domain_expr()]
            while self.accept(","):
                parts.append(self.parse_domain_expr())
            self.expect(")")
            flat = []
            for p in parts:
                flat.extend(p if isinstance(p, tuple) else (p,))
            return tuple(flat)
        if self.accept("Seq"):
            self.expect("(")
            element = self.parse_domain_name()
            self.expect(")")
            return SeqOf(element)
        return self.parse_domain_name()

    # ------------------------------------------------------------ definitions

    def parse_definition(self):
        tok = self.peek()
        if self.accept("domain"):
            self.parse_domain_definition(tok)
        elif self.accept("function"):
            self.parse_function_definition(tok)
        elif self.at("macro") or self.at("rule"):
            macro = bool(self.accept("macro"))
            self.expect("rule")
            self.parse_rule_definition(tok, macro)
        elif self.at("turbo"):
            self.error("turbo rules are not supported")
        elif self.accept("LTLSPEC"):
            self.parse_ltl_spec(tok)
        elif self.accept("invariant"):
            self.parse_invariant(tok)
        else:
            self.error(f"unexpected {self.describe(tok)} in definitions")

    def parse_domain_definition(self, tok: Token):
        name = self.expect_ident("domain name")
        decl = self.model.domain(name.value)
        if decl is None:
            self.error(f"unknown domain {name.value}", name)
        if decl.kind != Gl.CONCRETE_SUBSET:
            self.error(f"domain {name.value} is not a concrete subset domain", name)
        if decl.extension is not None:
            self.error(f"domain {name.value} defined twice", name)
        self.expect("=")
        self.expect("{")
        if self.peek().kind == INT or (self.at("-") and self.peek(1).kind == INT):
            if self.at("..", 1) or self.at("..", 2):
                low = self.parse_signed_int()
                self.expect("..")
                high = self.parse_signed_int()
                self.expect("}")
                if high < low:
                    self.error(f"empty range {low}..{high}", name)
                decl.extension = IntRange(low, high)
                return
        values = [self.parse_term()]
        while self.accept(","):
            values.append(self.parse_term())
        self.expect("}")
        decl.extension = tuple(values)

    def parse_signed_int(self) -> int:
        negative = bool(self.accept("-"))
        tok = self.peek()
        if tok.kind != INT:
            self.error(f"expected integer, found {self.describe(tok)}", tok)
        self.advance()
        return -tok.value if negative else tok.value

    def parse_params(self) -> tuple:
        """`($x in D, $y in E)`; the caller binds the names."""
        params = []
        self.expect("(")
        if not self.at(")"):
            params.append(self.parse_binding())
            while self.accept(","):
                params.append(self.parse_binding())
        self.expect(")")
        return tuple(params)

    def parse_binding(self) -> tuple:
        tok = self.peek()
        if tok.kind != VAR:
            self.error(f"expected variable, found {self.describe(tok)}", tok)
        self.advance()
        self.expect("in")
        return (tok.value, self.parse_domain_name())

    def parse_function_definition(self, tok: Token):
        name = self.expect_ident("function name")
        decl = self.model.function(name.value)
        if decl is None:
            self.error(f"definition of undeclared function {name.value}", name)
        if self.model.definition(name.value) is not None:
            self.error(f"duplicate definition of function {name.value}", name)
        params = self.parse_params() if self.at("(") else ()
        if len(params) != decl.arity:
            self.error(f"function {name.value} declared with {decl.arity} arguments, defined with {len(params)}", name)
        self.expect("=")
        self.bind([p for p, _ in params], name)
        body = self.parse_term()
        self.unbind()
        self.model.static_defs.append(FunctionDef(name.value, params, body, pos=self.pos(tok)))

    def parse_rule_definition(self, tok: Token, macro: bool):
        name = self.expect_ident("rule name")
        if not name.value.startswith("r_"):
            self.error(f"rule name {name.value} must start with r_", name)
        if self.model.rule(name.value) is not None:
            self.error(f"duplicate declaration of rule {name.value}", name)
        params = self.parse_params() if self.at("(") else ()
        self.expect("=")
        self.bind([p for p, _ in params], name)
        body = self.parse_rule()
        self.unbind()
        self.model.rule_defs.append(RuleDef(name.value, params, body, macro, pos=self.pos(tok)))

    def parse_ltl_spec(self, tok: Token):
        if self.accept("NAME"):
            name = self.expect_ident("property name").value
            self.expect(":=")
        else:
            name = f"ltl_spec_{len(self.model.ltl_specs) + 1}"
        if any(s.name == name for s in self.model.ltl_specs):
            self.error(f"duplicate LTLSPEC {name}", tok)
        start = self.i
        self.ltl_context = True
        try:
            term = self.parse_term()
        finally:
            self.ltl_context = False
        formula = lift_ltl(term, self)
        text = self.text_between(start, self.i)
        if not text:
            from .printer import print_ltl
            text = print_ltl(formula)
        self.model.ltl_specs.append(LtlSpecDecl(name, formula, text, pos=self.pos(tok)))

    def parse_invariant(self, tok: Token):
        named = self.peek().kind == IDENT
        if named:
            name = self.advance().value
        else:
            name = f"inv_{sum(1 for v in self.model.invariants if not v.named) + 1}"
        if any(v.name == name for v in self.model.invariants):
            self.error(f"duplicate invariant {name}", tok)
        self.expect("over")
        over = [self.parse_over_item()]
        while self.accept(","):
            over.append(self.parse_over_item())
        self.expect(":")
        start = self.i
        term = self.parse_term()
        text = self.text_between(start, self.i)
        if not text:
            from .printer import print_term
            text = print_term(term)
        self.model.invariants.append(InvariantDecl(name, tuple(over), term, named, f"g({text})", pos=self.pos(tok)))

    def parse_over_item(self) -> str:
        tok = self.peek()
        if tok.kind not in (IDENT, KEYWORD):
            self.error(f"expected identifier, found {self.describe(tok)}", tok)
        name = self.advance().value
        if self.model.function(name) is None and self.model.domain(name) is None and not name.startswith("r_"):
            self.error(f"invariant over unknown name {name}", tok)
        return name

    def parse_main_rule(self):
        tok = self.expect("main")
        self.expect("rule")
        name = self.expect_ident("rule name")
        if not name.value.startswith("r_"):
            self.error(f"rule name {name.value} must start with r_", name)
        self.expect("=")
        self.model.main_rule_name = name.value
        self.model.main_rule = self.parse_rule()
        if self.at("main"):
            self.error("more than one main rule")

    def parse_init(self):
        self.accept("default")
        self.expect("init")
        self.model.init = InitDecl(self.expect_ident("initial state name").value)
        self.expect(":")
        while True:
            tok = self.peek()
            if self.accept("function"):
                self.model.init.entries.append(self.parse_init_function(tok))
            elif self.accept("agent"):
                domain = self.parse_domain_name()
                self.expect(":")
                rule = self.expect_ident("rule name")
                self.expect("[")
                self.expect("]")
                self.model.init.agent_bindings.append(AgentBinding(domain, rule.value, pos=self.pos(tok)))
                self.model.agent_programs.append((domain, rule.value))
            else:
                return

    def parse_init_function(self, tok: Token):
        name = self.expect_ident("function name")
        if self.model.function(name.value) is None:
            self.error(f"initialization of undeclared function {name.value}", name)
        if self.at("(") and self.peek(1).kind == VAR and self.at("in", 2):
            bindings = self.parse_params()
            self.expect("=")
            self.bind([b for b, _ in bindings], name)
            try:
                if self.at("switch"):
                    case = self.parse_term()
                    if not (isinstance(case.scrutinee, Var) and case.scrutinee.name == bindings[0][0]):
                        self.error("conditional initialization must switch on its bound variable", name)
                    return InitConditional(name.value, bindings, case, pos=self.pos(tok))
                return InitGroup(name.value, bindings, self.parse_term(), pos=self.pos(tok))
            finally:
                self.unbind()
        args = ()
        if self.accept("("):
            args = self.parse_term_list(")")
        location = FunctionApp(name.value, args, pos=self.pos(name))
        self.check_arity(location, name)
        self.expect("=")
        return InitSimple(location, self.parse_term(), pos=self.pos(tok))

    def resolve_rules(self):
        for rd in self.model.rule_defs:
            self.check_calls(rd.body)
        self.check_calls(self.model.main_rule)
        for b in self.model.init.agent_bindings:
            rd = self.model.rule(b.rule)
            if rd is None:
                raise AsmSyntaxError(f"unknown rule {b.rule}", *(b.pos or (None, None)), self.filename)
            d = self.model.domain(b.domain)
            if d is None or d.kind != Gl.AGENT_SUBSET:
                raise AsmSyntaxError(f"{b.domain} is not an agent domain", *(b.pos or (None, None)), self.filename)

    def check_calls(self, rule):
        for node in walk_rules(rule):
            if isinstance(node, MacroCall):
                rd = self.model.rule(node.name)
                line, col = node.pos or (None, None)
                if rd is None:
                    raise AsmSyntaxError(f"unknown rule {node.name}", line, col, self.filename)
                if len(rd.params) != len(node.args):
                    raise AsmSyntaxError(f"rule {node.name} expects {len(rd.params)} arguments, got {len(node.args)}",
                                         line, col, self.filename)

    # ------------------------------------------------------------ rules

    def parse_rule(self):
        tok = self.peek()
        p = self.pos(tok)
        if self.accept("if"):
            cond = self.parse_term()
            self.expect("then")
            then = self.parse_rule()
            otherwise = self.parse_rule() if self.accept("else") else None
            self.expect("endif")
            return CondRule(cond, then, otherwise, pos=p)
        if self.accept("switch"):
            scrutinee = self.parse_term()
            branches = []
            while self.accept("case"):
                value = self.parse_term()
                self.expect(":")
                branches.append((value, self.parse_rule()))
            if not branches:
                self.error("switch rule without case branches")
            otherwise = self.parse_rule() if self.accept("otherwise") else None
            self.expect("endswitch")
            return CaseRule(scrutinee, tuple(branches), otherwise, pos=p)
        if self.accept("choose"):
            bindings = self.parse_bindings(tok)
            try:
                cond = self.parse_term() if self.accept("with") else Literal(True, pos=p)
                self.expect("do")
                body = self.parse_rule()
            finally:
                self.unbind()
            ifnone = self.parse_rule() if self.accept("ifnone") else None
            self.accept("endchoose")
            return ChooseRule(bindings, cond, body, ifnone, pos=p)
        if self.accept("forall"):
            bindings = self.parse_bindings(tok)
            try:
                cond = self.parse_term() if self.accept("with") else Literal(True, pos=p)
                self.expect("do")
                body = self.parse_rule()
            finally:
                self.unbind()
            self.accept("endforall")
            return ForallRule(bindings, cond, body, pos=p)
        if self.accept("par"):
            return ParRule(self.parse_block("endpar"), pos=p)
        if self.accept("seq"):
            return SeqRule(self.parse_block("endseq"), pos=p)
        if self.accept("let"):
            self.expect("(")
            bindings = [self.parse_let_binding()]
            while self.accept(","):
                bindings.append(self.parse_let_binding())
            self.expect(")")
            self.expect("in")
            self.bind([b for b, _ in bindings], tok)
            try:
                body = self.parse_rule()
            finally:
                self.unbind()
            self.accept("endlet")
            return LetRule(tuple(bindings), body, pos=p)
        if self.accept("skip"):
            return SkipRule(pos=p)
        if self.accept("program"):
            self.expect("(")
            agent = self.parse_term()
            self.expect(")")
            return ProgramCall(agent, pos=p)
        if tok.kind == IDENT and tok.value.startswith("r_") and self.at("[", 1):
            self.advance()
            self.advance()
            return MacroCall(tok.value, self.parse_term_list("]"), pos=p)
        if tok.kind == KEYWORD and tok.value in ("endpar", "endseq", "endif", "endswitch", "else", "ifnone"):
            self.error(f"expected a rule, found {self.describe(tok)}", tok)
        lhs = self.parse_term()
        if not isinstance(lhs, (FunctionApp, Var)):
            self.error("left side of an update must be a function location", tok)
        self.expect(":=", "':=' of an update rule")
        return Update(lhs, self.parse_term(), pos=p)

    def parse_block(self, end: str) -> tuple:
        children = []
        while not self.accept(end):
            if self.peek().kind == EOF:
                self.error(f"expected {end!r}")
            children.append(self.parse_rule())
        if not children:
            self.error(f"empty {end[3:]} block")
        return tuple(children)

    def parse_bindings(self, tok: Token) -> tuple:
        bindings = [self.parse_binding()]
        while self.accept(","):
            bindings.append(self.parse_binding())
        self.bind([b for b, _ in bindings], tok)
        return tuple(bindings)

    def parse_let_binding(self) -> tuple:
        tok = self.peek()
        if tok.kind != VAR:
            self.error(f"expected variable, found {self.describe(tok)}", tok)
        self.advance()
        self.expect("=")
        return (tok.value, self.parse_term())

    # ------------------------------------------------------------ terms

    def parse_term(self):
        left = self.parse_temporal_binary()
        while True:
            tok = self.peek()
            if self.accept("implies"):
                # right associative
                return Binary("implies", left, self.parse_term(), pos=self.pos(tok))
            if self.accept("iff"):
                left = Binary("iff", left, self.parse_temporal_binary(), pos=self.pos(tok))
            else:
                return left

    def parse_temporal_binary(self):
        left = self.parse_or()
        tok = self.peek()
        if (self.ltl_context and tok.kind == IDENT and tok.value in TEMPORAL_BINARY
                and self.model.function(tok.value) is None):
            self.advance()
            return Temporal(tok.value, (left, self.parse_temporal_binary()), pos=self.pos(tok))
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.at("or") or self.at("xor"):
            tok = self.advance()
            left = Binary(tok.value, left, self.parse_and(), pos=self.pos(tok))
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at("and"):
            tok = self.advance()
            left = Binary("and", left, self.parse_not(), pos=self.pos(tok))
        return left

    def parse_not(self):
        tok = self.peek()
        if self.accept("not"):
            return Unary("not", self.parse_not(), pos=self.pos(tok))
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.parse_additive()
        tok = self.peek()
        if tok.kind == SYMBOL and tok.value in COMPARISONS:
            self.advance()
            return Binary(tok.value, left, self.parse_additive(), pos=self.pos(tok))
        return left

    def parse_additive(self):
        left = self.parse_multiplicative()
        while self.at("+") or self.at("-"):
            tok = self.advance()
            left = Binary(tok.value, left, self.parse_multiplicative(), pos=self.pos(tok))
        return left

    def parse_multiplicative(self):
        left = self.parse_unary()
        while self.at("*") or self.at("/") or self.at("mod"):
            tok = self.advance()
            left = Binary(tok.value, left, self.parse_unary(), pos=self.pos(tok))
        return left

    def parse_unary(self):
        tok = self.peek()
        if self.accept("-"):
            return Unary("-", self.parse_unary(), pos=self.pos(tok))
        return self.parse_primary()

    def parse_term_list(self, close: str) -> tuple:
        items = []
        if not self.accept(close):
            items.append(self.parse_term())
            while self.accept(","):
                items.append(self.parse_term())
            self.expect(close)
        return tuple(items)

    def parse_primary(self):
        tok = self.peek()
        p = self.pos(tok)
        if tok.kind in (INT, REAL, STRING):
            self.advance()
            return Literal(tok.value, pos=p)
        if tok.kind == VAR:
            self.advance()
            if not self.is_bound(tok.value):
                self.error(f"unbound variable {tok.value}", tok)
            return Var(tok.value, pos=p)
        if tok.kind == KEYWORD:
            return self.parse_keyword_term(tok)
        if tok.kind == SYMBOL:
            if self.accept("("):
                inner = self.parse_term()
                self.expect(")")
                return inner
            if self.accept("["):
                return SeqLiteral(self.parse_term_list("]"), pos=p)
            self.error(f"unexpected {self.describe(tok)}", tok)
        if tok.kind == IDENT:
            return self.parse_name(tok)
        self.error(f"unexpected {self.describe(tok)}", tok)

    def parse_keyword_term(self, tok: Token):
        p = self.pos(tok)
        value = tok.value
        if value in ("true", "false"):
            self.advance()
            return Literal(value == "true", pos=p)
        if value == "undef":
            self.advance()
            return Literal(None, pos=p)
        if value == "self":
            self.advance()
            return SelfTerm(pos=p)
        if value == "not":
            self.advance()
            return Unary("not", self.parse_unary(), pos=p)
        if value == "isUndef":
            self.advance()
            self.expect("(")
            operand = self.parse_term()
            self.expect(")")
            return IsUndef(operand, pos=p)
        if value == "if":
            self.advance()
            cond = self.parse_term()
            self.expect("then")
            then = self.parse_term()
            otherwise = self.parse_term() if self.accept("else") else None
            self.expect("endif")
            return CondTerm(cond, then, otherwise, pos=p)
        if value == "switch":
            self.advance()
            scrutinee = self.parse_term()
            branches = []
            while self.accept("case"):
                v = self.parse_term()
                self.expect(":")
                branches.append((v, self.parse_term()))
            if not branches:
                self.error("switch term without case branches")
            otherwise = self.parse_term() if self.accept("otherwise") else None
            self.expect("endswitch")
            return CaseTerm(scrutinee, tuple(branches), otherwise, pos=p)
        if value in ("forall", "exists", "exist"):
            self.advance()
            bindings = self.parse_bindings(tok)
            try:
                self.expect("with")
                cond = self.parse_term()
            finally:
                self.unbind()
            return Quantified("forall" if value == "forall" else "exists", bindings, cond, pos=p)
        self.error(f"unexpected keyword {value!r}", tok)

    def parse_name(self, tok: Token):
        name = tok.value
        p = self.pos(tok)
        decl = self.model.function(name)
        if (decl is None and self.ltl_context and name in TEMPORAL_UNARY and self.at("(", 1)):
            self.advance()
            self.expect("(")
            operand = self.parse_term()
            self.expect(")")
            return Temporal(name, (operand,), pos=p)
        if decl is not None:
            self.advance()
            args = self.parse_term_list(")") if self.accept("(") else ()
            app = FunctionApp(name, args, pos=p)
            self.check_arity(app, tok)
            return app
        if name in self.enum_elements:
            self.advance()
            return EnumElement(self.enum_elements[name], name, pos=p)
        if name in SEQ_NAMES and self.at("(", 1):
            self.advance()
            self.advance()
            return SeqCall(Gl.SEQ_ALIASES.get(name, name), self.parse_term_list(")"), pos=p)
        self.error(f"unresolved name {name}", tok)

    def check_arity(self, app: FunctionApp, tok: Token):
        decl = self.model.function(app.name)
        if decl.arity != len(app.args):
            self.error(f"function {app.name} expects {decl.arity} arguments, got {len(app.args)}", tok)


# ---------------------------------------------------------------- LTL lifting

LTL_CONNECTIVES = {"and": ltl.And, "or": ltl.Or, "xor": ltl.Xor, "implies": ltl.Implies, "iff": ltl.Iff}


def has_temporal(term) -> bool:
    return any(isinstance(t, Temporal) for t in walk_terms(term))


def lift_ltl(term, parser: Parser = None):
    """Turn a parsed formula into an LTL tree whose atoms are its maximal temporal-free subterms."""
    if not has_temporal(term):
        return ltl.Atom(term)
    match term:
        case Temporal(op, (operand,)) if op == Gl.LTL_ALWAYS:
            return ltl.Always(lift_ltl(operand, parser))
        case Temporal(op, (operand,)) if op == Gl.LTL_EVENTUALLY:
            return ltl.Eventually(lift_ltl(operand, parser))
        case Temporal(op, (left, right)) if op == Gl.LTL_UNTIL:
            return ltl.Until(lift_ltl(left, parser), lift_ltl(right, parser))
        case Temporal(op, (left, right)) if op == Gl.LTL_RELEASE:
            return ltl.Release(lift_ltl(left, parser), lift_ltl(right, parser))
        case Unary("not", operand):
            return ltl.Not(lift_ltl(operand, parser))
        case Binary(op, left, right) if op in LTL_CONNECTIVES:
            return LTL_CONNECTIVES[op](lift_ltl(left, parser), lift_ltl(right, parser))
    line, column = getattr(term, "pos", None) or (None, None)
    raise AsmSyntaxError("temporal operator inside a non-boolean term", line, column,
                         parser.filename if parser else None)


# ---------------------------------------------------------------- traversal

def walk_terms(term):
    """Pre-order iteration over a term and its subterms."""
    stack = [term]
    while stack:
        t = stack.pop()
        if t is None:
            continue
        yield t
        match t:
            case FunctionApp(_, args) | SeqLiteral(args) | SeqCall(_, args) | Temporal(_, args):
                stack.extend(reversed(args))
            case Binary(_, l, r):
                stack.extend((r, l))
            case Unary(_, a) | IsUndef(a):
                stack.append(a)
            case CondTerm(c, a, b):
                stack.extend((b, a, c))
            case CaseTerm(s, branches, o):
                stack.append(o)
                for v, r in reversed(branches):
                    stack.extend((r, v))
                stack.append(s)
            case Quantified(_, _, c):
                stack.append(c)


def walk_rules(rule):
    """Pre-order iteration over a rule and its subrules."""
    stack = [rule]
    while stack:
        r = stack.pop()
        if r is None:
            continue
        yield r
        match r:
            case CondRule(_, a, b):
                stack.extend((b, a))
            case CaseRule(_, branches, o):
                stack.append(o)
                stack.extend(reversed([b for _, b in branches]))
            case ChooseRule(_, _, body, ifnone):
                stack.extend((ifnone, body))
            case ForallRule(_, _, body) | LetRule(_, body):
                stack.append(body)
            case ParRule(children) | SeqRule(children):
                stack.extend(reversed(children))


def rule_terms(rule):
    """Terms appearing directly in one rule node."""
    match rule:
        case Update(l, r):
            return [l, r]
        case CondRule(c, _, _) | ChooseRule(_, c, _, _) | ForallRule(_, c, _):
            return [c]
        case CaseRule(s, branches, _):
            return [s] + [v for v, _ in branches]
        case LetRule(bindings, _):
            return [t for _, t in bindings]
        case MacroCall(_, args):
            return list(args)
        case ProgramCall(a):
            return [a]
    return []


# ---------------------------------------------------------------- entry points

def parse_model(tokens, source: str = None, filename: str = None) -> ModelAst:
    return Parser(tokens, source, filename).parse_model()


def parse_source(source: str, filename: str = None) -> ModelAst:
    """Tokenize and parse AsmetaL text."""
    return parse_model(tokenize(source, filename), source, filename)
