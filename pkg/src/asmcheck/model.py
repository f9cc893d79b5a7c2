from dataclasses import dataclass, field
from typing import Optional, Union

from .globals import Gl
from .ltl import LtlFormula


Pos = Optional[tuple[int, int]]


# (line, column); never part of equality
def _pos():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, eq=False)
class Literal:
    """bool, int, float or string constant; `None` stands for undef."""
    value: object
    pos: Pos = _pos()

    # 1, 1.0 and true are different literals
    def __eq__(self, other) -> bool:
        return (isinstance(other, Literal) and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self) -> int:
        return hash((type(self.value).__name__, self.value))

@dataclass(frozen=True)
class EnumElement:
    domain: str
    name: str
    pos: Pos = _pos()

@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()

@dataclass(frozen=True)
class FunctionApp:
    name: str
    args: tuple = ()
    pos: Pos = _pos()

@dataclass(frozen=True)
class Binary:
    op: str
    left: "Term"
    right: "Term"
    pos: Pos = _pos()

@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Term"
    pos: Pos = _pos()

@dataclass(frozen=True)
class CondTerm:
    cond: "Term"
    then: "Term"
    otherwise: "Term"
    pos: Pos = _pos()

@dataclass(frozen=True)
class CaseTerm:
    scrutinee: "Term"
    branches: tuple   # of (value Term, result Term)
    otherwise: Optional["Term"] = None
    pos: Pos = _pos()

@dataclass(frozen=True)
class Quantified:
    kind: str         # "forall" | "exists"
    bindings: tuple   # of (variable, domain name)
    cond: "Term"
    pos: Pos = _pos()

@dataclass(frozen=True)
class IsUndef:
    operand: "Term"
    pos: Pos = _pos()

@dataclass(frozen=True)
class SelfTerm:
    pos: Pos = _pos()

@dataclass(frozen=True)
class SeqLiteral:
    items: tuple = ()
    pos: Pos = _pos()

@dataclass(frozen=True)
class SeqCall:
    op: str
    args: tuple = ()
    pos: Pos = _pos()

@dataclass(frozen=True)
class Temporal:
    """g/f/u/v application; only occurs while parsing LTLSPEC formulas."""
    op: str
    args: tuple
    pos: Pos = _pos()


Term = Union[Literal, EnumElement, Var, FunctionApp, Binary, Unary, CondTerm,
             CaseTerm, Quantified, IsUndef, SelfTerm, SeqLiteral, SeqCall, Temporal]


# ---------------------------------------------------------------- rules

@dataclass(frozen=True)
class Update:
    lhs: Term
    rhs: Term
    pos: Pos = _pos()

@dataclass(frozen=True)
class CondRule:
    cond: Term
    then: "Rule"
    otherwise: Optional["Rule"] = None
    pos: Pos = _pos()

@dataclass(frozen=True)
class CaseRule:
    scrutinee: Term
    branches: tuple   # of (value Term, Rule)
    otherwise: Optional["Rule"] = None
    pos: Pos = _pos()

@dataclass(frozen=True)
class ChooseRule:
    bindings: tuple   # of (variable, domain name)
    cond: Term
    body: "Rule"
    ifnone: Optional["Rule"] = None
    pos: Pos = _pos()

@dataclass(frozen=True)
class ForallRule:
    bindings: tuple
    cond: Term
    body: "Rule"
    pos: Pos = _pos()

@dataclass(frozen=True)
class ParRule:
    children: tuple
    pos: Pos = _pos()

@dataclass(frozen=True)
class SeqRule:
    children: tuple
    pos: Pos = _pos()

@dataclass(frozen=True)
class LetRule:
    bindings: tuple   # of (variable, Term)
    body: "Rule"
    pos: Pos = _pos()

@dataclass(frozen=True)
class SkipRule:
    pos: Pos = _pos()

@dataclass(frozen=True)
class MacroCall:
    name: str
    args: tuple = ()
    pos: Pos = _pos()

@dataclass(frozen=True)
class ProgramCall:
    agent: Term
    pos: Pos = _pos()


Rule = Union[Update, CondRule, CaseRule, ChooseRule, ForallRule, ParRule, SeqRule,
             LetRule, SkipRule, MacroCall, ProgramCall]


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class IntRange:
    low: int
    high: int

    def values(self) -> tuple:
        return tuple(range(self.low, self.high + 1))

@dataclass(frozen=True)
class SeqOf:
    element: str

    def __str__(self) -> str:
        return f"Seq({self.element})"


@dataclass
class DomainDecl:
    kind: str
    name: str
    enum_elements: tuple = ()
    parent: Optional[str] = None
    # tuple of constant Terms or an IntRange, set by the definitions section
    extension: Union[tuple, IntRange, None] = None
    pos: Pos = _pos()

@dataclass
class FunctionDecl:
    kind: str
    name: str
    arg_domains: tuple = ()
    codomain: Union[str, SeqOf] = Gl.BOOLEAN
    is_constant_element: bool = False
    dynamic: bool = False
    pos: Pos = _pos()

    @property
    def arity(self) -> int:
        return len(self.arg_domains)

@dataclass
class FunctionDef:
    name: str
    params: tuple     # of (variable, domain name)
    body: Term
    pos: Pos = _pos()

@dataclass
class RuleDef:
    name: str
    params: tuple
    body: Rule
    macro: bool = False
    pos: Pos = _pos()

@dataclass
class LtlSpecDecl:
    name: str
    formula: LtlFormula
    text: str = field(default="", compare=False)
    pos: Pos = _pos()

@dataclass
class InvariantDecl:
    name: str
    over: tuple
    term: Term
    named: bool = True
    text: str = field(default="", compare=False)
    pos: Pos = _pos()

@dataclass(frozen=True)
class InitSimple:
    location: FunctionApp
    value: Term
    pos: Pos = _pos()

@dataclass(frozen=True)
class InitGroup:
    function: str
    bindings: tuple
    value: Term
    pos: Pos = _pos()

@dataclass(frozen=True)
class InitConditional:
    function: str
    bindings: tuple
    case: CaseTerm
    pos: Pos = _pos()

@dataclass(frozen=True)
class AgentBinding:
    domain: str
    rule: str
    pos: Pos = _pos()

@dataclass
class InitDecl:
    name: str = "s0"
    entries: list = field(default_factory=list)
    agent_bindings: list = field(default_factory=list)


@dataclass
class ModelAst:
    name: str
    imports: list = field(default_factory=list)
    domain_decls: list = field(default_factory=list)
    function_decls: list = field(default_factory=list)
    static_defs: list = field(default_factory=list)
    rule_defs: list = field(default_factory=list)
    ltl_specs: list = field(default_factory=list)
    invariants: list = field(default_factory=list)
    main_rule: Optional[Rule] = None
    main_rule_name: str = "r_Main"
    init: InitDecl = field(default_factory=InitDecl)
    agent_programs: list = field(default_factory=list)
    exports: list = field(default_factory=list)

    def domain(self, name: str) -> Optional[DomainDecl]:
        for d in self.domain_decls:
            if d.name == name:
                return d
        return None

    def function(self, name: str) -> Optional[FunctionDecl]:
        for f in self.function_decls:
            if f.name == name:
                return f
        return None

    def definition(self, name: str) -> Optional[FunctionDef]:
        for d in self.static_defs:
            if d.name == name:
                return d
        return None

    def rule(self, name: str) -> Optional[RuleDef]:
        for r in self.rule_defs:
            if r.name == name:
                return r
        return None

    def constants_of(self, domain: str) -> list[FunctionDecl]:
        """Static 0-ary elements of an abstract or agent domain, declaration order."""
        return [f for f in self.function_decls if f.is_constant_element and f.codomain == domain]

    def program_of(self, domain: str) -> Optional[str]:
        for d, rule in self.agent_programs:
            if d == domain:
                return rule
        return None
