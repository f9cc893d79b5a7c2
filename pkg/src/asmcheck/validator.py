from dataclasses import dataclass, field, asdict
from typing import Optional

import pandas as pd  # type: ignore

from .globals import Gl
from .model import (ModelAst, IntRange, SeqOf, Literal, EnumElement, Var, FunctionApp, Binary, Unary,
                    CondTerm, CaseTerm, Quantified, IsUndef, SeqLiteral, SeqCall, ChooseRule, ForallRule,
                    CondRule, CaseRule, ParRule, SeqRule, LetRule, ProgramCall, InitSimple, InitGroup,
                    InitConditional)
from .parser import walk_terms, rule_terms
from . import ltl


FINDING_COLUMNS = ["severity", "code", "message", "line", "column"]


@dataclass(frozen=True)
class Finding:
    severity: str
    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def errors(self) -> list:
        return [f for f in self.findings if f.severity == Gl.ERROR]

    @property
    def warnings(self) -> list:
        return [f for f in self.findings if f.severity == Gl.WARNING]

    def codes(self) -> list:
        return [f.code for f in self.findings]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(f) for f in self.findings], columns=FINDING_COLUMNS)

    def to_text(self, filename: str = None) -> str:
        lines = []
        for f in self.findings:
            where = filename or "<input>"
            if f.line is not None:
                where += f":{f.line}:{f.column}"
            lines.append(f"{where}: {f.severity}: {f.code}: {f.message}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "findings": [asdict(f) for f in self.findings]}


# constructs a static or derived body may use
BODY_TERMS = (Literal, EnumElement, Var, FunctionApp, Binary, Unary, CondTerm, CaseTerm,
              Quantified, IsUndef, SeqLiteral, SeqCall)


class Validator:

    def __init__(self, model: ModelAst):
        self.model = model
        self.report = ValidationReport()

    def add(self, severity: str, code: str, message: str, pos=None):
        line, column = pos if pos else (None, None)
        self.report.findings.append(Finding(severity, code, message, line, column))

    # ------------------------------------------------------------ domains

    def domain_size(self, name) -> Optional[int]:
        """Cardinality of a finite domain, None when unbounded."""
        if isinstance(name, SeqOf):
            return None
        if name == Gl.BOOLEAN:
            return 2
        if name == Gl.UNDEF:
            return 1
        if name in Gl.UNBOUNDED_DOMAINS:
            return None
        decl = self.model.domain(name)
        if decl is None:
            return None
        if decl.kind == Gl.ENUM:
            return len(decl.enum_elements)
        if decl.kind in (Gl.ABSTRACT, Gl.AGENT_SUBSET):
            return len(self.model.constants_of(name))
        if decl.kind == Gl.CONCRETE_SUBSET:
            ext = decl.extension
            if ext is None:
                return None
            return len(ext.values()) if isinstance(ext, IntRange) else len(ext)
        return None

    def check_domains(self):
        for d in self.model.domain_decls:
            if d.kind == Gl.CONCRETE_SUBSET and d.extension is None:
                self.add(Gl.ERROR, Gl.MISSING_EXTENSION,
                         f"concrete subset domain {d.name} has no finite extension", d.pos)
            if d.kind in (Gl.ABSTRACT, Gl.AGENT_SUBSET) and not self.model.constants_of(d.name):
                self.add(Gl.ERROR, Gl.UNDECLARED_ELEMENTS,
                         f"elements of {d.name} must be declared as static constants", d.pos)

    # ------------------------------------------------------------ functions

    def check_functions(self):
        for f in self.model.function_decls:
            if f.kind in (Gl.CONTROLLED, Gl.MONITORED):
                for a in f.arg_domains:
                    if self.domain_size(a) is None:
                        self.add(Gl.ERROR, Gl.UNBOUNDED_ARGUMENT,
                                 f"{f.kind} function {f.name} has unbounded argument domain {a}", f.pos)
            if f.kind == Gl.MONITORED and self.domain_size(f.codomain) is None:
                self.add(Gl.ERROR, Gl.UNBOUNDED_MONITORED,
                         f"monitored function {f.name} has unbounded codomain {f.codomain}", f.pos)
            if f.kind in (Gl.STATIC, Gl.DERIVED) and not f.is_constant_element:
                fd = self.model.definition(f.name)
                if fd is None:
                    self.add(Gl.ERROR, Gl.UNSUPPORTED_BODY, f"{f.kind} function {f.name} has no definition", f.pos)
                    continue
                for t in walk_terms(fd.body):
                    if not isinstance(t, BODY_TERMS):
                        self.add(Gl.ERROR, Gl.UNSUPPORTED_BODY,
                                 f"body of {f.name} uses {type(t).__name__}", getattr(t, "pos", None) or fd.pos)
                        break

    # ------------------------------------------------------------ quantification

    def check_bindings(self, bindings, pos, what: str):
        for var, dom in bindings:
            if self.domain_size(dom) is None:
                self.add(Gl.ERROR, Gl.INFINITE_QUANTIFICATION,
                         f"{what} of {var} over infinite domain {dom}", pos)

    def check_term(self, term):
        for t in walk_terms(term):
            if isinstance(t, Quantified):
                self.check_bindings(t.bindings, t.pos, f"{t.kind} term")

    def check_rule(self, rule, agent_vars: frozenset = frozenset()):
        if rule is None:
            return
        for t in rule_terms(rule):
            self.check_term(t)
        match rule:
            case ChooseRule(bindings, _, body, ifnone):
                self.check_bindings(bindings, rule.pos, "choose")
                self.check_rule(body, agent_vars | self.agent_bound(bindings))
                self.check_rule(ifnone, agent_vars)
            case ForallRule(bindings, _, body):
                self.check_bindings(bindings, rule.pos, "forall")
                self.check_rule(body, agent_vars | self.agent_bound(bindings))
            case ProgramCall(agent):
                if not (isinstance(agent, Var) and agent.name in agent_vars):
                    self.add(Gl.ERROR, Gl.PROGRAM_OUTSIDE_AGENT,
                             "program(...) is only allowed on a variable chosen over an agent domain", rule.pos)
            case CondRule(_, then, otherwise):
                self.check_rule(then, agent_vars)
                self.check_rule(otherwise, agent_vars)
            case CaseRule(_, branches, otherwise):
                for _, body in branches:
                    self.check_rule(body, agent_vars)
                self.check_rule(otherwise, agent_vars)
            case ParRule(children) | SeqRule(children):
                for c in children:
                    self.check_rule(c, agent_vars)
            case LetRule(_, body):
                self.check_rule(body, agent_vars)

    def agent_bound(self, bindings) -> frozenset:
        names = set()
        for var, dom in bindings:
            d = self.model.domain(dom)
            if d is not None and d.kind == Gl.AGENT_SUBSET:
                if self.model.program_of(dom) is None:
                    self.add(Gl.ERROR, Gl.PROGRAM_OUTSIDE_AGENT, f"agent domain {dom} has no program binding", d.pos)
                names.add(var)
        return frozenset(names)

    # ------------------------------------------------------------ initialization

    def check_init(self):
        covered: dict = {}
        for e in self.model.init.entries:
            name = e.location.name if isinstance(e, InitSimple) else e.function
            decl = self.model.function(name)
            if decl is None or decl.kind != Gl.CONTROLLED:
                kind = decl.kind if decl else "undeclared"
                self.add(Gl.ERROR, Gl.INIT_NOT_CONTROLLED, f"initialization of {kind} function {name}", e.pos)
                continue
            match e:
                case InitSimple(location):
                    covered.setdefault(name, set()).add(location.args)
                case InitGroup():
                    covered[name] = None
                case InitConditional(_, _, case):
                    if case.otherwise is not None:
                        covered[name] = None
                    elif covered.get(name, set()) is not None:
                        covered.setdefault(name, set()).update((v,) for v, _ in case.branches)
        for f in self.model.function_decls:
            if f.kind != Gl.CONTROLLED:
                continue
            done = covered.get(f.name, set())
            if done is None:
                continue
            total = 1
            for a in f.arg_domains:
                size = self.domain_size(a)
                total = total * size if size is not None and total is not None else None
            if total is None or len(done) < total:
                self.add(Gl.WARNING, Gl.UNINITIALIZED,
                         f"uninitialized controlled location {f.name}: the first value of {f.codomain} is used",
                         f.pos)

    # ------------------------------------------------------------ run

    def run(self) -> ValidationReport:
        self.check_domains()
        self.check_functions()
        for fd in self.model.static_defs:
            self.check_term(fd.body)
        for rd in self.model.rule_defs:
            self.check_rule(rd.body)
        self.check_rule(self.model.main_rule)
        for spec in self.model.ltl_specs:
            for atom in ltl.atoms(spec.formula):
                self.check_term(atom)
        for inv in self.model.invariants:
            self.check_term(inv.term)
        self.check_init()
        return self.report


def validate(model: ModelAst) -> ValidationReport:
    """Findings for `model`; deterministic and side-effect free."""
    return Validator(model).run()
