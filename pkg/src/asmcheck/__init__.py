from .core import AsmCheck
from .globals import Gl
from .exceptions import (
    AsmCheckError,
    AsmSyntaxError,
    TranslationError,
    BirSyntaxError,
    EvaluationError,
    AssertionViolation,
    BoundExhausted,
    )
from .parser import parse_source
from .validator import validate, ValidationReport, Finding
from .translator import translate_model
from .gts import GuardedTransitionSystem
from .bir_writer import emit_bir_text
from .bir_reader import read_bir
from .evaluator import StateVector, eval_expr
from .checker import (
    Checker,
    Limits,
    Stats,
    Trace,
    Verdict,
    explore,
    check_ltl,
    initial_states,
    successors,
    )
from .ltl import to_nnf
from .buchi import to_buchi
from .report import render
from .logger import RunLogger
from .utils import print_tabulate, warn


__all__ = [
    'AsmCheck',
    'Gl',
    'AsmCheckError',
    'AsmSyntaxError',
    'TranslationError',
    'BirSyntaxError',
    'EvaluationError',
    'AssertionViolation',
    'BoundExhausted',
    'parse_source',
    'validate',
    'ValidationReport',
    'Finding',
    'translate_model',
    'GuardedTransitionSystem',
    'emit_bir_text',
    'read_bir',
    'StateVector',
    'eval_expr',
    'Checker',
    'Limits',
    'Stats',
    'Trace',
    'Verdict',
    'explore',
    'check_ltl',
    'initial_states',
    'successors',
    'to_nnf',
    'to_buchi',
    'render',
    'RunLogger',
    'print_tabulate',
    'warn',
    ]
