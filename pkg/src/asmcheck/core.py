import os
from typing import Optional

from .bir_reader import read_bir
from .bir_writer import emit_bir_text
from .checker import Checker, Limits
from .exceptions import AsmCheckError, TranslationError
from .globals import Gl
from .gts import GuardedTransitionSystem
from .logger import RunLogger
from .model import ModelAst
from .parser import parse_source
from .report import render, write_traces
from .translator import translate_model
from .utils import read_text, warn
from .validator import ValidationReport, validate


class AsmCheck:
    """
    Runs the pipeline on one input file: parse, validate, translate, then
    emit the IR text or check the system and render the report.
    """

    def __init__(self,
                 limits: Limits = None,
                 strict_updates: bool = False,
                 deadlock: bool = True,
                 property_name: Optional[str] = None,
                 workers: int = 1,
                 fmt: str = Gl.FORMAT_CONSOLE,
                 trace_file: Optional[str] = None,
                 log_file: Optional[str] = None,
                 ):
        """
        Args:
            limits: exploration bounds, unbounded when None.
            strict_updates: encode conflicting par updates with consistency assertions.
            deadlock: run the deadlock search before the properties.
            property_name: check only this property.
            workers: threads for the deadlock search; LTL always runs on one.
            fmt: report format, one of console, text, json.
            trace_file: where counterexamples are written, None for no files.
            log_file: CSV run log, None to disable.
        """
        self.limits = limits or Limits()
        self.strict_updates = strict_updates
        self.deadlock = deadlock
        self.property_name = property_name
        self.workers = workers
        self.fmt = fmt
        self.trace_file = trace_file
        self.run_log = RunLogger(log_file) if log_file else None
        self.model: Optional[ModelAst] = None
        self.validation: Optional[ValidationReport] = None
        self.system: Optional[GuardedTransitionSystem] = None
        self.verdicts: list = []
        self.traces_written: list = []

    @staticmethod
    def is_bir(path: str) -> bool:
        return os.path.splitext(path)[1].lower() == ".bir"

    def parse(self, path: str) -> ModelAst:
        self.model = parse_source(read_text(path), path)
        return self.model

    def validate(self, path: str) -> ValidationReport:
        self.validation = validate(self.parse(path))
        return self.validation

    def load(self, path: str) -> GuardedTransitionSystem:
        """System for an AsmetaL model or a textual IR file."""
        if self.is_bir(path):
            self.system = read_bir(read_text(path), path)
            return self.system
        report = self.validate(path)
        for finding in report.warnings:
            warn(f"{path}:{finding.line}:{finding.column}: warning: {finding.code}: {finding.message}")
        if not report.ok:
            raise TranslationError(f"model is not translatable\n{report.to_text(path)}", filename=path)
        try:
            self.system = translate_model(self.model, self.strict_updates)
        except AsmCheckError as err:
            raise err.with_filename(path)
        return self.system

    def emit(self, path: str) -> str:
        return emit_bir_text(self.load(path))

    def selected_properties(self) -> list:
        if self.property_name is None:
            return list(self.system.properties)
        prop = self.system.property(self.property_name)
        if prop is None:
            raise TranslationError(f"unknown property {self.property_name}", filename=self.system.name)
        return [prop]

    def check(self, path: str) -> list:
        """Verdicts for the deadlock search (unless disabled) and the selected properties."""
        self.load(path)
        properties = self.selected_properties()
        checker = Checker(self.system, self.limits)
        verdicts = []
        if self.deadlock:
            if self.workers > 1:
                verdicts.append(checker.explore_parallel(self.workers))
            else:
                verdicts.append(checker.explore())
        verdicts += [checker.check_ltl(p) for p in properties]
        self.verdicts = verdicts
        if self.trace_file:
            self.traces_written = write_traces(self.trace_file, self.system, verdicts)
        if self.run_log is not None:
            self.run_log.record_run(self.system.name, verdicts)
        return verdicts

    def report(self) -> str:
        return render(self.system, self.verdicts, self.fmt)

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts)

    @property
    def any_violated(self) -> bool:
        return any(v.outcome == Gl.VIOLATED for v in self.verdicts)
