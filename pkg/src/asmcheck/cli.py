"""
Command line front end.

    asm-check check MODEL [--property NAME] [--no-deadlock] [--trace FILE] ...
    asm-check emit MODEL [-o OUT]
    asm-check validate MODEL
    asm-check runs LOG.csv [--by-model] [--clear]

A bare `asm-check MODEL` is a check. MODEL is an AsmetaL file, or a
textual IR file with the `.bir` suffix.
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .checker import Limits
from .core import AsmCheck
from .exceptions import AsmCheckError, EvaluationError
from .globals import Gl
from .logger import RunLogger
from .utils import print_tabulate, warn, write_text


@dataclass
class RunConfig:
    input_path: str
    mode: str = Gl.MODE_CHECK
    property_name: Optional[str] = None
    deadlock: bool = True
    max_states: Optional[int] = None
    max_depth: Optional[int] = None
    max_seconds: Optional[float] = None
    strict_updates: bool = False
    trace_file: Optional[str] = None
    fmt: str = Gl.FORMAT_CONSOLE
    workers: int = 1
    log_file: Optional[str] = None
    output: Optional[str] = None
    by_model: bool = False
    clear: bool = False

    @property
    def limits(self) -> Limits:
        return Limits(self.max_states, self.max_depth, self.max_seconds)


def _env_max_states() -> Optional[int]:
    raw = os.environ.get(Gl.ENV_MAX_STATES)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        return warn(f"ignoring {Gl.ENV_MAX_STATES}={raw!r}: not an integer")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=Gl.TOOL_NAME,
                                     description="Model check AsmetaL specifications through a guarded-command IR")
    parser.add_argument("--version", action="version", version=f"%(prog)s {Gl.VERSION}")
    modes = parser.add_subparsers(dest="mode", required=True)

    check = modes.add_parser(Gl.MODE_CHECK, help="translate and check deadlock and LTL properties")
    check.add_argument("model", help="AsmetaL model or .bir file")
    check.add_argument("--property", dest="property_name", help="check only this property")
    check.add_argument("--no-deadlock", dest="deadlock", action="store_false", help="skip the deadlock search")
    check.add_argument("--max-states", type=int, default=_env_max_states(),
                       help=f"state bound (default from {Gl.ENV_MAX_STATES})")
    check.add_argument("--max-depth", type=int, help="search depth bound")
    check.add_argument("--max-seconds", type=float, help="time bound per search")
    check.add_argument("--strict-updates", action="store_true",
                       help="assert consistency of conflicting parallel updates")
    check.add_argument("--trace", dest="trace_file", help="write counterexamples here (.json for JSON)")
    check.add_argument("--format", dest="fmt", default=Gl.FORMAT_CONSOLE,
                       choices=[Gl.FORMAT_CONSOLE, Gl.FORMAT_TEXT, Gl.FORMAT_JSON])
    check.add_argument("--workers", type=int, default=1, help="threads for the deadlock search")
    check.add_argument("--log-file", help="append one CSV row per verdict")

    emit = modes.add_parser(Gl.MODE_EMIT, help="print the IR text of a model")
    emit.add_argument("model", help="AsmetaL model or .bir file")
    emit.add_argument("-o", "--output", help="write to this file instead of stdout")
    emit.add_argument("--strict-updates", action="store_true")

    val = modes.add_parser(Gl.MODE_VALIDATE, help="report translatability findings")
    val.add_argument("model", help="AsmetaL model")
    val.add_argument("--format", dest="fmt", default=Gl.FORMAT_TEXT,
                     choices=[Gl.FORMAT_CONSOLE, Gl.FORMAT_TEXT, Gl.FORMAT_JSON])

    runs = modes.add_parser(Gl.MODE_RUNS, help="show the run history of a CSV run log")
    runs.add_argument("model", metavar="log_file", help="CSV run log written by check --log-file")
    runs.add_argument("--by-model", action="store_true", help="one table per model")
    runs.add_argument("--clear", action="store_true", help="empty the log instead of showing it")
    return parser


def parse_config(argv: list) -> RunConfig:
    argv = list(argv)
    if argv and argv[0] not in (Gl.MODE_CHECK, Gl.MODE_EMIT, Gl.MODE_VALIDATE, Gl.MODE_RUNS) \
            and not argv[0].startswith("-"):
        argv.insert(0, Gl.MODE_CHECK)
    args = vars(build_parser().parse_args(argv))
    args["input_path"] = args.pop("model")
    return RunConfig(**args)


def run(config: RunConfig) -> int:
    """Run one configuration; the result is the process exit code."""
    path = config.input_path
    try:
        if config.mode == Gl.MODE_RUNS:
            log = RunLogger(path)
            if config.clear:
                log.clear_log()
            else:
                log.print_runs(bymodel=config.by_model)
            return Gl.EXIT_OK

        app = AsmCheck(limits=config.limits,
                       strict_updates=config.strict_updates,
                       deadlock=config.deadlock,
                       property_name=config.property_name,
                       workers=config.workers,
                       fmt=config.fmt,
                       trace_file=config.trace_file,
                       log_file=config.log_file)
        if config.mode == Gl.MODE_VALIDATE:
            report = app.validate(path)
            if config.fmt == Gl.FORMAT_JSON:
                print(json.dumps(report.to_dict(), indent=2))
            elif report.findings:
                print_tabulate(report.to_frame(), title=path)
            else:
                print(f"{path}: no findings")
            return Gl.EXIT_OK if report.ok else Gl.EXIT_MODEL_ERROR

        if config.mode == Gl.MODE_EMIT:
            text = app.emit(path)
            if config.output:
                write_text(config.output, text)
            else:
                print(text, end="")
            return Gl.EXIT_OK

        app.check(path)
        print(app.report(), end="")
        for written in app.traces_written:
            warn(f"trace written to {written}")
        return Gl.EXIT_OK if app.all_hold else Gl.EXIT_VIOLATION
    except OSError as err:
        warn(f"{Gl.TOOL_NAME}: {err}")
        return Gl.EXIT_IO_ERROR
    except EvaluationError as err:
        # raised while building the initial state
        warn(f"{Gl.TOOL_NAME}: {err}")
        return Gl.EXIT_VIOLATION
    except AsmCheckError as err:
        warn(str(err))
        return Gl.EXIT_MODEL_ERROR
    except ValueError as err:
        warn(f"{Gl.TOOL_NAME}: {err}")
        return Gl.EXIT_MODEL_ERROR


def main(argv: list = None) -> int:
    config = parse_config(sys.argv[1:] if argv is None else argv)
    return run(config)
