import json
import os

import pandas as pd  # type: ignore

from .checker import Stats, Trace, Verdict
from .evaluator import StateVector, evaluator_for
from .globals import Gl
from .gts import GuardedTransitionSystem, EnumValue, RecordRef, render_value
from .seq import Seq
from .utils import peak_memory_mb, tabulate_text, write_text


VERDICT_COLUMNS = ["name", "kind", "outcome", "states", "transitions", "max_depth", "seconds", "message"]


def total_stats(verdicts: list) -> Stats:
    """Stats of a whole run: counters added up, depth maximized."""
    total = Stats()
    for v in verdicts:
        if v.stats is None:
            continue
        total.transitions += v.stats.transitions
        total.states += v.stats.states
        total.matched_states += v.stats.matched_states
        total.max_depth = max(total.max_depth, v.stats.max_depth)
        total.errors_found += v.stats.errors_found
        total.seconds += v.stats.seconds
    return total


def stats_line(stats: Stats) -> str:
    return (f"Transitions: {stats.transitions}, States: {stats.states}, "
            f"Matched States: {stats.matched_states}, Max Depth: {stats.max_depth}, "
            f"Errors found: {stats.errors_found}, Used Memory: {peak_memory_mb()}MB")


# ---------------------------------------------------------------- states

def json_value(value):
    if isinstance(value, (EnumValue, RecordRef)):
        return value.name
    if isinstance(value, Seq):
        return [json_value(v) for v in value]
    return value


class TraceRenderer:
    """Names and values of the visible part of a state, in declaration order."""

    def __init__(self, system: GuardedTransitionSystem):
        self.system = system
        layout = evaluator_for(system).layout
        self.columns = [(i, system.symbols.get(name, name)) for i, name in enumerate(layout.names)
                        if layout.kinds[i] != Gl.STATIC_CONST]
        self.threads = [t.name for t in system.threads]

    def bindings(self, state: StateVector) -> list:
        return [(name, state.values[i]) for i, name in self.columns]

    def locations(self, state: StateVector) -> list:
        return [f"{t}.{loc}" for t, loc, on in zip(self.threads, state.locations, state.active) if on]

    def state_text(self, state: StateVector) -> str:
        parts = [f"{name} = {render_value(v)}" for name, v in self.bindings(state)]
        return " ".join([", ".join(parts)] + self.locations(state)).strip()

    def trace_lines(self, trace: Trace) -> list:
        lines = [f"{k}. {self.state_text(s)}" for k, s in enumerate(trace.states, 1)]
        if trace.is_lasso:
            back = trace.states[trace.loop_start]
            lines.append(f"{len(trace.states) + 1}. repetitive state {self.state_text(back)}")
        return lines

    def trace_dict(self, trace: Trace) -> dict:
        states = []
        for s in trace.states:
            states.append({
                "values": {name: json_value(v) for name, v in self.bindings(s)},
                "locations": {t: loc for t, loc, on in zip(self.threads, s.locations, s.active) if on},
            })
        return {"states": states, "loop_start": trace.loop_start}

    def trace_frame(self, trace: Trace) -> pd.DataFrame:
        rows = []
        for k, s in enumerate(trace.states, 1):
            row = {"step": k}
            row.update({name: render_value(v) for name, v in self.bindings(s)})
            row["at"] = " ".join(self.locations(s))
            rows.append(row)
        df = pd.DataFrame(rows)
        if trace.is_lasso and not df.empty:
            df["loop"] = ["<-" if k == trace.loop_start else "" for k in range(len(rows))]
        return df


# ---------------------------------------------------------------- reports

def _verdict_lines(v: Verdict) -> list:
    if v.kind == Gl.DEADLOCK:
        if v.outcome == Gl.HOLDS:
            return [f"** {v.name} is not in DEADLOCK"]
        if v.outcome == Gl.VIOLATED:
            return [f"** {v.name} is in DEADLOCK"]
        return [f"** {v.name} deadlock check failed: {v.message}"]
    if v.kind == Gl.ASSERTION:
        what = "assertion violated" if v.outcome == Gl.VIOLATED else "runtime error"
        return [f"** {v.name} {what}: {v.message}"]
    text = v.text or v.name
    if v.outcome == Gl.OUTCOME_ERROR:
        return [f"**LTLSPEC NAME {v.name}:= {text} could not be decided: {v.message}"]
    return [f"**LTLSPEC NAME {v.name}:= {text} is {'true' if v.holds else 'false'}"]


def console_report(system: GuardedTransitionSystem, verdicts: list) -> str:
    renderer = TraceRenderer(system)
    lines = [f"{Gl.TOOL_NAME} {Gl.VERSION}", f"Checking {system.name}", stats_line(total_stats(verdicts))]
    traces = 0
    for v in verdicts:
        lines += _verdict_lines(v)
        if v.trace is not None and v.outcome != Gl.HOLDS:
            lines.append(f"Generating error trace {traces}...")
            lines += renderer.trace_lines(v.trace)
            traces += 1
    lines.append("Done!")
    return "\n".join(lines) + "\n"


def verdict_frame(verdicts: list) -> pd.DataFrame:
    rows = []
    for v in verdicts:
        stats = v.stats or Stats()
        rows.append({"name": v.name, "kind": v.kind, "outcome": v.outcome, "states": stats.states,
                     "transitions": stats.transitions, "max_depth": stats.max_depth,
                     "seconds": round(stats.seconds, 3), "message": v.message})
    return pd.DataFrame(rows, columns=VERDICT_COLUMNS)


def text_report(system: GuardedTransitionSystem, verdicts: list) -> str:
    renderer = TraceRenderer(system)
    parts = [f"# {system.name}", tabulate_text(verdict_frame(verdicts))]
    for v in verdicts:
        if v.trace is not None and v.outcome != Gl.HOLDS:
            parts += [f"# trace of {v.name}", tabulate_text(renderer.trace_frame(v.trace))]
    return "\n".join(parts) + "\n"


def report_dict(system: GuardedTransitionSystem, verdicts: list) -> dict:
    renderer = TraceRenderer(system)
    out = []
    for v in verdicts:
        out.append({
            "name": v.name,
            "kind": v.kind,
            "outcome": v.outcome,
            "message": v.message,
            "text": v.text,
            "stats": v.stats.to_dict() if v.stats else None,
            "trace": renderer.trace_dict(v.trace) if v.trace is not None else None,
        })
    return {"model": system.name, "stats": total_stats(verdicts).to_dict(), "verdicts": out}


def json_report(system: GuardedTransitionSystem, verdicts: list) -> str:
    return json.dumps(report_dict(system, verdicts), indent=2) + "\n"


def render(system: GuardedTransitionSystem, verdicts: list, fmt: str = Gl.FORMAT_CONSOLE) -> str:
    if fmt == Gl.FORMAT_JSON:
        return json_report(system, verdicts)
    if fmt == Gl.FORMAT_TEXT:
        return text_report(system, verdicts)
    return console_report(system, verdicts)


# ---------------------------------------------------------------- trace files

def trace_path(path: str, index: int) -> str:
    """First trace goes to `path`, later ones to `stem.<index>.suffix`."""
    if index == 0:
        return path
    stem, suffix = os.path.splitext(path)
    return f"{stem}.{index}{suffix}"


def write_trace(path: str, system: GuardedTransitionSystem, trace: Trace):
    renderer = TraceRenderer(system)
    if path.endswith(".json"):
        write_text(path, json.dumps(renderer.trace_dict(trace), indent=2) + "\n")
    else:
        write_text(path, "\n".join(renderer.trace_lines(trace)) + "\n")


def write_traces(path: str, system: GuardedTransitionSystem, verdicts: list) -> list:
    """Write every counterexample; returns the files written."""
    written = []
    for v in verdicts:
        if v.trace is None or v.outcome == Gl.HOLDS:
            continue
        target = trace_path(path, len(written))
        write_trace(target, system, v.trace)
        written.append(target)
    return written
