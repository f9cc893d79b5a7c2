import json

import pytest

from asmcheck.checker import Checker, Stats, Verdict
from asmcheck.globals import Gl
from asmcheck.report import (TraceRenderer, json_report, console_report, render, total_stats, trace_path,
                             write_traces)


@pytest.fixture
def collatz_verdicts(collatz):
    return Checker(collatz).check()


def test_console_report(collatz, collatz_verdicts):
    lines = console_report(collatz, collatz_verdicts).splitlines()
    assert lines[0] == f"{Gl.TOOL_NAME} {Gl.VERSION}"
    assert lines[1] == "Checking example"
    assert lines[2].startswith("Transitions: ") and "Used Memory: " in lines[2]
    assert lines[3] == "** example is not in DEADLOCK"
    assert lines[4].startswith("**LTLSPEC NAME fail:=") and lines[4].endswith("is false")
    assert lines[5] == "Generating error trace 0..."
    assert lines[6] == "1. x = 100 MAIN.loc0"
    fail = collatz_verdicts[1]
    repeat = lines[5 + len(fail.trace.states) + 1]
    assert repeat.startswith(f"{len(fail.trace.states) + 1}. repetitive state x = ")
    assert lines[-2].startswith("**LTLSPEC NAME hold:=") and lines[-2].endswith("is true")
    assert lines[-1] == "Done!"


def test_deadlock_and_error_lines(collatz):
    verdicts = [Verdict("m", Gl.DEADLOCK, Gl.VIOLATED),
                Verdict("m", Gl.ASSERTION, Gl.OUTCOME_ERROR, message="division by zero"),
                Verdict("p", Gl.LTL, Gl.OUTCOME_ERROR, message="bound exhausted", text="G(a)")]
    lines = console_report(collatz, verdicts).splitlines()
    assert "** m is in DEADLOCK" in lines
    assert "** m runtime error: division by zero" in lines
    assert "**LTLSPEC NAME p:= G(a) could not be decided: bound exhausted" in lines


def test_json_report(collatz, collatz_verdicts):
    doc = json.loads(json_report(collatz, collatz_verdicts))
    assert doc["model"] == "example"
    assert [v["outcome"] for v in doc["verdicts"]] == [Gl.HOLDS, Gl.VIOLATED, Gl.HOLDS]
    trace = doc["verdicts"][1]["trace"]
    assert trace["states"][0] == {"values": {"x": 100}, "locations": {"MAIN": "loc0"}}
    assert isinstance(trace["loop_start"], int)
    assert doc["stats"]["states"] == sum(v["stats"]["states"] for v in doc["verdicts"])


def test_text_report(collatz, collatz_verdicts):
    text = render(collatz, collatz_verdicts, Gl.FORMAT_TEXT)
    assert text.startswith("# example\n")
    assert "# trace of fail" in text
    assert "outcome" in text and "violated" in text


def test_trace_frame_marks_the_loop(collatz, collatz_verdicts):
    trace = collatz_verdicts[1].trace
    df = TraceRenderer(collatz).trace_frame(trace)
    assert list(df.columns) == ["step", "x", "at", "loop"]
    assert df["loop"].tolist().index("<-") == trace.loop_start
    assert df["x"].iloc[0] == "100"


def test_total_stats():
    verdicts = [Verdict("a", Gl.LTL, Gl.HOLDS, stats=Stats(transitions=3, states=2, max_depth=4)),
                Verdict("b", Gl.LTL, Gl.HOLDS, stats=Stats(transitions=5, states=7, max_depth=1)),
                Verdict("c", Gl.LTL, Gl.OUTCOME_ERROR)]
    total = total_stats(verdicts)
    assert (total.transitions, total.states, total.max_depth) == (8, 9, 4)


def test_trace_paths():
    assert trace_path("out/trace.txt", 0) == "out/trace.txt"
    assert trace_path("out/trace.txt", 2) == "out/trace.2.txt"
    assert trace_path("trace", 1) == "trace.1"


def test_write_traces(tmp_path, collatz, collatz_verdicts):
    fail = collatz_verdicts[1]
    target = str(tmp_path / "traces" / "cex.json")
    written = write_traces(target, collatz, collatz_verdicts + [fail])
    assert written == [target, str(tmp_path / "traces" / "cex.1.json")]
    with open(written[1], encoding="utf-8") as f:
        doc = json.load(f)
    assert len(doc["states"]) == len(fail.trace.states)

    plain = str(tmp_path / "cex.txt")
    assert write_traces(plain, collatz, collatz_verdicts) == [plain]
    with open(plain, encoding="utf-8") as f:
        assert f.readline() == "1. x = 100 MAIN.loc0\n"
