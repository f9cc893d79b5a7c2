import json

from asmcheck.cli import main, parse_config
from asmcheck.globals import Gl

from conftest import fixture_path, read_fixture

COLLATZ = fixture_path("collatz.bir")


def test_violation_exits_one(capsys):
    assert main(["check", COLLATZ]) == Gl.EXIT_VIOLATION
    out = capsys.readouterr().out
    assert "**LTLSPEC NAME fail:=" in out
    assert out.rstrip().endswith("Done!")


def test_bare_model_path_is_a_check(capsys):
    config = parse_config([COLLATZ, "--property", "hold"])
    assert config.mode == Gl.MODE_CHECK and config.property_name == "hold"
    assert main([COLLATZ, "--property", "hold"]) == Gl.EXIT_OK
    assert "is true" in capsys.readouterr().out


def test_unknown_property(capsys):
    assert main(["check", COLLATZ, "--property", "nope"]) == Gl.EXIT_MODEL_ERROR
    assert "unknown property nope" in capsys.readouterr().err


def test_missing_file_is_an_io_error(tmp_path):
    assert main(["check", str(tmp_path / "absent.bir")]) == Gl.EXIT_IO_ERROR


def test_syntax_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.asm"
    bad.write_text("asm bad\nsignature:\n  dynamic controlled x Boolean\n", encoding="utf-8")
    assert main(["check", str(bad)]) == Gl.EXIT_MODEL_ERROR
    assert "bad.asm:" in capsys.readouterr().err


def test_bounds_give_exit_one(capsys):
    assert main(["check", COLLATZ, "--max-states", "5", "--no-deadlock", "--property", "hold"]) == \
        Gl.EXIT_VIOLATION
    assert "could not be decided: bound exhausted" in capsys.readouterr().out


def test_state_bound_from_environment(monkeypatch):
    monkeypatch.setenv(Gl.ENV_MAX_STATES, "5")
    assert parse_config(["check", COLLATZ]).max_states == 5
    monkeypatch.setenv(Gl.ENV_MAX_STATES, "many")
    assert parse_config(["check", COLLATZ]).max_states is None


def test_emit_to_file(tmp_path):
    out = tmp_path / "subsetDomain.bir"
    assert main(["emit", fixture_path("subsetDomain.asm"), "-o", str(out)]) == Gl.EXIT_OK
    assert out.read_text(encoding="utf-8") == read_fixture("subsetDomain.bir")


def test_emit_to_stdout(capsys):
    assert main(["emit", COLLATZ]) == Gl.EXIT_OK
    assert capsys.readouterr().out.startswith("system example {")


def test_validate(tmp_path, capsys):
    assert main(["validate", fixture_path("ferryman.asm")]) == Gl.EXIT_OK
    capsys.readouterr()

    bad = tmp_path / "v.asm"
    bad.write_text("asm v\nimport StandardLibrary\nsignature:\n  dynamic monitored n: Integer\n"
                   "definitions:\n  main rule r_Main = skip\ndefault init s0:\n", encoding="utf-8")
    assert main(["validate", str(bad), "--format", "json"]) == Gl.EXIT_MODEL_ERROR
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is False
    assert [f["code"] for f in doc["findings"]] == [Gl.UNBOUNDED_MONITORED]
    assert main(["check", str(bad)]) == Gl.EXIT_MODEL_ERROR
    assert "model is not translatable" in capsys.readouterr().err


def test_trace_file_and_json_format(tmp_path, capsys):
    trace = tmp_path / "cex.txt"
    assert main(["check", COLLATZ, "--format", "json", "--trace", str(trace)]) == Gl.EXIT_VIOLATION
    captured = capsys.readouterr()
    assert json.loads(captured.out)["model"] == "example"
    assert f"trace written to {trace}" in captured.err
    assert trace.read_text(encoding="utf-8").startswith("1. x = 100 MAIN.loc0\n")


def test_run_log(tmp_path):
    log = tmp_path / "runs.csv"
    main(["check", COLLATZ, "--log-file", str(log)])
    lines = log.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith(Gl.TIME_STAMP)
    assert len(lines) == 4


def test_parallel_deadlock_search(capsys):
    assert main(["check", COLLATZ, "--workers", "3", "--property", "hold"]) == Gl.EXIT_OK
    assert "** example is not in DEADLOCK" in capsys.readouterr().out


def test_run_history_from_the_command_line(tmp_path, capsys):
    log = str(tmp_path / "runs.csv")
    assert main(["check", COLLATZ, "--log-file", log]) == Gl.EXIT_VIOLATION
    capsys.readouterr()

    assert main(["runs", log, "--by-model"]) == Gl.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("Run History:")
    assert "# Model: example" in out and "fail" in out

    assert main(["runs", log, "--clear"]) == Gl.EXIT_OK
    with open(log, encoding="utf-8") as f:
        assert len(f.read().splitlines()) == 1


def test_run_log_must_be_csv(tmp_path, capsys):
    assert main(["runs", str(tmp_path / "runs.txt")]) == Gl.EXIT_MODEL_ERROR
    assert "CSV" in capsys.readouterr().err
