"""
tests/test_cli.py — Subcommands, stdout formats and exit codes.
"""

import io
import json
import logging
import sys

import pandas as pd
import pytest

import app.services.oracle as oracle
import app.services.solver as solver
from app.cli import run

DIAMOND = "p dagmc 4 1 2\na 1 2\na 1 3\na 2 4\na 3 4\nt 1 4\n"
DIAMOND_P1 = "p dagmc 4 1 1\na 1 2\na 1 3\na 2 4\na 3 4\nt 1 4\n"
PATH = "p dagmc 4 1 1\na 1 2\na 2 3\na 3 4\nt 1 4\n"
P2_GRAPH = "p graph 2 1\ne 1 2\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def test_solve_yes(write, capsys):
    assert run(["solve", write("d.dagmc", DIAMOND)]) == 0
    assert capsys.readouterr().out == "s YES\nv 2\nv 3\n"


def test_solve_no(write, capsys):
    assert run(["solve", write("d.dagmc", DIAMOND_P1)]) == 0
    assert capsys.readouterr().out == "s NO\n"


def test_solve_stats_on_stderr(write, capsys):
    assert run(["solve", write("p.dagmc", PATH), "--shadow", "cuts", "--stats"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("s YES\n")
    stats = json.loads(captured.err.strip().splitlines()[-1])
    assert stats["nodes_expanded"] >= 1
    assert stats["max_depth"] <= 2, "(r+1)·p = 2"


def test_solve_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(DIAMOND))
    assert run(["solve", "-"]) == 0
    assert capsys.readouterr().out.startswith("s YES")


def test_oracle_lexmin(write, capsys):
    assert run(["oracle", write("p.dagmc", PATH)]) == 0
    assert capsys.readouterr().out == "s YES\nv 2\n"


def test_verify(write, capsys):
    inst = write("p.dagmc", PATH)
    assert run(["verify", inst, write("ok.sol", "s YES\nv 3\n")]) == 0
    assert capsys.readouterr().out == "s VALID\n"
    assert run(["verify", inst, write("bad.sol", "s YES\n")]) == 0
    assert capsys.readouterr().out.startswith("s INVALID\n")
    assert run(["verify", inst, write("big.sol", "s YES\nv 2\nv 3\n")]) == 0
    assert "exceed budget" in capsys.readouterr().out


def test_verify_accepts_solver_output(write, capsys):
    inst = write("d.dagmc", DIAMOND)
    run(["solve", inst])
    solution = write("d.sol", capsys.readouterr().out)
    assert run(["verify", inst, solution]) == 0
    assert capsys.readouterr().out == "s VALID\n"


def test_gen_clique(write, capsys):
    assert run(["gen", "clique", "--graph", write("k2.graph", P2_GRAPH), "--size", "2"]) == 0
    assert capsys.readouterr().out.startswith("p dagmc-w 32 10 75\n")


def test_gen_maxcut_and_oracle_w(write, capsys):
    assert run(["gen", "maxcut", "--graph", write("p2.graph", P2_GRAPH), "--cut", "1"]) == 0
    gadget = capsys.readouterr().out
    assert gadget.startswith("p dagmc-w 12 3 7\n")
    path = write("p2.dagmcw", gadget)
    assert run(["oracle-w", path]) == 0
    assert capsys.readouterr().out == "s YES\n"
    assert run(["skew2pairs", path]) == 0
    assert capsys.readouterr().out.startswith("p dagmc-w 12 2 7\n")


def test_expand_and_normalize(write, capsys):
    weighted = write("w.dagmcw", "p dagmc-w 3 1 2\na 1 2 2\na 2 3 inf\nt 1 3\n")
    assert run(["expand", weighted]) == 0
    assert capsys.readouterr().out.startswith("p dagmc 10 1 2\n")
    assert run(["normalize", write("p.dagmc", PATH)]) == 0
    assert capsys.readouterr().out.startswith("p dagmc 10 1 1\n"), "IDs run up to t' = 10"


def test_parse_error_exit_code(write, capsys):
    assert run(["solve", write("bad.dagmc", "p dagmc 4 1 1\na 1 9\nt 1 4\n")]) == 2


def test_wrong_kind_exit_code(write):
    assert run(["oracle-w", write("p.dagmc", PATH)]) == 2, "a vertex instance is not a weighted one"


def test_missing_file_exit_code(tmp_path):
    assert run(["solve", str(tmp_path / "absent.dagmc")]) == 2


def test_guard_exit_code(write, monkeypatch):
    monkeypatch.setattr(oracle, "ORACLE_LIMIT", 0)
    assert run(["oracle", write("p.dagmc", PATH)]) == 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        run(["solve"])
    assert err.value.code == 2


def test_bench_writes_csv(tmp_path, capsys):
    code = run(["bench", "--count", "3", "--n", "4", "--r", "1", "--p", "1", "--out-dir", str(tmp_path)])
    assert code == 0, capsys.readouterr().out
    files = list(tmp_path.glob("bench_*.csv"))
    assert len(files) == 1
    df = pd.read_csv(files[0])
    assert len(df) == 3
    assert (df["solver"] == df["oracle"]).all()
    assert df["depth_ok"].all()


def test_gen_maxcut_piped_to_oracle_w(write, monkeypatch, capsys):
    """P2 has no cut with two edges."""
    assert run(["gen", "maxcut", "--graph", write("p2.graph", P2_GRAPH), "--cut", "2"]) == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(capsys.readouterr().out))
    assert run(["oracle-w", "-"]) == 0
    assert capsys.readouterr().out == "s NO\n"


def test_solve_is_byte_stable(write, capsys):
    inst = write("t.dagmc", "p dagmc 6 2 1\na 1 3\na 2 3\na 3 4\na 4 5\na 4 6\nt 1 5\nt 2 6\n")
    outputs = []
    for _ in range(2):
        assert run(["solve", inst, "--shadow", "random", "--seed", "9"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


class _LiveStderrHandler(logging.StreamHandler):
    """StreamHandler bound to whatever `sys.stderr` is at emit time (pytest swaps it per phase)."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


@pytest.fixture
def info_logging_to_stderr():
    """Root logger at INFO writing to the (captured) stderr, as `main()` sets it up."""
    root = logging.getLogger()
    handler = _LiveStderrHandler()
    previous = root.level
    root.addHandler(handler)
    root.setLevel(logging.INFO)
    yield
    root.removeHandler(handler)
    root.setLevel(previous)


def test_stats_on_stderr_is_pure_json(write, capsys, info_logging_to_stderr):
    """With logging on, a bare --stats still leaves stderr holding exactly one JSON object."""
    assert run(["solve", write("p.dagmc", PATH), "--stats"]) == 0
    stats = json.loads(capsys.readouterr().err)
    assert stats["nodes_expanded"] >= 1
    assert logging.getLogger("app").level == logging.NOTSET, "logger level restored after the run"


def test_stats_to_file(write, tmp_path, capsys, info_logging_to_stderr):
    target = tmp_path / "stats.json"
    assert run(["solve", write("d.dagmc", DIAMOND), "--stats", str(target)]) == 0
    captured = capsys.readouterr()
    assert captured.out == "s YES\nv 2\nv 3\n"
    assert "nodes_expanded" not in captured.err, "stats went to the file, not stderr"
    assert json.loads(target.read_text())["nodes_expanded"] >= 1


def test_internal_failure_exit_code(write, monkeypatch):
    """A cut that fails re-verification is a bug, not an input error."""
    monkeypatch.setattr(solver, "verify", lambda instance, cut: False)
    assert run(["solve", write("d.dagmc", DIAMOND)]) == 4
