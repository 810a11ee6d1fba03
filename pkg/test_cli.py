#!/usr/bin/env python3
"""Command-line surface: exit codes, output formats, determinism and the verify harness."""

import csv
import io
import json

import pytest

import harness.runner as runner
from core.errors import InvariantViolation
from core.generator import enumeration_size
from main import main
from utils.config import default_config, load_config

SINGLE_LOOP = {"kind": "discounted", "lambda": [1, 2],
               "nodes": [{"id": "a", "owner": "max"}],
               "edges": [{"from": "a", "to": "a", "weight": [1, 1]}]}
ZERO_CYCLE = {"kind": "energy",
              "nodes": [{"id": "a", "owner": "max"}, {"id": "b", "owner": "min"}],
              "edges": [{"from": "a", "to": "b", "weight": [1, 1]}, {"from": "b", "to": "a", "weight": [-1, 1]}]}


@pytest.fixture
def game_file(tmp_path):
    def write(doc, name="game.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture(autouse=True)
def trace_dir(tmp_path, monkeypatch):
    target = tmp_path / "traces"
    monkeypatch.setenv("POLYVAL_TRACE_DIR", str(target))
    return target


def test_solve_discounted(game_file, capsys):
    assert main(["solve", "--in", game_file(SINGLE_LOOP)]) == 0
    assert capsys.readouterr().out == '{"values":{"a":[2,1]}}\n'


def test_solve_energy(game_file, capsys):
    assert main(["solve", "--in", game_file(ZERO_CYCLE), "--realize", "vertex"]) == 0
    assert json.loads(capsys.readouterr().out) == {"w_max": ["a", "b"], "w_min": []}


def test_solve_with_certificate_and_record(game_file, tmp_path, capsys):
    record = tmp_path / "record.json"
    assert main(["solve", "--in", game_file(ZERO_CYCLE), "--certificate", "--record", str(record)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["certificate"]["decisions"] == []
    saved = json.loads(record.read_text(encoding="utf-8"))
    assert saved["kind"] == "energy" and saved["iterations"] == 0
    assert len(saved["input_digest"]) == 64


def test_sink_node_is_an_input_error(game_file, capsys):
    broken = {"kind": "energy", "nodes": [{"id": "a", "owner": "max"}, {"id": "lonely", "owner": "min"}],
              "edges": [{"from": "a", "to": "lonely", "weight": [1, 1]}]}
    assert main(["solve", "--in", game_file(broken)]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "lonely" in captured.err


def test_malformed_input(game_file, tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["solve", "--in", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_internal_failure_dumps_trace(game_file, trace_dir, monkeypatch, capsys):
    def broken_solver(spec, options):
        raise InvariantViolation("optimal edge lost", "edge #0", {"edge": 0})

    monkeypatch.setattr(runner, "solve_game", broken_solver)
    assert main(["solve", "--in", game_file(ZERO_CYCLE)]) == 3
    assert "trace dump" in capsys.readouterr().err
    assert len(list(trace_dir.glob("*.trace.json"))) == 1


def test_decide_mean_payoff(game_file, capsys):
    assert main(["decide-mp", "--in", game_file(ZERO_CYCLE), "--threshold", "1/2"]) == 0
    assert json.loads(capsys.readouterr().out) == {"w_max": [], "w_min": ["a", "b"]}
    assert main(["decide-mp", "--in", game_file(ZERO_CYCLE), "--threshold", "0"]) == 0
    assert json.loads(capsys.readouterr().out) == {"w_max": ["a", "b"], "w_min": []}


def test_decide_mean_payoff_defaults_energy_threshold_to_zero(game_file, capsys):
    gaining = {"kind": "energy", "nodes": [{"id": "a", "owner": "max"}],
               "edges": [{"from": "a", "to": "a", "weight": [3, 1]}]}
    assert main(["decide-mp", "--in", game_file(gaining)]) == 0
    assert json.loads(capsys.readouterr().out) == {"w_max": ["a"], "w_min": []}


def test_solve_empty_game(game_file, capsys):
    empty = {"kind": "discounted", "lambda": [1, 2], "nodes": [], "edges": []}
    assert main(["solve", "--in", game_file(empty)]) == 0
    assert capsys.readouterr().out == '{"values":{}}\n'


@pytest.mark.parametrize("value", ["0.5", "1e-3"])
def test_decimal_threshold_is_rejected(game_file, value):
    with pytest.raises(SystemExit) as excinfo:
        main(["decide-mp", "--in", game_file(ZERO_CYCLE), "--threshold", value])
    assert excinfo.value.code == 2


def test_default_cap_admits_three_node_sweep():
    sizes = [enumeration_size(n, [-1, 0, 1], 2) for n in (1, 2, 3)]
    assert sizes[-1] == 1_259_712
    for config in (default_config(), load_config()):
        assert max(sizes) <= config["generator"]["enumeration_cap"]


def test_gen_is_deterministic(capsys):
    argv = ["gen", "--n", "4", "--count", "3", "--seed", "42"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert len(first.splitlines()) == 3


def test_gen_to_directory(tmp_path):
    target = tmp_path / "games"
    assert main(["gen", "--n", "3", "--count", "2", "--out", str(target), "--kind", "discounted"]) == 0
    manifest = json.loads((target / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["generator"] == "numpy-pcg64/v1"
    assert manifest["config"]["lambda"] == "1/2"
    assert sorted(p.name for p in target.glob("game_*.json")) == ["game_0.json", "game_1.json"]


def test_bench_rows_stay_under_bound(capsys):
    argv = ["bench", "--n-min", "2", "--n-max", "4", "--count", "3", "--seed", "9"]
    assert main(argv) == 0
    text = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 9
    assert all(float(row["ratio"]) <= 1 for row in rows)
    assert main(argv) == 0
    assert capsys.readouterr().out == text


def test_bench_without_instances_prints_header(capsys):
    assert main(["bench", "--count", "0"]) == 0
    assert capsys.readouterr().out == "n,instance,kind,nodes,iterations,bound,ratio\n"


def test_bench_timing_column(capsys):
    assert main(["bench", "--n-min", "2", "--n-max", "2", "--count", "1", "--timing", "on"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.endswith(",wall_ms")


def test_stats_summary(capsys):
    assert main(["stats", "--n-min", "2", "--n-max", "3", "--count", "4", "--kind", "discounted"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert [entry["n"] for entry in summary] == [2, 3]
    assert all(entry["count"] == 4 and entry["max_ratio"] <= 1 and entry["monitor_passed"]
               for entry in summary)


def test_verify_exhaustive_discounted(capsys):
    argv = ["verify", "--exhaustive", "--n", "2", "--max-out", "1", "--weights=-1,0,1", "--kind", "discounted"]
    assert main(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["instances"] == 2 * 3 + 4 * 36


def test_verify_exhaustive_over_cap_is_an_input_error(capsys):
    assert main(["verify", "--exhaustive", "--n", "4", "--max-out", "2", "--kind", "discounted"]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "exceeds cap" in captured.err


def test_verify_streams_in_batches(monkeypatch, capsys):
    monkeypatch.setattr(runner, "VERIFY_BATCH", 2)
    assert main(["verify", "--n", "3", "--count", "5", "--seed", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["instances"] == 5
    assert [v["index"] for v in report["verdicts"]] == [0, 1, 2, 3, 4]


def test_verify_directory(tmp_path, capsys):
    target = tmp_path / "games"
    assert main(["gen", "--n", "3", "--count", "4", "--out", str(target)]) == 0
    capsys.readouterr()
    assert main(["verify", "--in", str(target)]) == 0
    assert json.loads(capsys.readouterr().out)["instances"] == 4


def test_monitor_does_not_change_verdicts(capsys):
    verdicts = []
    for flag in ("on", "off"):
        assert main(["verify", "--n", "2", "--max-n", "5", "--count", "15", "--seed", "4", "--monitor", flag]) == 0
        verdicts.append([v["match"] for v in json.loads(capsys.readouterr().out)["verdicts"]])
    assert verdicts[0] == verdicts[1]


def test_corrupted_solver_is_caught(trace_dir, monkeypatch, capsys):
    real = runner.solve_game

    def flipped(spec, options):
        output, iterations, bound, report = real(spec, options)
        output["w_max"], output["w_min"] = output["w_min"], output["w_max"]
        return output, iterations, bound, report

    monkeypatch.setattr(runner, "solve_game", flipped)
    assert main(["verify", "--n", "3", "--count", "5", "--seed", "1"]) == 3
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is False
    assert "witness game" in captured.err
    assert len(list(trace_dir.glob("*.game.json"))) == 1


def test_bad_flag_values_exit_two(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["gen", "--seed", "-5"])
    assert excinfo.value.code == 2


if __name__ == "__main__":
    pytest.main([__file__])
