"""Tests for the asuman-sim command line: outputs and exit codes."""

import csv
import io
import json

import pytest

import asuman_sim.validation as validation
from asuman_sim.cli.main import build_parser, main
from asuman_sim.types import CriterionResult


def _run(argv):
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    return exc_info.value.code


def _bound_values(text):
    """Map bound name to value from the text table."""
    rows = [line.split() for line in text.splitlines()[1:]]
    return {row[0]: float(row[2]) for row in rows}


class TestParser:
    def test_subcommands_registered(self):
        parser = build_parser()
        args = parser.parse_args(["bounds", "--list"])
        assert args.command == "bounds"
        assert callable(args.func)

    def test_no_command_prints_help(self, capsys):
        assert _run([]) == 0
        assert "usage:" in capsys.readouterr().out

    def test_usage_error_exits_1(self, capsys):
        assert _run(["simulate"]) == 1
        assert "--scenario" in capsys.readouterr().err

    def test_bad_log_level_exits_1(self):
        assert _run(["--log-level", "chatty", "bounds", "--list"]) == 1

    def test_bad_environment_exits_1(self, monkeypatch, capsys):
        monkeypatch.setenv("ASUMAN_SIM_JOBS", "0")
        assert _run(["bounds", "--list"]) == 1
        assert "ASUMAN_SIM_JOBS" in capsys.readouterr().err


class TestBoundsCommand:
    def test_single_bound(self, capsys):
        assert _run(["bounds", "asuman-limit", "--lambda-e", "2", "--lambda", "1"]) == 0
        assert _bound_values(capsys.readouterr().out) == {"asuman-limit": 5.0}

    def test_all_bounds(self, capsys):
        argv = ["bounds", "--all", "--lambda-e", "1", "--lambda", "1", "--n", "100", "--q", "0.5"]
        assert _run(argv + ["--c", "10", "--p", "0.5"]) == 0
        values = _bound_values(capsys.readouterr().out)
        assert values["asuman-limit"] == 3.0
        assert values["partial-ub"] == 11.0
        assert values["cluster-leaf-limit"] == 8.0
        assert values["disconnected-ub"] == 13.0

    def test_json_format(self, capsys):
        argv = ["bounds", "ring-lb", "--lambda-e", "1", "--lambda", "1", "--n", "60", "--format", "json"]
        assert _run(argv) == 0
        data = json.loads(capsys.readouterr().out)
        assert data[0]["name"] == "ring-lb"
        assert data[0]["value"] == pytest.approx(20.0)
        assert data[0]["kind"] == "lower"

    def test_list(self, capsys):
        assert _run(["bounds", "--list"]) == 0
        names = capsys.readouterr().out.split()
        assert "asuman-limit" in names and "ring-cluster-ub" in names

    def test_missing_lambda_exits_1(self, capsys):
        assert _run(["bounds", "asuman-limit", "--lambda-e", "1"]) == 1
        assert "--lambda" in capsys.readouterr().err

    def test_missing_bound_parameter_exits_1(self, capsys):
        assert _run(["bounds", "partial-ub", "--lambda-e", "1", "--lambda", "1"]) == 1
        assert "--q" in capsys.readouterr().err

    def test_recurrence_csv(self, capsys):
        argv = ["bounds", "--recurrence", "min_age", "--lambda-e", "1", "--lambda", "1"]
        assert _run(argv + ["--k-max", "5", "-r", "100", "--format", "csv"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["k", "mean", "stderr"]
        assert len(rows) == 7
        assert float(rows[2][1]) == 1.0

    def test_output_file(self, tmp_path):
        out = tmp_path / "bounds.csv"
        argv = ["bounds", "asuman-limit", "--lambda-e", "1", "--lambda", "1", "--format", "csv", "--out", str(out)]
        assert _run(argv) == 0
        assert out.read_text().splitlines()[1].startswith("asuman-limit,limit,3.0")

    def test_unwritable_output_exits_2(self, tmp_path):
        out = tmp_path / "missing-dir" / "bounds.txt"
        assert _run(["bounds", "asuman-limit", "--lambda-e", "1", "--lambda", "1", "--out", str(out)]) == 2


class TestSimulateCommand:
    def test_csv_output(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=40, replications=2)
        assert _run(["simulate", "--scenario", str(path)]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [r["node_id"] for r in rows] == ["0", "1", "2", "3", "network"]
        assert all(r["policy"] == "asuman" and r["replications"] == "2" for r in rows)
        assert all(float(r["mean_age"]) >= 0 for r in rows)

    def test_overrides_and_json(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=40, replications=2)
        argv = ["simulate", "-s", str(path), "--seed", "5", "-r", "3", "--epochs", "30", "--format", "json"]
        assert _run(argv) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["replications"] == 3
        assert data["seed"] == 5
        assert len(data["nodes"]) == 4

    def test_text_output_has_summary_line(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=30, replications=2)
        assert _run(["simulate", "-s", str(path), "--format", "text"]) == 0
        first = capsys.readouterr().out.splitlines()[0]
        assert first.startswith("complete n=4 policy=asuman lambda_e=")
        assert "{" not in first

    def test_gnuplot_header(self, write_scenario, capsys):
        path = write_scenario(n=3, epochs=20, replications=1)
        assert _run(["simulate", "-s", str(path), "--gnuplot-header"]) == 0
        assert capsys.readouterr().out.startswith("# 1:n 2:policy")

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert _run(["simulate", "--scenario", str(path)]) == 1
        assert "malformed JSON" in capsys.readouterr().err

    def test_invalid_scenario_lists_violations(self, write_scenario, capsys):
        path = write_scenario({"topology": {"n": 4}, "rates": {"lambda": -1}})
        assert _run(["simulate", "--scenario", str(path)]) == 1
        assert "asuman-sim:" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert _run(["simulate", "--scenario", str(tmp_path / "absent.json")]) == 2

    def test_bad_override_exits_1(self, write_scenario):
        path = write_scenario(n=4, epochs=40)
        assert _run(["simulate", "-s", str(path), "--replications", "0"]) == 1


class TestSweepCommand:
    def test_blocks_per_value(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=30, replications=2)
        assert _run(["sweep", "--scenario", str(path), "n=4,5"]) == 0
        blocks = capsys.readouterr().out.split("\n\n\n")
        assert len(blocks) == 2
        assert blocks[0].startswith("# n=4\n")
        assert blocks[1].startswith("# n=5\n")
        assert blocks[1].count(",network,") == 1

    def test_flag_form_and_json(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=30, replications=1)
        assert _run(["sweep", "-s", str(path), "--sweep", "n=4,6", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert [(d["parameter"], d["value"], d["n"]) for d in data] == [("n", 4.0, 4), ("n", 6.0, 6)]

    def test_range_form(self, write_scenario, capsys):
        path = write_scenario(n=4, epochs=30, replications=1)
        assert _run(["sweep", "-s", str(path), "n=4:6:2", "--format", "json"]) == 0
        assert [d["n"] for d in json.loads(capsys.readouterr().out)] == [4, 6]

    def test_unknown_parameter_exits_1(self, write_scenario):
        assert _run(["sweep", "--scenario", str(write_scenario()), "x=1,2"]) == 1

    def test_missing_sweep_exits_1(self, write_scenario):
        assert _run(["sweep", "--scenario", str(write_scenario())]) == 1


class TestValidateCommand:
    def _patch(self, monkeypatch, passed):
        def fake(level, *, seed, jobs, only, spinner):
            return [CriterionResult(10, "bounds golden values", passed, {"golden_failed": 0 if passed else 1})]

        monkeypatch.setattr(validation, "run_validation", fake)

    def test_pass_exits_0(self, monkeypatch, capsys):
        self._patch(monkeypatch, True)
        assert _run(["validate"]) == 0
        out = capsys.readouterr().out
        assert "[PASS] 10 bounds golden values" in out
        assert "1/1 criteria passed" in out

    def test_failure_exits_3(self, monkeypatch, capsys):
        self._patch(monkeypatch, False)
        assert _run(["validate", "--format", "json"]) == 3
        data = json.loads(capsys.readouterr().out)
        assert data[0]["status"] == "FAIL"

    def test_bad_only_exits_1(self):
        assert _run(["validate", "--only", "11"]) == 1

    @pytest.mark.slow
    def test_golden_criterion_passes(self):
        [result] = validation.run_validation("quick", seed=1, only=[10])
        assert result.passed, result.detail

    @pytest.mark.slow
    def test_property_suite_reports_json(self, capsys):
        assert _run(["validate", "--only", "9", "--format", "json"]) == 0
        [entry] = json.loads(capsys.readouterr().out)
        assert entry["status"] == "PASS"
        assert all(key.startswith("events[") for key in entry["measured"])
