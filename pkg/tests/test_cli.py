"""Command-line interface, report determinism, and the exit-status contract."""

import json

import pytest

from qglab.cli import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_PASS, main
from qglab.report import CheckRecord, CheckReport, format_float
from qglab.suites import SUITE_NAMES, RunConfig, run_suites
from qglab.tensorlin import DimensionCapError


class TestRunSuites:
    def test_determinism_byte_identical(self):
        cfg = RunConfig(
            group_source="Z3",
            suites=("thm33",),
            epsilons=(0.1,),
            seed=7,
            draws=10,
            bound_draws=10,
        )
        first = run_suites(cfg).to_json_bytes()
        second = run_suites(cfg).to_json_bytes()
        assert first == second

    def test_seed_changes_report(self):
        base = dict(group_source="Z3", suites=("thm33",), epsilons=(0.1,), draws=5, bound_draws=5)
        a = run_suites(RunConfig(seed=1, **base)).to_json_bytes()
        b = run_suites(RunConfig(seed=2, **base)).to_json_bytes()
        assert a != b

    def test_empty_suite_list(self):
        report = run_suites(RunConfig(group_source="Z2", suites=()))
        assert report.records == []
        assert report.all_passed

    def test_every_record_has_anchor(self):
        cfg = RunConfig(group_source="Z2", seed=3, draws=5, bound_draws=5, theta_draws=3)
        report = run_suites(cfg)
        assert report.records
        for record in report.records:
            assert record.anchor

    def test_unknown_suite_rejected(self):
        with pytest.raises(ValueError):
            run_suites(RunConfig(group_source="Z2", suites=("nonsense",)))

    def test_unknown_construction_rejected(self):
        with pytest.raises(ValueError):
            run_suites(RunConfig(group_source="Z2", construction="sideways", suites=("structure",)))

    def test_dimension_cap(self, monkeypatch):
        monkeypatch.setenv("QGLAB_MAX_DIM", "27")
        with pytest.raises(DimensionCapError):
            run_suites(RunConfig(group_source="Z4", suites=("lemma32",)))
        # structure is a two-leg suite: allowed up to twice the three-leg cap
        report = run_suites(RunConfig(group_source="Z4", suites=("structure",)))
        assert report.all_passed
        # the three-leg entries were skipped under the cap
        checks = {r.check for r in report.records}
        assert "pentagonal" not in checks

    def test_single_construction(self):
        cfg = RunConfig(
            group_source="Z2", construction="function-algebra", suites=("structure",)
        )
        report = run_suites(cfg)
        assert {r.construction for r in report.records} == {"function-algebra"}


class TestReportFormat:
    def test_float_formatting_17_digits(self):
        assert format_float(1.0 / 3.0) == f"{1.0 / 3.0:.17g}"
        assert float(format_float(1.2345678901234567e-11)) == 1.2345678901234567e-11

    def test_pass_iff_within_tolerance(self):
        good = CheckRecord("s", "c", "g", "fa", "anchor", residual=1e-12, tolerance=1e-10)
        bad = CheckRecord("s", "c", "g", "fa", "anchor", residual=1e-8, tolerance=1e-10)
        assert good.passed and not bad.passed

    def test_informational_records_pass(self):
        rec = CheckRecord("s", "c", "g", "fa", "anchor", residual=0.5)
        assert rec.passed

    def test_json_schema(self):
        cfg = RunConfig(group_source="Z2", suites=("structure",), seed=5)
        payload = run_suites(cfg).to_json_bytes()
        obj = json.loads(payload)
        assert set(obj) == {"version", "seed", "records", "summary"}
        assert obj["seed"] == 5
        record = obj["records"][0]
        for key in ("suite", "check", "group", "construction", "anchor", "residual", "pass"):
            assert key in record
        assert isinstance(record["residual"], str)
        assert obj["summary"]["total"] == len(obj["records"])

    def test_records_sorted(self):
        cfg = RunConfig(group_source="Z2", suites=("structure", "lemma42"), seed=5, draws=5)
        obj = json.loads(run_suites(cfg).to_json_bytes())
        keys = [
            (r["suite"], r["group"], r["construction"], r["check"]) for r in obj["records"]
        ]
        assert keys == sorted(keys)

    def test_summary_counts(self):
        report = CheckReport(seed=0)
        report.add(CheckRecord("s", "a", "g", "fa", "x", residual=0.0, tolerance=1.0))
        report.add(CheckRecord("s", "b", "g", "fa", "x", residual=2.0, tolerance=1.0))
        assert report.summary() == {"total": 2, "passed": 1, "failed": 1}
        assert not report.all_passed


class TestCli:
    def test_verify_builtin_to_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            [
                "verify",
                "--group", "Z2",
                "--suites", "structure",
                "--seed", "3",
                "--out", str(out),
            ]
        )
        assert code == EXIT_PASS
        obj = json.loads(out.read_bytes())
        assert obj["summary"]["failed"] == 0

    def test_verify_stdout(self, capsys):
        code = main(["verify", "--group", "Z2", "--suites", "structure", "--seed", "3"])
        assert code == EXIT_PASS
        obj = json.loads(capsys.readouterr().out)
        assert obj["summary"]["total"] > 0

    def test_repeat_runs_identical_bytes(self, tmp_path):
        args = [
            "verify",
            "--group", "Z3",
            "--suites", "thm33",
            "--epsilons", "0.1",
            "--seed", "7",
            "--draws", "10",
            "--bound-draws", "10",
        ]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(out1)]) == EXIT_PASS
        assert main(args + ["--out", str(out2)]) == EXIT_PASS
        assert out1.read_bytes() == out2.read_bytes()

    def test_input_error_exit_code(self, capsys):
        assert main(["verify", "--group", "NoSuchGroup"]) == EXIT_INPUT_ERROR
        assert "error" in capsys.readouterr().err

    def test_invalid_table_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"name":"bad","order":2,"table":[[0,1],[1,1]]}')
        assert main(["verify", "--group", str(bad)]) == EXIT_INPUT_ERROR

    def test_unknown_suite_exit_code(self, capsys):
        assert main(["verify", "--group", "Z2", "--suites", "bogus"]) == EXIT_INPUT_ERROR

    def test_check_failure_exit_code(self):
        # a negative tolerance override makes every nonnegative residual fail
        code = main(
            [
                "verify",
                "--group", "Z4",
                "--suites", "structure",
                "--seed", "1",
                "--tol", "-1",
                "--out", "/dev/null",
            ]
        )
        assert code == EXIT_CHECK_FAILED

    def test_group_file_roundtrip(self, tmp_path):
        table = {"name": "V4", "order": 4,
                 "table": [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]}
        path = tmp_path / "v4.json"
        path.write_text(json.dumps(table))
        code = main(["verify", "--group", str(path), "--suites", "structure,obad", "--seed", "2"])
        assert code == EXIT_PASS

    def test_all_suite_names_accepted(self):
        assert set(SUITE_NAMES) == {
            "structure", "lemma32", "lemma42", "lemma43", "theta",
            "thm33", "obad", "dual", "thm44",
        }
