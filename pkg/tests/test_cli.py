"""Test the command-line interface."""

import json
import re
import shutil
import subprocess
from pathlib import Path

import pytest

import ggcheck
from ggcheck.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_PROVED, main, report_row
from ggcheck.criteria import Level, Verdict, replay_trace
from ggcheck.gp import BEGIN, END, VERSION

DATA = Path(ggcheck.__file__).parent / "data"


class TestCheck:
    def test_bundled_path(self, capsys):
        """A bundled record proves GGC and names every criterion consulted."""
        assert main(["check", str(DATA / "971.json")]) == EXIT_PROVED
        out = capsys.readouterr().out
        assert out.startswith("p=3 d=971: GGC holds")
        assert "[weak-ggc-valuation] WeakGGCHolds" in out
        assert "reading: exponent" in out

    def test_bundled_by_key(self, capsys):
        """--p and --d select a bundled record."""
        assert main(["check", "--p", "3", "--d", "5069"]) == EXIT_PROVED
        assert "[capitulation] LambdaZero" in capsys.readouterr().out

    def test_wrong_prime(self, capsys):
        """Test that --p must match the bundled record."""
        assert main(["check", "--p", "5", "--d", "971"]) == EXIT_ERROR
        assert capsys.readouterr().err.startswith("ggcheck: error:")

    def test_missing_file(self, tmp_path, capsys):
        """Test a record path that does not exist."""
        assert main(["check", str(tmp_path / "nothing.json")]) == EXIT_ERROR
        assert "ggcheck: error:" in capsys.readouterr().err

    def test_invalid_record(self, tmp_path, capsys):
        """Schema errors are reported with their pointer."""
        path = tmp_path / "bad.json"
        data = json.loads((DATA / "971.json").read_text())
        data["s_exp"] = 3
        path.write_text(json.dumps(data))
        assert main(["check", str(path)]) == EXIT_ERROR
        assert "/s_exp" in capsys.readouterr().err

    def test_inconclusive(self, tmp_path, capsys):
        """An inconclusive verdict exits with status 2 and names the failure."""
        path = tmp_path / "971.json"
        data = json.loads((DATA / "971.json").read_text())
        data["char_T"] = {"prec_exp": 5, "coeffs": [0, 3, 1]}
        path.write_text(json.dumps(data))
        assert main(["check", str(path)]) == EXIT_INCONCLUSIVE
        out = capsys.readouterr().out
        assert out.startswith("p=3 d=971: inconclusive")
        assert "  first failure: vp(g0(0))=1 does not exceed s=1" in out

    def test_json(self, capsys):
        """The JSON verdict reloads and replays to the same level."""
        assert main(["check", str(DATA / "17291.json"), "--format", "json"]) == EXIT_PROVED
        data = json.loads(capsys.readouterr().out)
        assert (data["p"], data["d"]) == (3, 17291)
        verdict = Verdict.from_dict(data["verdict"])
        assert verdict.level == Level.GGC_HOLDS
        assert replay_trace(verdict.trace) == Level.GGC_HOLDS

    def test_fetch(self, monkeypatch, capsys):
        """Engine data alone cannot decide without the characteristic polynomial."""
        answers = {"class_group": "cyc [3]", "aux_class_number": "real_quad 7"}

        def run(cmd, input, **kwargs):
            assert cmd[0] == "gp-test"
            task = re.search(rf"{BEGIN} (\w+)", input).group(1)
            stdout = f"{VERSION} 2.15.4\n{BEGIN} {task}\n{answers[task]}\n{END}\n"
            return subprocess.CompletedProcess(cmd, 0, stdout, "")

        monkeypatch.setattr("ggcheck.gp.subprocess.run", run)
        argv = ["check", "--p", "3", "--d", "971", "--fetch", "--engine-path", "gp-test"]
        assert main(argv) == EXIT_INCONCLUSIVE
        assert "char_T" in capsys.readouterr().out

    def test_engine_missing(self, monkeypatch, capsys):
        """A missing engine is an error."""

        def run(*args, **kwargs):
            raise FileNotFoundError("gp-test")

        monkeypatch.setattr("ggcheck.gp.subprocess.run", run)
        assert main(["fetch", "--p", "3", "--d", "971", "--engine-path", "gp-test"]) == EXIT_ERROR
        assert "gp-test" in capsys.readouterr().err


class TestAlgebra:
    @pytest.mark.parametrize(
        "argv, expected",
        [
            (["invariants", "--p", "3", "--prec", "11", "--coeffs", "0,64638,1"], "mu=0 lambda=2 g0_val=5"),
            (["invariants", "--p", "5", "--prec", "4", "--coeffs", "5,1"], "mu=0 lambda=1"),
            (
                ["newton", "--p", "3", "--prec", "7", "--coeffs", "522,72,405,1"],
                "single segment slope -2/3: irreducible",
            ),
            (["newton", "--p", "3", "--prec", "4", "--coeffs", "0,1"], "degree 1: irreducible"),
            (
                ["hensel", "--p", "3", "--prec", "11", "--coeffs", "0,64638,1", "--root", "-64638"],
                "243 mod 3^6",
            ),
            (["nu", "--p", "3", "--m", "1"], "S^2 + 3*S + 3 (mod 3^10)"),
        ],
    )
    def test_operations(self, argv, expected, capsys):
        """Test the text output of the algebra operations."""
        assert main(["algebra", *argv]) == EXIT_PROVED
        assert capsys.readouterr().out.strip() == expected

    def test_prepare(self, capsys):
        """A distinguished polynomial prepares to itself with mu = 0."""
        assert main(["algebra", "prepare", "--p", "3", "--prec", "11", "--coeffs", "0,64638,1"]) == 0
        assert capsys.readouterr().out.startswith("mu=0 lambda=2\nP = ")

    def test_det(self, capsys):
        """det(T I - [[0, 1], [1, 0]]) = T^2 - 1 modulo 3^10."""
        assert main(["algebra", "det", "--p", "3", "--matrix", "0 1;1 0"]) == EXIT_PROVED
        assert capsys.readouterr().out.startswith("T^2 + 59048")

    def test_json(self, capsys):
        """Test the JSON output of an algebra operation."""
        argv = ["algebra", "newton", "--p", "3", "--prec", "7", "--coeffs", "522,72,405,1", "--format", "json"]
        assert main(argv) == EXIT_PROVED
        data = json.loads(capsys.readouterr().out)
        assert data["slopes"] == ["-2/3"]
        assert data["decision"] == "irreducible"

    def test_bad_coefficients(self, capsys):
        """Test that coefficients must be exact integers."""
        assert main(["algebra", "invariants", "--p", "3", "--prec", "4", "--coeffs", "1,,2"]) == EXIT_ERROR
        assert capsys.readouterr().err.startswith("ggcheck: error:")


class TestReport:
    def test_report_rows(self, records, data_regression):
        """Summary values of the bundled records."""
        rows = [report_row(records[d]) for d in (971, 5069, 17291, 2239)]
        data_regression.check({"rows": rows})

    def test_bundled(self, capsys):
        """Without globs the bundled records are reported in (p, d) order."""
        assert main(["report"]) == EXIT_PROVED
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "| p | d | λ_cyc | μ | g0_val | s | p-rational | verdict |"
        assert lines[2] == "| 3 | 971 | 2 | 0 | 5 | 1 | no | GGC |"
        assert [line.split(" | ")[1] for line in lines[2:]] == ["971", "5069", "17291", "2239"]

    def test_no_records(self, tmp_path, capsys):
        """A glob matching nothing is an error."""
        assert main(["report", str(tmp_path / "*.json")]) == EXIT_ERROR
        assert "no record" in capsys.readouterr().err

    def test_error_rows(self, tmp_path, capsys):
        """Unreadable records are listed last as inconclusive errors."""
        shutil.copy(DATA / "2239.json", tmp_path / "2239.json")
        (tmp_path / "broken.json").write_text("{")
        assert main(["report", str(tmp_path / "*.json"), "--jobs", "2"]) == EXIT_PROVED
        lines = capsys.readouterr().out.splitlines()
        assert lines[2] == "| 5 | 2239 | 2 | 0 | 2 | 1 | no | GGC |"
        assert lines[3].startswith("| - | ")
        assert lines[3].endswith("broken.json | - | - | - | - | - | Inconclusive (error) |")

    def test_only_errors(self, tmp_path, capsys):
        """A report where every record fails is an error."""
        (tmp_path / "broken.json").write_text("{")
        assert main(["report", str(tmp_path / "*.json")]) == EXIT_ERROR


class TestSurvey:
    def test_survey(self, capsys):
        """Test listing the candidate fields for p = 3."""
        assert main(["survey", "--p", "3", "--d-max", "20"]) == EXIT_PROVED
        assert capsys.readouterr().out.strip() == "2 5 11 14 17"

    def test_survey_json(self, capsys):
        """Test the JSON output of a congruence-restricted survey."""
        argv = ["survey", "--p", "3", "--d-max", "20", "--residue", "2", "--modulus", "4", "--format", "json"]
        assert main(argv) == EXIT_PROVED
        assert json.loads(capsys.readouterr().out) == [2, 14]
