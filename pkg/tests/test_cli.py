import json
import os

import pytest

from curvlab.cli import main
from curvlab.report import Check, VerificationReport


class TestExitCodes:
    def test_passing_suite_exits_zero(self, capsys):
        assert main(["verify", "--suite", "berger", "--t", "4",
                     "--exact"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "=> PASS" in out

    def test_failing_tolerance_exits_one(self, capsys):
        code = main(["verify", "--suite", "thm_invariance",
                     "--model", "random4", "--trials", "1", "--seed", "3",
                     "--tol", "1e-30"])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_unknown_suite_exits_two(self, capsys):
        assert main(["verify", "--suite", "bogus"]) == 2

    def test_unknown_model_exits_two(self):
        assert main(["verify", "--suite", "thm_invariance",
                     "--model", "mystery"]) == 2

    def test_exact_with_irrational_t_exits_two(self, capsys):
        code = main(["verify", "--suite", "berger", "--t", "2", "--exact"])
        assert code == 2
        assert "sqrt" in capsys.readouterr().err

    def test_bad_rational_exits_two(self):
        assert main(["verify", "--suite", "berger", "--t", "4/0"]) == 2


class TestJsonReport:
    def test_deterministic_given_seed(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        args = ["verify", "--suite", "thm_invariance", "--model", "random4",
                "--trials", "2", "--seed", "9"]
        assert main(args + ["--json", str(p1)]) == 0
        assert main(args + ["--json", str(p2)]) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_schema_fields(self, tmp_path):
        path = tmp_path / "rep.json"
        main(["verify", "--suite", "berger", "--t", "4", "--json", str(path)])
        data = json.loads(path.read_text())
        assert data["schema"] == 1
        assert data["suite"] == "berger"
        assert data["pass"] is True
        names = [c["name"] for c in data["checks"]]
        assert names == sorted(names)

    def test_residuals_reported_even_on_pass(self, tmp_path):
        path = tmp_path / "rep.json"
        main(["verify", "--suite", "thm_invariance", "--model", "random4",
              "--trials", "1", "--seed", "2", "--json", str(path)])
        data = json.loads(path.read_text())
        assert all("residual" in c for c in data["checks"])


class TestModelConfigPath:
    def test_config_file_model(self, tmp_path):
        cfg = {
            "kind": "chart", "dim": 4, "jet_order": 3,
            "base_point": ["0", "0", "0", "0"],
            "metric": [
                [{"num": {"0,0,0,0": "1" if i == j else "0"}}
                 for j in range(4)] for i in range(4)
            ],
        }
        path = tmp_path / "flat.json"
        path.write_text(json.dumps(cfg))
        assert main(["verify", "--suite", "thm_invariance",
                     "--model", str(path), "--trials", "1"]) == 0

    def test_broken_config_exits_two(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["verify", "--suite", "thm_invariance",
                     "--model", str(path), "--trials", "1"]) == 2


class TestReportObject:
    def test_table_and_flags(self):
        rep = VerificationReport("s", "m", 1)
        rep.add(Check("a", True, 1e-9, 1e-8))
        rep.add(Check("b", True, exact=True))
        assert rep.passed and rep.max_residual() == 1e-9
        txt = rep.table()
        assert "exact" in txt and "residual" in txt
        rep.add(Check("c", False, 1.0, 1e-8))
        assert not rep.passed
