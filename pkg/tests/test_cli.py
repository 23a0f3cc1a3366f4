import csv
import json
import subprocess
import sys

import pytest

from ecs_qfi import cli
from ecs_qfi.cli import CSV_HEADER, ConfigError, main, parse_alpha, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParsing:
    def test_range_is_stop_inclusive(self):
        grid = parse_grid("0:1:0.01")
        assert len(grid) == 101 and grid[-1] == 1.0 and grid[7] == 0.07

    def test_list(self):
        assert parse_grid("0.5, 0.1") == [0.5, 0.1]
        assert parse_grid("") == []

    @pytest.mark.parametrize("text", ["0:1:0", "0:1:-0.1", "1:0:0.1", "0,1.2", "a:b:c"])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)

    def test_alpha(self):
        assert parse_alpha("2") == 2
        assert parse_alpha("1+1j") == 1 + 1j
        assert parse_alpha("2", phase=3.141592653589793) == pytest.approx(-2)
        with pytest.raises(ConfigError):
            parse_alpha("two")


class TestSweep:
    def test_default_grid(self, tmp_path, capsys):
        out = tmp_path / "a.csv"
        assert run(capsys, "sweep", "--alpha", "2", "--out", str(out))[0] == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == CSV_HEADER
        assert len(rows) == 102
        f = [float(r[2]) for r in rows[1:]]
        assert all(b < a for a, b in zip(f, f[1:-1]))
        assert f[-1] == 0.0 and rows[-1][-1] == "full_loss"
        assert float(rows[1][2]) == 23.85093426032246

    def test_byte_identical(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            run(capsys, "sweep", "--alpha", "1.5", "--r", "0:1:0.05", "--out", str(p))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_vacuum_input(self, capsys):
        code, out, _ = run(capsys, "sweep", "--alpha", "0", "--r", "0:0.5:0.1")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert len(rows) == 6
        assert all(float(r["F"]) == 0.0 and r["flags"] == "degenerate" for r in rows)

    @pytest.mark.parametrize("grid", ["0:1:0", "0:1:-0.5"])
    def test_bad_step(self, capsys, grid):
        code, _, err = run(capsys, "sweep", "--alpha", "2", "--r", grid)
        assert code == 2 and "step" in err

    def test_json(self, capsys):
        code, out, _ = run(capsys, "sweep", "--alpha", "2", "--r", "0,0.07,0.52", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert [r["R"] for r in rows] == [0.0, 0.07, 0.52]
        assert rows[0]["flags"] == ["lossless"]

    def test_argparse_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sweep"])
        assert exc.value.code == 2


class TestVerify:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--alpha", "2", "--r", "0:0.9:0.1")
        assert code == 0
        report = json.loads(out)
        assert report["passed"] and report["max_rel_error"] < 1e-6
        assert report["max_eig_error"] < 1e-9
        assert len(report["points"]) == 10

    def test_truncation_too_small(self, capsys):
        code, _, err = run(capsys, "verify", "--alpha", "2", "--truncation", "5")
        assert code == 3 and "R=" in err

    def test_empty_grid(self, capsys):
        assert run(capsys, "verify", "--alpha", "2", "--r", "")[0] == 2

    def test_threshold_violation(self, capsys, monkeypatch):
        # the tail guard keeps real runs far below 1e-6, so force a violation
        monkeypatch.setattr(cli, "QFI_REL_TOL", 0.0)
        code, out, err = run(capsys, "verify", "--alpha", "1.5", "--r", "0,0.5")
        report = json.loads(out)
        assert code == 1 and not report["passed"]
        assert "worst point" in err

    def test_dimension_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("QFI_MAX_DIM", "100")
        assert run(capsys, "verify", "--alpha", "2", "--r", "0.5")[0] == 3


class TestCrossings:
    def test_alpha_two(self, capsys):
        code, out, _ = run(capsys, "crossings", "--alpha", "2")
        assert code == 0
        rep = json.loads(out)
        for name, target in (("R_A", 0.03), ("R_B", 0.07), ("R_C", 0.52)):
            assert abs(rep[name] - target) <= 0.01
            assert abs(float(rep["residuals"][name])) < 1e-9
            assert rep["absent"][name] is False

    def test_tight_tolerance(self, capsys):
        rep = json.loads(run(capsys, "crossings", "--alpha", "2", "--tolerance", "1e-8")[1])
        assert abs(rep["R_B"] - 0.069824992158536996) < 1e-8
        assert rep["tolerance"] == 1e-8

    def test_small_alpha(self, capsys):
        code, out, _ = run(capsys, "crossings", "--alpha", "0.1")
        assert code == 0
        rep = json.loads(out)
        assert set(rep["absent"]) == {"R_A", "R_B", "R_C"}

    def test_bad_tolerance(self, capsys):
        assert run(capsys, "crossings", "--alpha", "2", "--tolerance", "0")[0] == 2

    def test_vacuum_is_numeric_failure(self, capsys):
        assert run(capsys, "crossings", "--alpha", "0")[0] == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ecs_qfi", "crossings", "--alpha", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert abs(json.loads(proc.stdout)["R_C"] - 0.52) <= 0.01
