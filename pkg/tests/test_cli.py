import math

import numpy as np
import pytest

from zenocav.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    main,
    parse_grid,
    read_config,
)
from zenocav.model import InvalidParameterError
from zenocav.sweep import SWEEP_FIELDS


class TestParseGrid:
    def test_linspace_form(self):
        assert parse_grid("0:1:5") == tuple(np.linspace(0.0, 1.0, 5))

    def test_comma_list(self):
        assert parse_grid("0.5, 1.0,2") == (0.5, 1.0, 2.0)

    def test_single_value(self):
        assert parse_grid("0.25") == (0.25,)

    def test_rejects_garbage(self):
        with pytest.raises(InvalidParameterError):
            parse_grid("0:1")
        with pytest.raises(InvalidParameterError):
            parse_grid("a,b")


class TestReadConfig:
    def test_parses_flat_file(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("# comment\nR = 0.2\nmethod=series\n\n")
        assert read_config(str(path)) == {"R": "0.2", "method": "series"}

    def test_rejects_malformed_line(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("R 0.2\n")
        with pytest.raises(InvalidParameterError):
            read_config(str(path))

    def test_missing_file_is_oserror(self):
        with pytest.raises(OSError):
            read_config("/nonexistent/cfg")


class TestSimulate:
    def test_free_point_to_stdout(self, capsys):
        code = main(["simulate", "--tau", "1.0", "--method", "free"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(SWEEP_FIELDS)
        assert len(lines) == 2
        assert lines[1].startswith("free,")

    def test_measured_requires_interval(self, capsys):
        code = main(["simulate", "--tau", "1.0", "--method", "exact"])
        assert code == EXIT_CONFIG
        assert "needs --T" in capsys.readouterr().err

    def test_measured_point_writes_file(self, tmp_path, capsys):
        out = tmp_path / "point.csv"
        code = main([
            "simulate", "--tau", "2.0", "--T", "0.5",
            "--method", "exact", "--out", str(out),
        ])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_FIELDS)
        assert len(lines) == 2

    def test_unknown_flag_is_config_error(self, capsys):
        assert main(["simulate", "--tau", "1.0", "--bogus", "3"]) == EXIT_CONFIG

    def test_invalid_physical_parameter(self, capsys):
        code = main([
            "simulate", "--tau", "1.0", "--method", "free", "--R", "-0.1",
        ])
        assert code == EXIT_CONFIG

    def test_unwritable_out_is_io_error(self, capsys):
        code = main([
            "simulate", "--tau", "1.0", "--method", "free",
            "--out", "/nonexistent/dir/out.csv",
        ])
        assert code == EXIT_IO


class TestConfigPrecedence:
    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        path = tmp_path / "cfg"
        path.write_text("Rabi=0.2\n")
        code = main([
            "simulate", "--tau", "1.0", "--method", "free",
            "--config", str(path),
        ])
        assert code == EXIT_CONFIG
        assert "unknown config keys" in capsys.readouterr().err

    def test_flag_overrides_file(self, tmp_path, capsys):
        path = tmp_path / "cfg"
        path.write_text("delta2=5\nmethod=free\n")
        code = main([
            "simulate", "--tau", "1.0", "--config", str(path),
            "--delta2", "-5",
        ])
        assert code == EXIT_OK
        row = capsys.readouterr().out.splitlines()[1].split(",")
        idx = SWEEP_FIELDS.index("delta2")
        assert float(row[idx]) == -5.0

    def test_file_fills_unset_values(self, tmp_path, capsys):
        path = tmp_path / "cfg"
        path.write_text("delta2=5\nmethod=free\nphi=3.14159\n")
        code = main(["simulate", "--tau", "1.0", "--config", str(path)])
        assert code == EXIT_OK
        row = capsys.readouterr().out.splitlines()[1].split(",")
        assert float(row[SWEEP_FIELDS.index("delta2")]) == 5.0
        assert float(row[SWEEP_FIELDS.index("phi")]) == pytest.approx(
            3.14159
        )


class TestSweepCommand:
    def test_small_grid_row_count(self, tmp_path):
        out = tmp_path / "s.csv"
        code = main([
            "sweep", "--tau_grid", "0.5,1.0", "--T_grid", "0.5",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        # 2 tau x 1 T x (exact + free)
        assert len(lines) == 1 + 4


class TestScenarioCommand:
    def test_requires_name(self, capsys):
        assert main(["scenario"]) == EXIT_CONFIG
        assert "scenario name required" in capsys.readouterr().err

    def test_runs_named_preset(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = main([
            "scenario", "fig1a", "--tau_grid", "0:1:3",
            "--out", str(tmp_path / "f.csv"),
        ])
        assert code == EXIT_OK
        lines = (tmp_path / "f.csv").read_text().splitlines()
        assert len(lines) == 1 + 3 * 2  # two phases per tau

    def test_name_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text(
            f"scenario=fig1a\ntau_grid=0:1:2\nout={tmp_path / 'g.csv'}\n"
        )
        assert main(["scenario", "--config", str(cfg)]) == EXIT_OK
        assert (tmp_path / "g.csv").exists()


class TestValidate:
    def test_passes_and_prints_one_line_per_check(self, capsys):
        assert main(["validate"]) == EXIT_OK
        out = capsys.readouterr().out
        passes = [l for l in out.splitlines() if l.startswith("[PASS]")]
        assert len(passes) == 4
        assert "[FAIL]" not in out
        assert "all validation checks passed" in out
