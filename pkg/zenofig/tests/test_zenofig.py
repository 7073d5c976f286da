import csv
import math
import shutil
import subprocess

import pytest

from zenofig import (
    CSV_SCHEMA,
    FigureSpec,
    NoDataError,
    SchemaError,
    load_rows,
    render,
)
from zenofig.cli import EXIT_INPUT, EXIT_OK, main


def _row(method="free", phi=0.0, lambda_T=0.0, tau=0.0, concurrence=1.0,
         classical=1.0):
    base = {
        "method": method, "s": 0.0, "phi": phi, "delta1": 2.0,
        "delta2": -2.0, "r1": 1 / math.sqrt(2), "R": 0.1,
        "lambda_T": lambda_T, "tau": tau, "c1_abs": 0.7, "c2_abs": 0.7,
        "concurrence": concurrence, "classical": classical,
        "discord": concurrence, "mutual_info": 2 * concurrence,
        "regime_flag": "neutral",
    }
    return [base[k] for k in CSV_SCHEMA]


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_SCHEMA)
        writer.writerows(rows)


def overlay_rows():
    rows = []
    for tau in (0.0, 0.5, 1.0, 1.5, 2.0):
        decayed = math.exp(-tau)
        rows.append(_row(phi=0.0, tau=tau, concurrence=decayed,
                         classical=decayed))
        rows.append(_row(phi=math.pi, tau=tau, concurrence=1.0))
    return rows


def surface_rows():
    rows = []
    for tau in (0.5, 1.0, 1.5):
        for t_int in (0.1, 0.5, 1.0):
            for method, value in (("exact", 0.8), ("free", 0.5)):
                rows.append(_row(method=method, lambda_T=t_int, tau=tau,
                                 concurrence=value, classical=value / 2))
    return rows


class TestLoadRows:
    def test_loads_and_types_rows(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, overlay_rows())
        rows = load_rows(str(path))
        assert len(rows) == 10
        assert rows[0]["method"] == "free"
        assert isinstance(rows[0]["tau"], float)

    def test_schema_mismatch_reports_column_diff(self, tmp_path):
        path = tmp_path / "bad.csv"
        cols = [c for c in CSV_SCHEMA if c != "classical"] + ["extra"]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
        with pytest.raises(SchemaError) as err:
            load_rows(str(path))
        assert err.value.missing == ["classical"]
        assert err.value.unexpected == ["extra"]

    def test_header_only_is_no_data_rows(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv(path, [])
        with pytest.raises(NoDataError, match="no data rows"):
            load_rows(str(path))

    def test_non_numeric_cell_is_schema_error(self, tmp_path):
        path = tmp_path / "t.csv"
        row = _row()
        row[CSV_SCHEMA.index("tau")] = "later"
        write_csv(path, [row])
        with pytest.raises(SchemaError):
            load_rows(str(path))


class TestFigureSpec:
    def test_rejects_unknown_id(self):
        with pytest.raises(ValueError):
            FigureSpec(input_csv="x.csv", figure_id="fig9",
                       output_path="x.png")


class TestRender:
    def test_overlay_renders_flat_line_for_pi_phase(self, tmp_path):
        src = tmp_path / "fig1a.csv"
        write_csv(src, overlay_rows())
        out = tmp_path / "fig1a.png"
        render(FigureSpec(str(src), "fig1a", str(out)))
        assert out.stat().st_size > 0

    def test_surface_figure_renders(self, tmp_path):
        src = tmp_path / "fig3.csv"
        write_csv(src, surface_rows())
        out = tmp_path / "fig3.png"
        render(FigureSpec(str(src), "fig3", str(out)))
        assert out.stat().st_size > 0

    def test_rerender_is_byte_identical(self, tmp_path):
        src = tmp_path / "fig2.csv"
        write_csv(src, surface_rows())
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render(FigureSpec(str(src), "fig2", str(a)))
        render(FigureSpec(str(src), "fig2", str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_success(self, tmp_path, capsys):
        src = tmp_path / "t.csv"
        write_csv(src, overlay_rows())
        out = tmp_path / "o.png"
        code = main(["fig1b", "--in", str(src), "--out", str(out)])
        assert code == EXIT_OK
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_schema_mismatch_exit(self, tmp_path, capsys):
        src = tmp_path / "bad.csv"
        src.write_text("a,b\n1,2\n")
        code = main(["fig2", "--in", str(src), "--out", str(tmp_path / "o")])
        assert code == EXIT_INPUT
        err = capsys.readouterr().err
        assert "missing columns" in err

    def test_header_only_exit(self, tmp_path, capsys):
        src = tmp_path / "empty.csv"
        write_csv(src, [])
        code = main(["fig4", "--in", str(src), "--out", str(tmp_path / "o")])
        assert code == EXIT_INPUT
        assert "no data rows" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("zenocav") is None,
                    reason="simulation CLI not installed")
class TestEndToEnd:
    def test_consumes_real_scenario_export(self, tmp_path):
        src = tmp_path / "fig1a.csv"
        subprocess.run(
            ["zenocav", "scenario", "fig1a", "--tau_grid", "0:2:5",
             "--out", str(src)],
            check=True, capture_output=True,
        )
        out = tmp_path / "fig1a.png"
        assert main(["fig1a", "--in", str(src), "--out", str(out)]) == EXIT_OK
        assert out.stat().st_size > 0
