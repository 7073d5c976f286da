"""CSV loading and figure rendering.

The input contract is the sweep-table CSV: the header must equal
``CSV_SCHEMA`` exactly, numeric columns parse as floats, and at least one
data row must be present.  Rendering is read-only over the input and
deterministic, so rerunning on the same file reproduces the same image.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# Documented export schema of the simulation CLI (column order is fixed).
CSV_SCHEMA = [
    "method", "s", "phi", "delta1", "delta2", "r1", "R",
    "lambda_T", "tau", "c1_abs", "c2_abs", "concurrence",
    "classical", "discord", "mutual_info", "regime_flag",
]

_STRING_COLUMNS = {"method", "regime_flag"}

FIGURE_IDS = ("fig1a", "fig1b", "fig2", "fig3", "fig4")

_OVERLAY_IDS = ("fig1a", "fig1b")


class SchemaError(ValueError):
    """Input header does not match the documented CSV schema."""

    def __init__(self, path: str, found: list[str] | None):
        found = found or []
        self.missing = [c for c in CSV_SCHEMA if c not in found]
        self.unexpected = [c for c in found if c not in CSV_SCHEMA]
        super().__init__(
            f"{path}: header does not match the sweep-table schema; "
            f"missing columns: {self.missing or 'none'}, "
            f"unexpected columns: {self.unexpected or 'none'}"
        )


class NoDataError(ValueError):
    """Input parses but contains no data rows."""

    def __init__(self, path: str):
        super().__init__(f"{path}: no data rows")


def load_rows(path: str) -> list[dict]:
    """Read a sweep-table CSV into typed row dicts, validating the header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_SCHEMA:
            raise SchemaError(path, reader.fieldnames)
        try:
            rows = [
                {
                    k: (v if k in _STRING_COLUMNS else float(v))
                    for k, v in line.items()
                }
                for line in reader
            ]
        except (TypeError, ValueError) as exc:
            raise SchemaError(path, reader.fieldnames) from exc
    if not rows:
        raise NoDataError(path)
    return rows


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: which figure, from which table, to which file."""

    input_csv: str
    figure_id: str
    output_path: str
    time_label: str = field(default="tau = lam t")
    interval_label: str = field(default="lam T")

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure_id!r}; "
                f"expected one of {FIGURE_IDS}"
            )


def _render_overlay(spec: FigureSpec, rows: list[dict]) -> None:
    """Short-time concurrence overlays for the two initial phases."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    styles = [
        (lambda phi: abs(phi) < 1e-9, "phi = 0", "--"),
        (lambda phi: abs(phi - np.pi) < 1e-9, "phi = pi", "-"),
    ]
    for match, label, linestyle in styles:
        series = sorted(
            ((r["tau"], r["concurrence"]) for r in rows if match(r["phi"])),
        )
        if series:
            tau, conc = zip(*series)
            ax.plot(tau, conc, linestyle, label=label)
    ax.set_xlabel(spec.time_label)
    ax.set_ylabel("concurrence")
    ax.set_ylim(-0.02, 1.05)
    ax.legend()
    ax.set_title(f"{spec.figure_id}: free-evolution concurrence")
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)


def _pivot(rows: list[dict], method: str, column: str):
    """(tau grid, lam*T grid, value matrix) for one evolution method."""
    values = {
        (r["tau"], r["lambda_T"]): r[column]
        for r in rows
        if r["method"] == method
    }
    taus = sorted({k[0] for k in values})
    intervals = sorted({k[1] for k in values})
    grid = np.full((len(intervals), len(taus)), np.nan)
    for i, t_int in enumerate(intervals):
        for j, tau in enumerate(taus):
            grid[i, j] = values.get((tau, t_int), np.nan)
    return np.array(taus), np.array(intervals), grid


def _render_surfaces(spec: FigureSpec, rows: list[dict]) -> None:
    """Overlaid measured and free surfaces for concurrence and classical."""
    fig = plt.figure(figsize=(11.0, 4.5))
    for panel, column in enumerate(("concurrence", "classical"), start=1):
        ax = fig.add_subplot(1, 2, panel, projection="3d")
        for method, color, alpha in (
            ("exact", "tab:blue", 0.85),
            ("free", "tab:orange", 0.45),
        ):
            taus, intervals, grid = _pivot(rows, method, column)
            if taus.size == 0 or intervals.size == 0:
                continue
            tt, ii = np.meshgrid(taus, intervals)
            ax.plot_surface(
                tt, ii, grid, color=color, alpha=alpha, linewidth=0,
                antialiased=False, label=method,
            )
        ax.set_xlabel(spec.time_label)
        ax.set_ylabel(spec.interval_label)
        ax.set_zlabel(column)
        ax.set_title(f"{spec.figure_id}: {column} (measured vs free)")
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)


def render(spec: FigureSpec) -> str:
    """Render one figure from its CSV and return the output path."""
    rows = load_rows(spec.input_csv)
    if spec.figure_id in _OVERLAY_IDS:
        _render_overlay(spec, rows)
    else:
        _render_surfaces(spec, rows)
    return spec.output_path
