"""Scenario presets, (tau, T) sweep driver and CSV/JSON export.

Presets cover the standard parameter regimes: short-time free-evolution
overlays for the two initial phases, and measured-versus-free surfaces over
the (tau = lam*t, lam*T) plane for equal and symmetric detunings.  Detuning
magnitudes default to 2*lam and are exposed as configuration keys.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .correlations import correlation_record
from .dynamics import propagate_free
from .measurement import MeasurementSchedule, measured_evolution_exact
from .model import (
    InitialState,
    InvalidParameterError,
    PhysicalParams,
    XStateDensity,
    build_initial,
    reduce_to_xstate,
)

__all__ = [
    "Scenario",
    "SweepRow",
    "SCENARIO_NAMES",
    "make_scenario",
    "run_scenario",
    "run_sweep",
    "classify_regime",
    "export",
    "load_table",
]

DEFAULT_TAU_GRID = np.linspace(0.0, 6.0, 60)
DEFAULT_T_GRID = np.linspace(0.02, 2.0, 40)

REGIME_FLAGS = ("zeno", "anti-zeno", "neutral")

SCENARIO_NAMES = ("fig1a", "fig1b", "fig2", "fig3", "fig4")


@dataclass(frozen=True)
class SweepRow:
    method: str
    s: float
    phi: float
    delta1: float
    delta2: float
    r1: float
    R: float
    lambda_T: float
    tau: float
    c1_abs: float
    c2_abs: float
    concurrence: float
    classical: float
    discord: float
    mutual_info: float
    regime_flag: str

    def __post_init__(self):
        if self.regime_flag not in REGIME_FLAGS:
            raise InvalidParameterError(
                f"regime_flag must be one of {REGIME_FLAGS}, "
                f"got {self.regime_flag!r}"
            )


SWEEP_FIELDS = [f.name for f in fields(SweepRow)]
_FLOAT_FIELDS = {f.name for f in fields(SweepRow) if f.type == "float"}


@dataclass(frozen=True)
class Scenario:
    """Frozen parameter set plus sweep grids for one preset run."""

    name: str
    params: PhysicalParams
    inits: tuple[InitialState, ...]
    tau_grid: tuple[float, ...]
    t_grid: tuple[float, ...]
    measured: bool

    def __post_init__(self):
        for grid in (self.tau_grid, self.t_grid):
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise InvalidParameterError("sweep grids must be strictly increasing")


def make_scenario(name: str, tau_grid=None, t_grid=None,
                  rabi_ratio: float = 0.1, r1: float | None = None,
                  delta_scale: float = 2.0) -> Scenario:
    """Build a preset scenario; grids default to the standard sweep grids."""
    if name not in SCENARIO_NAMES:
        raise InvalidParameterError(
            f"unknown scenario {name!r}; expected one of {SCENARIO_NAMES}"
        )
    if r1 is None:
        r1 = 1.0 / math.sqrt(2.0)
    tau_grid = tuple(DEFAULT_TAU_GRID if tau_grid is None else tau_grid)
    t_grid = tuple(DEFAULT_T_GRID if t_grid is None else t_grid)

    sym = name in ("fig1b", "fig3", "fig4")
    params = PhysicalParams(
        rabi_vacuum=rabi_ratio,
        r1=r1,
        delta1=delta_scale,
        delta2=-delta_scale if sym else delta_scale,
    )
    if name in ("fig1a", "fig1b"):
        inits = (InitialState(s=0.0, phi=0.0), InitialState(s=0.0, phi=math.pi))
        measured = False
    else:
        phi = math.pi if name == "fig4" else 0.0
        inits = (InitialState(s=0.0, phi=phi),)
        measured = True
    return Scenario(
        name=name,
        params=params,
        inits=inits,
        tau_grid=tau_grid,
        t_grid=t_grid,
        measured=measured,
    )


def classify_regime(measured: float, free: float, tol: float = 1e-6) -> str:
    if measured > free + tol:
        return "zeno"
    if measured < free - tol:
        return "anti-zeno"
    return "neutral"


def _row(method: str, params: PhysicalParams, init: InitialState,
         lambda_t: float, tau: float, x: XStateDensity,
         regime: str, rec=None) -> SweepRow:
    if rec is None:
        rec = correlation_record(x)
    return SweepRow(
        method=method,
        s=init.s,
        phi=init.phi,
        delta1=params.delta1,
        delta2=params.delta2,
        r1=params.r1,
        R=params.rabi_ratio,
        lambda_T=lambda_t,
        tau=tau,
        c1_abs=math.sqrt(x.p10),
        c2_abs=math.sqrt(x.p01),
        concurrence=rec.concurrence,
        classical=rec.classical,
        discord=rec.discord,
        mutual_info=rec.mutual_info,
        regime_flag=regime,
    )


def _free_state(params: PhysicalParams, init: InitialState,
                t: float) -> XStateDensity:
    return reduce_to_xstate(propagate_free(params, build_initial(init), t))


def _measured_column(args) -> list[XStateDensity]:
    params, init, interval, count = args
    sched = MeasurementSchedule(interval=interval, count=count)
    return measured_evolution_exact(params, init, sched)


def run_sweep(params: PhysicalParams, init: InitialState, tau_grid, t_grid,
              workers: int = 1) -> list[SweepRow]:
    """Measured (exact channel) and free rows over the (tau, lam*T) grids.

    Both members of each pair are evaluated at t = round(tau/T) * T so the
    Zeno comparison is at identical physical times.  Row order is tau outer,
    lam*T inner, method "exact" before "free".
    """
    tau_grid = list(tau_grid)
    t_grid = list(t_grid)
    tau_max = tau_grid[-1]
    jobs = [
        (params, init, interval, int(round(tau_max / interval)))
        for interval in t_grid
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_measured_column, jobs))
    else:
        columns = [_measured_column(job) for job in jobs]

    rows = []
    for tau in tau_grid:
        for interval, column in zip(t_grid, columns):
            n = min(int(round(tau / interval)), len(column) - 1)
            t_eff = n * interval
            measured = column[n]
            free = _free_state(params, init, t_eff)
            rec_m = correlation_record(measured)
            rec_f = correlation_record(free)
            regime = classify_regime(rec_m.concurrence, rec_f.concurrence)
            rows.append(
                _row("exact", params, init, interval, tau, measured, regime,
                     rec=rec_m)
            )
            rows.append(
                _row("free", params, init, interval, tau, free, "neutral",
                     rec=rec_f)
            )
    return rows


def run_scenario(name: str, workers: int = 1, **kwargs) -> list[SweepRow]:
    """Run one preset and return its sweep table."""
    scenario = make_scenario(name, **kwargs)
    rows = []
    if scenario.measured:
        for init in scenario.inits:
            rows.extend(
                run_sweep(scenario.params, init, scenario.tau_grid,
                          scenario.t_grid, workers=workers)
            )
    else:
        for tau in scenario.tau_grid:
            for init in scenario.inits:
                x = _free_state(scenario.params, init, tau)
                rows.append(
                    _row("free", scenario.params, init, 0.0, tau, x, "neutral")
                )
    return rows


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def export(table: list[SweepRow], path: str, fmt: str = "csv") -> None:
    """Write the table; CSV header is exactly the SweepRow field order."""
    if fmt not in ("csv", "json"):
        raise InvalidParameterError(f"unknown export format {fmt!r}")
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(SWEEP_FIELDS)
                for row in table:
                    writer.writerow(
                        [_format(getattr(row, name)) for name in SWEEP_FIELDS]
                    )
        else:
            payload = {
                "fields": SWEEP_FIELDS,
                "rows": [
                    {name: getattr(row, name) for name in SWEEP_FIELDS}
                    for row in table
                ],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=1)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc


def load_table(path: str, fmt: str = "json") -> list[SweepRow]:
    """Read back an exported table (JSON round-trips exactly)."""
    try:
        with open(path) as fh:
            if fmt == "json":
                payload = json.load(fh)
                raw = payload["rows"]
            elif fmt == "csv":
                reader = csv.DictReader(fh)
                if reader.fieldnames != SWEEP_FIELDS:
                    raise InvalidParameterError(
                        f"unexpected CSV header in {path}: {reader.fieldnames}"
                    )
                raw = [
                    {
                        k: (float(v) if k in _FLOAT_FIELDS else v)
                        for k, v in line.items()
                    }
                    for line in reader
                ]
            else:
                raise InvalidParameterError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"failed to read {path}: {exc}") from exc
    return [SweepRow(**entry) for entry in raw]
