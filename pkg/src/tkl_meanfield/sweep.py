"""Sweep driver: single points, 1-D sweeps and 2-D grids with optional
parallel execution and branch continuation, plus deterministic CSV/JSON
emission and gnuplot script generation."""

import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import __version__
from .entanglement import concurrence_xstate, reduced_density_matrix
from .errors import MissingColumn, NoConvergedBranch
from .mean_field import (
    ModelParams,
    SolverConfig,
    select_equilibrium,
    solve_self_consistent,
)
from .observables import internal_energy, specific_heat, susceptibility
from .trimer import _check_t

AXIS_NAMES = ("T", "H", "J_aa", "alpha")
OBSERVABLES = ("m_a", "m_b", "chi_a", "u", "c", "C", "f", "gamma_a", "gamma_b")
DEFAULT_OBSERVABLES = ("m_a", "m_b", "C", "f")

CSV_HEADER = f"# tkl-meanfield v{__version__}"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}")
        if self.count < 2:
            raise ValueError("axis count must be at least 2")
        if self.start == self.stop:
            raise ValueError("axis start and stop must differ")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise ValueError("log spacing requires positive endpoints")

    def values(self):
        n = self.count
        if self.spacing == "log":
            la, lb = math.log(self.start), math.log(self.stop)
            return [math.exp(la + (lb - la) * i / (n - 1)) for i in range(n)]
        return [self.start + (self.stop - self.start) * i / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class SweepSpec:
    params: ModelParams
    t: float
    axis1: Axis
    axis2: Axis = None
    observables: tuple = DEFAULT_OBSERVABLES
    continuation: bool = False
    fix_alpha: bool = True
    config: SolverConfig = None
    workers: int = 1

    def __post_init__(self):
        for name in self.observables:
            if name not in OBSERVABLES:
                raise ValueError(f"unknown observable {name!r}")
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValueError("grid axes must differ")


def _apply_axis(params, t, name, value, fix_alpha):
    if name == "T":
        return params, value
    if name == "H":
        return replace(params, h=value), t
    if name == "J_aa":
        j_ab = params.alpha * value if fix_alpha else params.j_ab
        return replace(params, j_aa=value, j_ab=j_ab), t
    if name == "alpha":
        return replace(params, j_ab=value * params.j_aa), t
    raise ValueError(f"unknown axis {name!r}")


def run_point(
    params: ModelParams,
    t: float,
    config: SolverConfig = None,
    observables: tuple = DEFAULT_OBSERVABLES,
):
    """One fully populated result row for the selected equilibrium branch.

    On solver failure the observable cells are None and converged is False.
    """
    _check_t(t)
    if config is None:
        config = SolverConfig()
    states = solve_self_consistent(params, t, config)
    branches = sum(1 for s in states if s.converged)
    row = {}
    try:
        eq = select_equilibrium(states)
    except NoConvergedBranch:
        for name in observables:
            row[name] = None
        row["converged"] = False
        row["branches"] = branches
        return row

    for name in observables:
        if name == "m_a":
            row[name] = eq.m_a
        elif name == "m_b":
            row[name] = eq.m_b
        elif name == "chi_a":
            row[name] = susceptibility(params, t, config=config)
        elif name == "u":
            row[name] = internal_energy(params, t, config=config)
        elif name == "c":
            row[name] = specific_heat(params, t, config=config)
        elif name == "C":
            row[name] = concurrence_xstate(reduced_density_matrix(eq.fields, t)).value
        elif name == "f":
            row[name] = eq.free_energy_per_site
        elif name == "gamma_a":
            row[name] = eq.fields.gamma_a
        elif name == "gamma_b":
            row[name] = eq.fields.gamma_b
    row["converged"] = True
    row["branches"] = branches
    return row


def _line_task(args):
    """One axis1 line of a sweep; unit of parallel work."""
    (line_idx, axis2_value, spec) = args
    config = spec.config if spec.config is not None else SolverConfig()
    rows = []
    prev = None
    for v1 in spec.axis1.values():
        params, t = _apply_axis(spec.params, spec.t, spec.axis1.name, v1, spec.fix_alpha)
        if axis2_value is not None:
            params, t = _apply_axis(
                params, t, spec.axis2.name, axis2_value, spec.fix_alpha
            )
        point_config = config
        if spec.continuation and prev is not None:
            point_config = replace(config, seeds=(prev,))
        row = {spec.axis1.name: v1}
        if axis2_value is not None:
            row[spec.axis2.name] = axis2_value
        row.update(run_point(params, t, point_config, spec.observables))
        rows.append(row)
        if spec.continuation and row["converged"]:
            m_a = row.get("m_a")
            m_b = row.get("m_b")
            if m_a is None or m_b is None:
                states = solve_self_consistent(params, t, point_config)
                eq = select_equilibrium(states)
                m_a, m_b = eq.m_a, eq.m_b
            prev = (m_a, m_b)
    return line_idx, rows


def run_sweep(spec: SweepSpec):
    """Evaluate all grid points; rows come back in lexicographic axis order."""
    axis2_values = spec.axis2.values() if spec.axis2 is not None else [None]
    tasks = [(i, v2, spec) for i, v2 in enumerate(axis2_values)]
    if spec.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_line_task, tasks))
    else:
        results = [_line_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    rows = [row for _, line_rows in results for row in line_rows]

    axes = [spec.axis1.name] + ([spec.axis2.name] if spec.axis2 is not None else [])
    rows.sort(key=lambda r: tuple(r[a] for a in axes))
    return rows


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(value, ".12g")


def emit(rows, fmt: str, destination) -> None:
    """Write rows as CSV or JSON; byte-identical output for identical rows.

    ``destination`` is a path or a text stream.  CSV carries the version
    header line, 12 significant digits, comma delimiter and LF endings;
    non-converged observable cells are empty (CSV) or null (JSON).
    """
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    columns = list(rows[0].keys())

    if hasattr(destination, "write"):
        _write_rows(destination, rows, columns, fmt)
        return
    with open(destination, "w", encoding="ascii", newline="") as handle:
        _write_rows(handle, rows, columns, fmt)


def _write_rows(handle, rows, columns, fmt):
    if fmt == "csv":
        handle.write(CSV_HEADER + "\n")
        handle.write(",".join(columns) + "\n")
        for row in rows:
            handle.write(",".join(_format_cell(row.get(c)) for c in columns) + "\n")
    else:
        payload = [{c: row.get(c) for c in columns} for row in rows]
        json.dump(payload, handle, indent=1)
        handle.write("\n")


# figure presets: (x column, y column, heat column or None)
FIGURES = {
    "fig2a": ("H", "m_a", None),
    "fig2b": ("H", "m_a", None),
    "fig3a": ("T", "m_a", None),
    "fig3b": ("T", "m_a", None),
    "fig4": ("T", "chi_a", None),
    "fig5": ("H", "chi_a", None),
    "fig8": ("T", "c", None),
    "fig9": ("T", "c", None),
    "fig10": ("T", "C", None),
    "fig11": ("T", "H", "C"),
    "fig12b": ("H", "J_aa", "C"),
    "fig13": ("H", "J_aa", "m_a"),
}


def emit_plot_script(rows, figure_id: str, destination, csv_path: str) -> None:
    """Write a standalone gnuplot script plotting ``csv_path`` (relative path)."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure id {figure_id!r}")
    x, y, heat = FIGURES[figure_id]
    needed = (x, y) if heat is None else (x, y, heat)
    available = set(rows[0].keys()) if rows else set()
    for column in needed:
        if column not in available:
            raise MissingColumn(f"figure {figure_id} needs column {column!r}")

    lines = [
        f"# {figure_id} ({CSV_HEADER.lstrip('# ')})",
        "set datafile separator comma",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        f"set ylabel '{y}'",
    ]
    if heat is None:
        lines.append(f"plot '{csv_path}' using '{x}':'{y}' with lines")
    else:
        lines.append(f"set cblabel '{heat}'")
        lines.append(f"plot '{csv_path}' using '{x}':'{y}':'{heat}' with image")
    lines.append("pause -1")
    text = "\n".join(lines) + "\n"

    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="ascii", newline="") as handle:
        handle.write(text)


def default_workers() -> int:
    env = os.environ.get("TKL_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"ignoring invalid TKL_WORKERS={env!r}", file=sys.stderr)
    return os.cpu_count() or 1
