"""Command-line driver.

Subcommands: point, sweep, grid, tc, threshold, phase0, saturation.
Exit codes: 0 all points converged, 1 invalid arguments, 2 partial
failures (non-converged points or failed brackets), 3 I/O error.
"""

import argparse
import os
import sys

from .errors import BracketFailure
from .mean_field import DEFAULT_SEEDS, ModelParams, SolverConfig
from .phase import (
    concurrence_threshold,
    critical_temperature_linearized,
    critical_temperature_onset,
    saturation_field,
    zero_temperature_phase,
)
from .sweep import (
    Axis,
    DEFAULT_OBSERVABLES,
    OBSERVABLES,
    SweepSpec,
    default_workers,
    emit,
    emit_plot_script,
    run_point,
    run_sweep,
)


class CliUsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliUsageError(message)


class _Range:
    def __init__(self, start, stop, count, spacing="linear"):
        self.start = start
        self.stop = stop
        self.count = count
        self.spacing = spacing


def _parse_value(text):
    """Scalar float or 'start:stop:count[:log]' range."""
    parts = text.split(":")
    if len(parts) == 1:
        return float(text)
    if len(parts) == 2:
        return _Range(float(parts[0]), float(parts[1]), 2)
    if len(parts) == 3:
        return _Range(float(parts[0]), float(parts[1]), int(parts[2]))
    if len(parts) == 4 and parts[3] in ("linear", "log"):
        return _Range(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])
    raise CliUsageError(f"cannot parse value or range {text!r}")


def _parse_seeds(text):
    try:
        seeds = []
        for pair in text.split(","):
            a, _, b = pair.partition(":")
            seeds.append((float(a), float(b)))
        return tuple(seeds)
    except ValueError as exc:
        raise CliUsageError(f"cannot parse seeds {text!r}: {exc}") from exc


def _read_config_file(path):
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliUsageError(f"bad config line {line!r} (expected key=value)")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


_OPTION_KEYS = (
    "jaa",
    "alpha",
    "jab",
    "field",
    "temp",
    "tol",
    "max-iter",
    "damping",
    "seeds",
    "observables",
    "format",
    "output",
    "plot",
    "workers",
)

_DEFAULTS = {
    "jaa": "1",
    "alpha": "0.025",
    "jab": None,
    "field": "0",
    "temp": None,
    "tol": "1e-12",
    "max-iter": "100000",
    "damping": "0.7",
    "seeds": None,
    "observables": ",".join(DEFAULT_OBSERVABLES),
    "format": "csv",
    "output": "-",
    "plot": None,
    "workers": None,
}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jaa", help="Heisenberg coupling J_aa (value or range)")
    common.add_argument("--alpha", help="coupling ratio J_ab/J_aa (value or range)")
    common.add_argument("--jab", help="Ising coupling J_ab (mutually exclusive with --alpha)")
    common.add_argument("--field", help="field H (value or start:stop:count[:log])")
    common.add_argument("--temp", help="temperature T (value or start:stop:count[:log])")
    common.add_argument("--tol", help="solver tolerance")
    common.add_argument("--max-iter", dest="max_iter", help="solver iteration budget")
    common.add_argument("--damping", help="fixed-point mixing weight in (0, 1]")
    common.add_argument("--seeds", help="solver seeds as ma:mb,ma:mb,...")
    common.add_argument("--continuation", action="store_true", default=None,
                        help="seed each sweep point from its predecessor")
    common.add_argument("--observables", help="comma list from: " + ",".join(OBSERVABLES))
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--output", help="output path, '-' for stdout")
    common.add_argument("--plot", help="also write a gnuplot preset (figure id)")
    common.add_argument("--workers", help="parallel worker count")
    common.add_argument("--config", help="key=value config file")

    parser = _Parser(prog="tkl-meanfield", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("point", "evaluate one parameter point"),
        ("sweep", "1-D sweep over exactly one range argument"),
        ("grid", "2-D grid over exactly two range arguments"),
        ("tc", "critical temperature by both methods"),
        ("threshold", "concurrence threshold temperature (bracket via --temp lo:hi)"),
        ("phase0", "zero-temperature phase at the given field"),
        ("saturation", "saturation field from the trimer level crossing"),
    ):
        sub.add_parser(name, parents=[common], description=desc)
    return parser


class _Options:
    """CLI > config file > defaults, with provenance for exclusion checks."""

    def __init__(self, args):
        file_values = _read_config_file(args.config) if args.config else {}
        self.values = {}
        self.provided = set()
        for key in _OPTION_KEYS:
            attr = key.replace("-", "_")
            cli_value = getattr(args, attr)
            if cli_value is not None:
                self.values[key] = cli_value
                self.provided.add(key)
            elif key in file_values:
                self.values[key] = file_values[key]
                self.provided.add(key)
            else:
                self.values[key] = _DEFAULTS[key]
        if args.continuation is not None:
            self.continuation = True
        else:
            self.continuation = file_values.get("continuation", "false").lower() in (
                "1",
                "true",
                "yes",
            )
        if "jab" in self.provided and "alpha" in self.provided:
            raise CliUsageError("--alpha and --jab are mutually exclusive")

    def __getitem__(self, key):
        return self.values[key]

    @property
    def fix_alpha(self):
        return "jab" not in self.provided


def _solver_config(opt):
    seeds = _parse_seeds(opt["seeds"]) if opt["seeds"] else DEFAULT_SEEDS
    try:
        return SolverConfig(
            tolerance=float(opt["tol"]),
            max_iterations=int(opt["max-iter"]),
            damping=float(opt["damping"]),
            seeds=seeds,
        )
    except ValueError as exc:
        raise CliUsageError(str(exc)) from exc


def _scalar(value, name):
    if isinstance(value, _Range):
        raise CliUsageError(f"{name} must be a scalar here")
    return value


def _params_from_scalars(opt):
    j_aa = _scalar(_parse_value(opt["jaa"]), "--jaa")
    h = _scalar(_parse_value(opt["field"]), "--field")
    if opt.fix_alpha:
        alpha = _scalar(_parse_value(opt["alpha"]), "--alpha")
        j_ab = alpha * j_aa
    else:
        j_ab = _scalar(_parse_value(opt["jab"]), "--jab")
    return ModelParams(j_aa=j_aa, j_ab=j_ab, h=h)


def _collect_axes(opt, want):
    """Split the sweepable options into fixed scalars and axes (canonical
    axis order T, H, J_aa, alpha)."""
    j_aa = _parse_value(opt["jaa"])
    if opt.fix_alpha:
        second = ("alpha", _parse_value(opt["alpha"]))
    else:
        jab_value = _parse_value(opt["jab"])
        if isinstance(jab_value, _Range):
            raise CliUsageError("sweep the Ising coupling via --alpha, not --jab")
        second = ("jab", jab_value)
    field = _parse_value(opt["field"])
    if opt["temp"] is None:
        raise CliUsageError("--temp is required")
    temp = _parse_value(opt["temp"])

    axes = []
    fixed = {}
    for name, value in (("T", temp), ("H", field), ("J_aa", j_aa), second):
        if isinstance(value, _Range):
            axes.append(Axis(name=name, start=value.start, stop=value.stop,
                             count=value.count, spacing=value.spacing))
        else:
            fixed[name] = value
    if len(axes) != want:
        raise CliUsageError(
            f"expected exactly {want} range argument(s), got {len(axes)}"
        )

    j_aa_fixed = fixed.get("J_aa", 1.0)
    if "alpha" in fixed:
        j_ab = fixed["alpha"] * j_aa_fixed
    elif "jab" in fixed:
        j_ab = fixed["jab"]
    else:
        j_ab = 0.0  # alpha is swept; filled in per point
    params = ModelParams(j_aa=j_aa_fixed, j_ab=j_ab, h=fixed.get("H", 0.0))
    t = fixed.get("T", 1.0)
    return params, t, axes


def _observables(opt):
    names = tuple(opt["observables"].split(","))
    for name in names:
        if name not in OBSERVABLES:
            raise CliUsageError(f"unknown observable {name!r}")
    return names


def _emit_rows(rows, opt, plottable=True):
    fmt = opt["format"]
    output = opt["output"]
    if output == "-":
        emit(rows, fmt, sys.stdout)
    else:
        emit(rows, fmt, output)
    if opt["plot"]:
        if not plottable:
            raise CliUsageError("--plot applies to point/sweep/grid output")
        if output == "-":
            raise CliUsageError("--plot needs --output pointing to a file")
        emit_plot_script(rows, opt["plot"], output + ".gp", os.path.basename(output))


def _exit_code_for(rows):
    return 0 if all(r.get("converged") for r in rows) else 2


def _cmd_point(opt):
    config = _solver_config(opt)
    params = _params_from_scalars(opt)
    if opt["temp"] is None:
        raise CliUsageError("--temp is required")
    t = _scalar(_parse_value(opt["temp"]), "--temp")
    row = {"T": t, "H": params.h}
    row.update(run_point(params, t, config, _observables(opt)))
    _emit_rows([row], opt)
    return _exit_code_for([row])


def _cmd_sweep(opt, want):
    config = _solver_config(opt)
    params, t, axes = _collect_axes(opt, want)
    workers = int(opt["workers"]) if opt["workers"] else default_workers()
    spec = SweepSpec(
        params=params,
        t=t,
        axis1=axes[0],
        axis2=axes[1] if want == 2 else None,
        observables=_observables(opt),
        continuation=opt.continuation,
        fix_alpha=opt.fix_alpha,
        config=config,
        workers=workers,
    )
    rows = run_sweep(spec)
    _emit_rows(rows, opt)
    return _exit_code_for(rows)


def _cmd_tc(opt):
    config = _solver_config(opt)
    j_aa = _scalar(_parse_value(opt["jaa"]), "--jaa")
    alpha = _scalar(_parse_value(opt["alpha"]), "--alpha")
    onset = critical_temperature_onset(j_aa, alpha, tol=1e-9, config=config)
    linear = critical_temperature_linearized(j_aa, alpha)
    rows = [
        {
            "method": r.method,
            "tc": r.tc,
            "bracket_lo": r.bracket[0],
            "bracket_hi": r.bracket[1],
        }
        for r in (onset, linear)
    ]
    _emit_rows(rows, opt, plottable=False)
    return 0


def _cmd_threshold(opt):
    config = _solver_config(opt)
    params = _params_from_scalars(opt)
    if opt["temp"] is not None:
        rng = _parse_value(opt["temp"])
        if not isinstance(rng, _Range):
            raise CliUsageError("--temp must be a lo:hi bracket for threshold")
        bracket = (rng.start, rng.stop)
    else:
        bracket = (1e-3, 1.0)
    t_threshold = concurrence_threshold(params, bracket, config=config)
    rows = [{"H": params.h, "threshold_T": t_threshold}]
    _emit_rows(rows, opt, plottable=False)
    return 0


def _cmd_phase0(opt):
    params = _params_from_scalars(opt)
    label = zero_temperature_phase(params.j_aa, params.j_ab, params.h)
    rows = [
        {
            "tag": label.tag,
            "m_a": label.m_a_value,
            "C": label.concurrence_value,
            "ground_states": "|".join(str(k) for k in label.ground_states),
            "degenerate_boundary": label.degenerate_boundary,
        }
    ]
    _emit_rows(rows, opt, plottable=False)
    return 0


def _cmd_saturation(opt):
    params = _params_from_scalars(opt)
    rows = [
        {
            "j_aa": params.j_aa,
            "j_ab": params.j_ab,
            "h_s": saturation_field(params.j_aa, params.j_ab),
        }
    ]
    _emit_rows(rows, opt, plottable=False)
    return 0


_COMMANDS = {
    "point": _cmd_point,
    "tc": _cmd_tc,
    "threshold": _cmd_threshold,
    "phase0": _cmd_phase0,
    "saturation": _cmd_saturation,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        opt = _Options(args)
        if args.command == "sweep":
            return _cmd_sweep(opt, want=1)
        if args.command == "grid":
            return _cmd_sweep(opt, want=2)
        return _COMMANDS[args.command](opt)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BracketFailure as exc:
        print(f"bracket failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
