"""Command line front end.

    quantumlimits spectrum --config scenario.json [--grid 0.5:2:101:log] [--out f.csv]
    quantumlimits compare  --config scenario.json [--format json|csv]
    quantumlimits sweep    --config scenario.json [--param laser.intensity --values 0.01:100:61:log]
    quantumlimits check    --config scenario.json

Exit status: 0 success, 2 configuration error, 3 numerical error.  Data
files are byte-identical across runs; run metadata goes to ``<out>.meta.json``.
"""
import argparse
from datetime import datetime, timezone
import io
import json
import math
import sys

import numpy as np

from . import __version__, _core
from .bandavg import Delta, filtered_noise
from .errors import ConfigError, NumericalError
from .mechanics import recoil_damping_min, signal_fidelity_check
from .noise import interferometer_noise_spectrum, one_sided_asd
from .optimize import broadband_optimum, caves, per_frequency_optimum, sql
from .scenario import Grid, Strategy, load_scenario, scenario_from_dict, set_path
from .spectra import heisenberg_margin

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def format_float(x):
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj, indent=2):
    """JSON with sorted keys and floats at 17 significant digits."""
    out = io.StringIO()
    _dump(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def _dump(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, key in enumerate(sorted(obj)):
            out.write(f"{pad}{json.dumps(str(key))}: ")
            _dump(obj[key], out, indent, level + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if all(isinstance(v, (int, float, np.floating)) and not isinstance(v, bool)
               for v in items):
            out.write("[" + ", ".join(_scalar(v) for v in items) + "]")
            return
        out.write("[\n")
        for i, v in enumerate(items):
            out.write(pad)
            _dump(v, out, indent, level + 1)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(end + "]")
    else:
        out.write(_scalar(obj))


def _scalar(v):
    if v is None or isinstance(v, (bool, np.bool_)):
        return json.dumps(None if v is None else bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # JSON has no inf/nan
        return format_float(v) if math.isfinite(v) else "null"
    return json.dumps(str(v))


def to_csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(format_float(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def run_spectrum(scenario, asd=False):
    """Noise budget over the scenario grid: ``(header, rows)``."""
    if scenario.grid is None:
        raise ConfigError("spectrum needs a frequency grid", "grid")
    budget = interferometer_noise_spectrum(
        scenario.laser, scenario.mechanics, scenario.port_b, scenario.extra_force,
        scenario.grid.values(), eps=scenario.options.eps_feas)
    header = ["omega", "pc", "xc", "rp", "ef", "total"]
    rows = list(budget.rows())
    if asd:
        header.append("asd_one_sided")
        rows = [row + (float(one_sided_asd(row[-1])),) for row in rows]
    return header, rows


def _run_strategy(scenario, strategy, intensity=None):
    opts = scenario.options
    laser = scenario.laser
    args = (scenario.mechanics, scenario.filter)
    kw = {"rtol": opts.rtol, "max_evals": opts.max_evals}
    if strategy.name == "sql":
        return sql(laser, *args, **kw)
    if strategy.name == "caves":
        return caves(laser, *args, K=strategy.K, **kw)
    if laser.intensity is None:
        # both squeezing optima are intensity independent
        laser = laser.with_intensity(intensity or sql(laser, *args, **kw).optimal_intensity)
    if strategy.name == "per_frequency":
        return per_frequency_optimum(laser, *args, r_max=opts.r_max, **kw)
    return broadband_optimum(laser, *args, r_max=opts.r_max, **kw)


def run_compare(scenario):
    """All requested strategies plus their ratio to the standard quantum limit."""
    reference = _run_strategy(scenario, Strategy("sql"))
    results = {}
    for strategy in scenario.strategies:
        res = reference if strategy.name == "sql" else _run_strategy(
            scenario, strategy, reference.optimal_intensity)
        entry = res.to_dict()
        entry["ratio_to_sql"] = res.delta_s2_min / reference.delta_s2_min
        results[strategy.name] = entry
    return {
        "bandwidth": scenario.filter.bandwidth(),
        "sql_delta_s2": reference.delta_s2_min,
        "strategies": results,
        "compiled_kernel": None,
    }


def compare_rows(summary):
    header = ["strategy", "delta_s2_min", "ratio_to_sql", "optimal_intensity",
              "equivalent_tau", "delta_s2_bounded", "attained"]
    lines = [",".join(header)]
    for name in sorted(summary["strategies"]):
        e = summary["strategies"][name]
        lines.append(",".join([name] + [format_float(e[k]) for k in header[1:-1]]
                              + [str(e["attained"]).lower()]))
    return "\n".join(lines) + "\n"


def run_sweep(cfg, sweep):
    """Vary one scalar of the scenario document: ``(header, rows)``."""
    grid = Grid(float(sweep["min"]), float(sweep["max"]), int(sweep["count"]),
                sweep.get("scale", "lin"))
    quantity = sweep.get("quantity", "noise")
    path = sweep["path"]
    rows = []
    for value in grid.values():
        doc = set_path(cfg, path, float(value))
        doc.pop("sweep", None)
        sc = scenario_from_dict(doc)
        if quantity == "noise":
            fn = filtered_noise(sc.laser, sc.mechanics, sc.port_b, sc.extra_force,
                                sc.filter, sc.options.rtol, sc.options.max_evals,
                                sc.options.eps_feas)
            rows.append((float(value), fn.delta_s2, fn.pc, fn.xc, fn.rp, fn.ef))
        else:
            match = [s for s in sc.strategies if s.name == quantity]
            res = _run_strategy(sc, match[0] if match else Strategy(quantity))
            rows.append((float(value), res.delta_s2_min, res.optimal_intensity,
                         res.delta_s2_bounded))
    if quantity == "noise":
        header = ["value", "delta_s2", "pc", "xc", "rp", "ef"]
    else:
        header = ["value", "delta_s2", "optimal_intensity", "delta_s2_bounded"]
    return header, rows


def run_check(scenario, tol=1e-2):
    """Signal fidelity over the band and Heisenberg feasibility on the grid."""
    f = scenario.filter
    mech = scenario.mechanics
    report = signal_fidelity_check(mech, f.omega_s, f.bandwidth(), tol)
    omega = scenario.grid.values() if scenario.grid is not None else np.array([f.omega_s])
    spp, sqq, spq = (np.atleast_1d(v) for v in scenario.port_b.evaluate(omega))
    # same relative slack as the feasibility check in the noise evaluation
    margin = heisenberg_margin(spp, sqq, spq) / np.maximum(1.0, spp * sqq)
    i = int(np.argmin(margin))
    eps = scenario.options.eps_feas
    out = {
        "signal_fidelity": {"max_deviation": report.max_deviation,
                            "worst_omega": report.worst_omega,
                            "tolerance": report.tolerance, "pass": report.passed},
        "heisenberg": {"min_relative_margin": float(margin[i]), "worst_omega": float(omega[i]),
                       "tolerance": eps, "pass": bool(margin[i] >= -eps)},
        "pass": bool(report.passed and margin[i] >= -eps),
    }
    if scenario.laser.intensity is not None:
        out["recoil_damping_min_advisory"] = recoil_damping_min(
            scenario.laser.hbar, scenario.laser.k0, scenario.laser.intensity, mech.mass)
    if isinstance(f, Delta):
        out["signal_fidelity"]["note"] = "band taken from the delta filter's b_label"
    return out


def _parser():
    p = argparse.ArgumentParser(prog="quantumlimits", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("spectrum", "tabulate the noise budget over a frequency grid"),
                        ("compare", "run the noise-minimisation strategies"),
                        ("sweep", "vary one scenario parameter"),
                        ("check", "signal fidelity and Heisenberg feasibility")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", required=True, help="scenario JSON file")
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"), help="output format")
        s.add_argument("--grid", help="frequency grid min:max:count[:lin|log]")
        if name == "spectrum":
            s.add_argument("--asd", action="store_true",
                           help="append one-sided amplitude spectral density column")
        if name == "sweep":
            s.add_argument("--param", help="dotted path of the scalar to sweep")
            s.add_argument("--values", help="min:max:count[:lin|log]")
            s.add_argument("--quantity", choices=("noise", "sql", "caves", "per_frequency",
                                                  "broadband"))
        if name == "check":
            s.add_argument("--tol", type=float, default=1e-2,
                           help="signal fidelity tolerance (default 0.01)")
    return p


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def _sidecar(out, args):
    if out is None:
        return
    meta = {"version": __version__, "command": args.command, "config": args.config,
            "compiled_kernel": _core.HAVE_COMPILED,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    with open(out + ".meta.json", "w") as fh:
        fh.write(dumps(meta))


def _rows_json(header, rows):
    return dumps({"columns": header, "rows": [list(r) for r in rows]})


def execute(args):
    cfg = load_scenario(args.config)
    if args.grid:
        cfg = dict(cfg, grid=Grid.parse(args.grid).to_dict())
    scenario = scenario_from_dict(cfg)
    if args.command == "spectrum":
        header, rows = run_spectrum(scenario, args.asd)
        return _rows_json(header, rows) if args.format == "json" else to_csv(header, rows)
    if args.command == "compare":
        summary = run_compare(scenario)
        summary.pop("compiled_kernel")
        return compare_rows(summary) if args.format == "csv" else dumps(summary)
    if args.command == "sweep":
        sweep = dict(scenario.sweep or {})
        if args.param:
            sweep["path"] = args.param
        if args.values:
            g = Grid.parse(args.values)
            sweep.update(min=g.min, max=g.max, count=g.count, scale=g.scale)
        if args.quantity:
            sweep["quantity"] = args.quantity
        missing = [k for k in ("path", "min", "max", "count") if k not in sweep]
        if missing:
            raise ConfigError(f"missing {', '.join(missing)} (use --param/--values)",
                              "sweep")
        sweep.setdefault("quantity", "noise")
        header, rows = run_sweep(cfg, sweep)
        return _rows_json(header, rows) if args.format == "json" else to_csv(header, rows)
    result = run_check(scenario, args.tol)
    if args.format == "csv":
        return to_csv(["fidelity_max_deviation", "heisenberg_min_relative_margin", "pass"],
                      [(result["signal_fidelity"]["max_deviation"],
                        result["heisenberg"]["min_relative_margin"], float(result["pass"]))])
    return dumps(result)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        text = execute(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(text, args.out)
    _sidecar(args.out, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
