"""Command-line entry point.

    memline simulate fig3
    memline compare path/to/scenario.json --dt 2e-4 --out-dir results

Exit codes: 0 success, 2 configuration error, 3 infeasible analytic
parameters, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .analytic import HomogeneousLineParams, InfeasibleError, analytic_waveforms, summarize
from .config import MODES, ConfigError, ScenarioConfig, load_config, preset_names, require
from .gates import COMBINATIONS, classify_gate, sweep_coupling
from .line import detect_events, simulate
from .tridiag import SolverError

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4


def _out(cfg: ScenarioConfig, suffix: str) -> Path:
    return cfg.out_dir / f"{cfg.name}_{suffix}"


def _params(cfg: ScenarioConfig) -> HomogeneousLineParams:
    try:
        return HomogeneousLineParams.from_line(cfg.line)
    except ValueError as exc:
        raise ConfigError("line", str(exc)) from None


def _rel(a, b):
    return (a - b) / b if a is not None and b else math.nan


def _fmt(x):
    return "n/a" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6g}"


def cmd_simulate(cfg: ScenarioConfig, log) -> int:
    trace = simulate(cfg.line, cfg.stimulus, cfg.t_end, cfg.dt, cfg.sample_every)
    events = detect_events(trace)
    p_trace = io.emit_trace(trace, _out(cfg, "trace.csv"))
    p_events = io.emit_events(events, _out(cfg, "events.csv"))
    switched = int(np.count_nonzero(np.isfinite(events.completion)))
    log(f"{switched}/{cfg.line.n} cells switched; tau_mean = {_fmt(events.tau_mean)} t0")
    log(f"wrote {p_trace}")
    log(f"wrote {p_events}")
    return EXIT_OK


def cmd_analytic(cfg: ScenarioConfig, log) -> int:
    p = _params(cfg)
    summary = summarize(p)
    path = io.emit_report(summary, _out(cfg, "report.txt"))
    log(f"wrote {path}")
    if not summary.feasible:
        log(f"infeasible: {summary.infeasible}")
        return EXIT_INFEASIBLE
    curve = analytic_waveforms(p, cfg.samples)
    log(f"wrote {io.emit_curve(curve, _out(cfg, 'curve.csv'))}")
    log(f"tau = {_fmt(summary.tau)} t0, T = {_fmt(summary.t_switch)} t0")
    return EXIT_OK


def compare_text(summary, events) -> str:
    """Numeric vs analytic delay and switching time over interior cells."""
    cells = list(events.interior)
    durations = events.durations()[cells] if cells else np.array([])
    t_num = float(np.mean(durations)) if durations.size and np.all(np.isfinite(durations)) \
        else None
    tau_num = events.tau_mean
    lines = ["", "# numeric vs analytic (interior cells "
             + (f"{cells[0] + 1}..{cells[-1] + 1}" if cells else "none") + ")"]
    rows = [("tau_numeric", tau_num), ("tau_analytic", summary.tau),
            ("tau_rel_dev", _rel(tau_num, summary.tau)),
            ("tau_std_numeric", events.tau_std),
            ("T_numeric", t_num), ("T_analytic", summary.t_switch),
            ("T_rel_dev", _rel(t_num, summary.t_switch))]
    for name, val in rows:
        unit = "" if name.endswith("dev") else " t0"
        text = "n/a" if val is None or math.isnan(val) else io.FMT.format(val) + unit
        lines.append(f"{name:<16} = {text}")
    return "\n".join(lines) + "\n"


def cmd_compare(cfg: ScenarioConfig, log) -> int:
    p = _params(cfg)
    summary = summarize(p)
    trace = simulate(cfg.line, cfg.stimulus, cfg.t_end, cfg.dt, cfg.sample_every)
    events = detect_events(trace)
    io.emit_trace(trace, _out(cfg, "trace.csv"))
    io.emit_events(events, _out(cfg, "events.csv"))
    extra = compare_text(summary, events)
    path = io.emit_report(summary, _out(cfg, "report.txt"), extra)
    log(extra.strip())
    log(f"wrote {path}")
    if not summary.feasible:
        log(f"infeasible: {summary.infeasible}")
        return EXIT_INFEASIBLE
    return EXIT_OK


def truth_table_text(table, title="truth table") -> str:
    lines = [f"# {title}", "A B out completion_t0"]
    for bits in COMBINATIONS:
        row = table.rows[bits]
        lines.append(f"{bits[0]} {bits[1]} {int(row.output_switched)}   {_fmt(row.completion)}")
    lines.append(f"label = {table.label}")
    lines.append(f"metastable_under_load = {'yes' if table.metastable else 'no'}")
    return "\n".join(lines) + "\n"


def cmd_gate(cfg: ScenarioConfig, log) -> int:
    net = cfg.network
    table = classify_gate(net, cfg.dt, keep_traces=True)
    io.emit_table(["A", "B", "output_switched", "completion"],
                  [(a, b, table.rows[(a, b)].output_switched, table.rows[(a, b)].completion)
                   for a, b in COMBINATIONS], _out(cfg, "truth_table.csv"))
    path = io.emit_text(truth_table_text(table), _out(cfg, "truth_table.txt"))
    for (a, b), nt in table.traces.items():
        for k, tr in enumerate(nt.traces):
            io.emit_trace(tr, _out(cfg, f"{a}{b}_line{k + 1}.csv"))
    log(truth_table_text(table).strip())
    log(f"wrote {path}")
    return EXIT_OK


def sweep_text(result) -> str:
    lines = ["# coupling sweep", "r_c_kohm outputs(00,01,10,11) label"]
    for pt in result.points:
        lines.append(f"{pt.r_c:.6g} {''.join(map(str, pt.table.outputs()))} {pt.label}")
    lines.append("")
    lines.append("# windows (maximal runs on the grid)")
    for lab, name in (("OR", "OR"), ("AND", "AND"), ("NONE", "dead"), ("OTHER", "other")):
        runs = result.windows.get(lab, [])
        if not runs:
            if lab != "OTHER":
                lines.append(f"{name:<5} window: empty")
            continue
        spans = ", ".join(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in runs)
        note = "" if len(runs) == 1 else f"  ({len(runs)} separate runs)"
        lines.append(f"{name:<5} window: {spans} kOhm{note}")
    return "\n".join(lines) + "\n"


def cmd_sweep(cfg: ScenarioConfig, log) -> int:
    s = cfg.sweep
    result = sweep_coupling(cfg.network, (s.r_c_min, s.r_c_max), s.steps, cfg.dt,
                            workers=s.workers)
    io.emit_table(["r_c", "out_00", "out_01", "out_10", "out_11", "label"],
                  [(pt.r_c, *pt.table.outputs(), pt.label) for pt in result.points],
                  _out(cfg, "sweep.csv"))
    path = io.emit_text(sweep_text(result), _out(cfg, "sweep.txt"))
    log(sweep_text(result).strip())
    log(f"wrote {path}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analytic": cmd_analytic, "compare": cmd_compare,
            "gate": cmd_gate, "sweep": cmd_sweep}


def _apply_overrides(cfg: ScenarioConfig, dt=None, t_end=None, out_dir=None):
    if dt is not None:
        if not dt > 0:
            raise ConfigError("--dt", f"must be positive, got {dt}")
        cfg.dt = dt
    if t_end is not None:
        if not t_end > 0:
            raise ConfigError("--t-end", f"must be positive, got {t_end}")
        cfg.t_end = t_end
        if cfg.network is not None:
            cfg.network = replace(cfg.network, t_max=t_end)
    if out_dir is not None:
        cfg.out_dir = Path(out_dir)
    if cfg.t_end is not None and cfg.t_end < cfg.dt:
        raise ConfigError("t_end", f"must be at least dt ({cfg.dt})")


def run(config: str | Path, mode: str, dt=None, t_end=None, out_dir=None, log=print) -> int:
    """Execute one scenario; returns the process exit code."""
    try:
        cfg = load_config(config)
        _apply_overrides(cfg, dt, t_end, out_dir)
        require(cfg, mode)
        try:
            cfg.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError("output.dir", f"cannot create {cfg.out_dir}: {exc}") from None
        return COMMANDS[mode](cfg, log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SolverError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memline",
                                     description="Metastable memristive line simulator.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode, help=f"run a scenario in {mode} mode")
        sp.add_argument("config", help="scenario JSON file or preset name")
        sp.add_argument("--dt", type=float, help="time step (t0)")
        sp.add_argument("--t-end", type=float, help="horizon (t0); gate/sweep: t_max")
        sp.add_argument("--out-dir", help="directory for emitted files")
    sub.add_parser("presets", help="list shipped presets")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "presets":
        print("\n".join(preset_names()))
        return EXIT_OK
    return run(args.config, args.mode, args.dt, args.t_end, args.out_dir)


if __name__ == "__main__":
    sys.exit(main())
