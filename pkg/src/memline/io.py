"""Flat-file emission: CSV traces and events, plain-text reports.

All files are UTF-8 with ``\\n`` line endings.  Numbers are written with 12
significant digits, so identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .analytic import AnalyticCurve, AnalyticSummary
from .line import EventLog, LineSpec, SimTrace

FMT = "{:.12g}"


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return FMT.format(float(x))


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _rows(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def trace_header(n: int) -> list:
    return ["t"] + [f"V_{i}" for i in range(1, n + 1)] + [f"RM_{i}" for i in range(1, n + 1)]


def emit_trace(trace: SimTrace, path) -> Path:
    """One row per sample: ``t, V_1..V_N, RM_1..RM_N`` (units: t0, V, kOhm)."""
    rows = ([_num(t)] + [_num(v) for v in vs] + [_num(r) for r in rs]
            for t, vs, rs in zip(trace.times, trace.voltages, trace.memristances))
    return _write(path, _rows(trace_header(trace.spec.n), rows))


def read_trace(path, spec: LineSpec, dt: float | None = None) -> SimTrace:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != trace_header(spec.n):
            raise ValueError(f"{path}: header does not match a {spec.n}-cell trace")
        data = np.array([[float(x) for x in row] for row in reader]).reshape(-1, 2 * spec.n + 1)
    n = spec.n
    kw = {} if dt is None else {"dt": dt}
    return SimTrace(data[:, 0], data[:, 1:n + 1], data[:, n + 1:], spec, **kw)


def emit_events(events: EventLog, path) -> Path:
    """``cell, onset, completion``; cells are numbered from 1, absent events blank."""
    rows = ([str(i + 1), _num(o), _num(c)]
            for i, (o, c) in enumerate(zip(events.onset, events.completion)))
    return _write(path, _rows(["cell", "onset", "completion"], rows))


def read_events(path) -> EventLog:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [(float(o) if o else math.nan, float(c) if c else math.nan)
                for _, o, c in reader]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return EventLog(arr[:, 0], arr[:, 1])


def emit_curve(curve: AnalyticCurve, path) -> Path:
    rows = ([_num(t), _num(r), _num(v)] for t, r, v in zip(curve.t, curve.r_m, curve.v))
    return _write(path, _rows(["t", "RM", "V"], rows))


_REPORT_FIELDS = [
    ("v_on", "V", "uniform voltage, all R_on"),
    ("v_off", "V", "uniform voltage, all R_off"),
    ("y_on", "1/kOhm", "Y_on"),
    ("y_off", "1/kOhm", "Y_off"),
    ("gamma_on", "", "gamma_on"),
    ("gamma_off", "", "gamma_off"),
    ("y1", "1/kOhm", "Y_1"),
    ("y2", "1/kOhm", "Y_2"),
    ("rm_tau", "kOhm", "memristance when the next cell reaches threshold"),
    ("rm_tau_printed", "kOhm", "closed form with flipped denominator sign"),
    ("tau", "t0", "propagation time per cell"),
    ("t_switch", "t0", "switching time R_on -> R_off"),
]


def _fmt_field(value) -> str:
    if value is None:
        return "infeasible"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return FMT.format(value) if isinstance(value, float) else str(value)


def format_report(summary: AnalyticSummary, title: str = "analytic summary") -> str:
    lines = [f"# {title}"]
    for name, unit, desc in _REPORT_FIELDS:
        val = _fmt_field(getattr(summary, name))
        unit_s = f" {unit}" if unit and val != "infeasible" else ""
        lines.append(f"{name:<16} = {val}{unit_s}    # {desc}")
    lines.append("")
    lines.append("# feasibility")
    lines.append(f"{'metastable':<16} = {_fmt_field(summary.metastable)}")
    lines.append(f"{'margin':<16} = {FMT.format(summary.margin)} V    # V_t - V_on")
    lines.append(f"{'self_sustaining':<16} = {_fmt_field(summary.self_sustaining)}")
    lines.append(f"{'log_domain':<16} = {'valid' if summary.log_domain_valid else 'invalid'}")
    lines.append(f"{'status':<16} = {'feasible' if summary.feasible else 'infeasible'}")
    if summary.infeasible:
        lines.append(f"{'violated':<16} = {summary.infeasible}")
    if summary.rm_tau is not None and not math.isnan(summary.rm_tau_printed) and \
            not math.isclose(summary.rm_tau, summary.rm_tau_printed, rel_tol=1e-9):
        lines.append("note: rm_tau_printed has the opposite sign to the root of "
                     "v_next(R) = V_t;")
        lines.append("      rm_tau above is the verified root.")
    return "\n".join(lines) + "\n"


def emit_report(summary: AnalyticSummary, path, extra: str = "") -> Path:
    return _write(path, format_report(summary) + extra)


def emit_text(text: str, path) -> Path:
    return _write(path, text if text.endswith("\n") else text + "\n")


def emit_table(header, rows, path) -> Path:
    return _write(path, _rows(header, ([_cell(x) for x in r] for r in rows)))


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return _num(x)
