"""Scenario files: JSON documents describing one run.

Every structural or numeric problem is reported at load time as a
:class:`ConfigError` naming the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .device import MemristorParams
from .gates import Coupling, GateNetworkSpec, y_gate
from .line import DEFAULT_DT, LineSpec, Stimulus

MODES = ("simulate", "analytic", "compare", "gate", "sweep")


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class SweepSettings:
    r_c_min: float = 10.0
    r_c_max: float = 300.0
    steps: int = 31
    workers: int = 1


@dataclass
class ScenarioConfig:
    mode: Optional[str]
    name: str
    line: Optional[LineSpec] = None
    stimulus: Optional[Stimulus] = None
    network: Optional[GateNetworkSpec] = None
    sweep: Optional[SweepSettings] = None
    dt: float = DEFAULT_DT
    t_end: Optional[float] = None
    sample_every: Optional[int] = None
    samples: int = 201
    out_dir: Path = Path("out")
    source: Optional[Path] = None


def _path(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


def _get(d: dict, key: str, where: str, kind=float, default: Any = ..., positive=False,
         minimum=None):
    here = _path(where, key)
    if key not in d:
        if default is ...:
            raise ConfigError(here, "missing required field")
        return default
    val = d[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ConfigError(here, f"expected a finite number, got {val!r}")
        val = float(val)
    elif kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(here, f"expected an integer, got {val!r}")
    elif kind is str:
        if not isinstance(val, str):
            raise ConfigError(here, f"expected a string, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(here, f"must be positive, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(here, f"must be >= {minimum}, got {val!r}")
    return val


def _obj(d, key, where, default: Any = ...):
    if key not in d:
        if default is ...:
            raise ConfigError(_path(where, key), "missing required section")
        return default
    val = d[key]
    if not isinstance(val, dict):
        raise ConfigError(_path(where, key), "expected an object")
    return val


def _per_cell(d, key, where, n, default: Any = ...):
    if key not in d:
        if default is ...:
            raise ConfigError(f"{where}.{key}", "missing required field")
        return default
    val = d[key]
    if isinstance(val, list):
        if len(val) != n:
            raise ConfigError(f"{where}.{key}", f"expected {n} entries, got {len(val)}")
        return [_get({key: v}, key, f"{where}[{i}]", positive=True) for i, v in enumerate(val)]
    return _get(d, key, where, positive=True)


def parse_device(d: dict, where: str) -> MemristorParams:
    r_on = _get(d, "r_on", where, positive=True, default=5.0)
    r_off = _get(d, "r_off", where, positive=True, default=100.0)
    if not r_on < r_off:
        raise ConfigError(f"{where}.r_off", f"must exceed r_on ({r_on}), got {r_off}")
    return MemristorParams(r_on, r_off, _get(d, "beta", where, positive=True, default=100.0),
                           _get(d, "v_t", where, positive=True, default=1.0))


def parse_line(d: dict, where: str = "line") -> LineSpec:
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    n = _get(d, "n", where, kind=int, minimum=1, default=10)
    r = _per_cell(d, "r", where, n, default=50.0)
    r_bias = _per_cell(d, "r_bias", where, n, default=25.0)
    v_p = _get(d, "v_p", where, default=5.0, minimum=0.0)
    dev = d.get("device", {})
    if isinstance(dev, list):
        if len(dev) != n:
            raise ConfigError(f"{where}.device", f"expected {n} entries, got {len(dev)}")
        device = [parse_device(x, f"{where}.device[{i}]") for i, x in enumerate(dev)]
        r_on = [x.r_on for x in device]
    elif isinstance(dev, dict):
        device = parse_device(dev, f"{where}.device")
        r_on = device.r_on
    else:
        raise ConfigError(f"{where}.device", "expected an object or a list of objects")
    rm0 = _per_cell(d, "initial_memristance", where, n, default=r_on)
    try:
        return LineSpec(n, r, r_bias, v_p, device, rm0)
    except ValueError as exc:
        raise ConfigError(f"{where}.initial_memristance", str(exc)) from None


def parse_stimulus(d, where: str = "stimulus") -> Optional[Stimulus]:
    if d is None:
        return None
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object or null")
    kind = _get(d, "kind", where, kind=str, default="none")
    if kind not in Stimulus.KINDS:
        raise ConfigError(f"{where}.kind", f"expected one of {Stimulus.KINDS}, got {kind!r}")
    baseline = d.get("baseline")
    if baseline is not None:
        baseline = _get(d, "baseline", where)
    amp = _get(d, "amplitude", where, default=0.0)
    t_start = _get(d, "t_start", where, default=0.0, minimum=0.0)
    if kind == "rectangular_pulse":
        t_end = _get(d, "t_end", where)
        if not t_end > t_start:
            raise ConfigError(f"{where}.t_end", f"must exceed t_start ({t_start}), got {t_end}")
        return Stimulus.pulse(amp, t_start, t_end, baseline)
    if kind == "piecewise_constant":
        segs = d.get("segments")
        if not isinstance(segs, list) or not segs:
            raise ConfigError(f"{where}.segments", "expected a non-empty list of [t, V] pairs")
        pairs = []
        for i, seg in enumerate(segs):
            if not (isinstance(seg, list) and len(seg) == 2):
                raise ConfigError(f"{where}.segments[{i}]", "expected a [t, V] pair")
            pairs.append((_get({"t": seg[0]}, "t", f"{where}.segments[{i}]"),
                          _get({"v": seg[1]}, "v", f"{where}.segments[{i}]")))
        if any(b[0] <= a[0] for a, b in zip(pairs, pairs[1:])):
            raise ConfigError(f"{where}.segments", "segment times must be strictly increasing")
        return Stimulus.piecewise(pairs, baseline)
    if kind == "step":
        return Stimulus.step(amp, t_start, baseline)
    return Stimulus.none(baseline)


def parse_network(d: dict, where: str = "network") -> GateNetworkSpec:
    if "y_gate" in d:
        y = _obj(d, "y_gate", where)
        here = f"{where}.y_gate"
        line = parse_line(y.get("line", {}), f"{here}.line")
        output = parse_line(y["output"], f"{here}.output") if "output" in y else None
        stim = parse_stimulus(y.get("stimulus", {"kind": "step", "amplitude": 5.0}),
                              f"{here}.stimulus")
        if stim is None or stim.kind == "none":
            raise ConfigError(f"{here}.stimulus", "input stimulus must be active")
        args = (_get(y, "r_c", here, positive=True, default=50.0), stim,
                _get(y, "t_max", here, positive=True, default=20.0),
                _get(y, "input_node", here, kind=int, default=-1),
                _get(y, "output_node", here, kind=int, default=0),
                _get(y, "skew", here, default=0.0), bool(y.get("output_driven", False)))
        try:
            return y_gate(line, output, *args)
        except ValueError as exc:
            raise ConfigError(here, str(exc)) from None
    lines_d = d.get("lines")
    if not isinstance(lines_d, list) or not lines_d:
        raise ConfigError(f"{where}.lines", "expected a non-empty list of line objects")
    lines = [parse_line(x, f"{where}.lines[{i}]") for i, x in enumerate(lines_d)]
    couplings = []
    for i, c in enumerate(d.get("couplings", [])):
        here = f"{where}.couplings[{i}]"
        if not isinstance(c, dict):
            raise ConfigError(here, "expected an object")
        couplings.append(Coupling(_get(c, "line_a", here, kind=int),
                                  _get(c, "node_a", here, kind=int),
                                  _get(c, "line_b", here, kind=int),
                                  _get(c, "node_b", here, kind=int),
                                  _get(c, "r_c", here, positive=True)))
    stim_d = d.get("stimuli", [None] * len(lines))
    if not isinstance(stim_d, list) or len(stim_d) != len(lines):
        raise ConfigError(f"{where}.stimuli", f"expected a list of {len(lines)} entries")
    stimuli = [parse_stimulus(s, f"{where}.stimuli[{i}]") for i, s in enumerate(stim_d)]
    driven = d.get("driven", [True] * len(lines))
    if not isinstance(driven, list) or len(driven) != len(lines) or \
            not all(isinstance(x, bool) for x in driven):
        raise ConfigError(f"{where}.driven", f"expected a list of {len(lines)} booleans")
    args = (_get(d, "output_line", where, kind=int, default=-1),
            _get(d, "t_max", where, positive=True, default=20.0),
            _get(d, "skew", where, default=0.0), tuple(driven))
    try:
        return GateNetworkSpec(tuple(lines), tuple(couplings), tuple(stimuli), *args)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def parse_config(doc: dict, name: str = "scenario", source: Path | None = None) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "scenario must be a JSON object")
    mode = doc.get("mode")
    if mode is not None and mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}, got {mode!r}")
    cfg = ScenarioConfig(mode, _get(doc, "name", "scenario", kind=str, default=name),
                         source=source)
    cfg.dt = _get(doc, "dt", "", positive=True, default=DEFAULT_DT)
    t_end = doc.get("t_end")
    cfg.t_end = None if t_end is None else _get(doc, "t_end", "", positive=True)
    if cfg.t_end is not None and cfg.t_end < cfg.dt:
        raise ConfigError("t_end", f"must be at least dt ({cfg.dt})")
    se = doc.get("sample_every")
    cfg.sample_every = None if se is None else _get(doc, "sample_every", "", kind=int, minimum=1)
    cfg.samples = _get(doc, "samples", "", kind=int, minimum=2, default=201)
    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output", "expected an object")
    cfg.out_dir = Path(_get(out, "dir", "output", kind=str, default="out"))
    if "line" in doc:
        cfg.line = parse_line(doc["line"])
    if "stimulus" in doc:
        cfg.stimulus = parse_stimulus(doc["stimulus"])
    if "network" in doc:
        cfg.network = parse_network(_obj(doc, "network", ""))
    if "sweep" in doc:
        s = _obj(doc, "sweep", "")
        cfg.sweep = SweepSettings(_get(s, "r_c_min", "sweep", positive=True, default=10.0),
                                  _get(s, "r_c_max", "sweep", positive=True, default=300.0),
                                  _get(s, "steps", "sweep", kind=int, minimum=1, default=31),
                                  _get(s, "workers", "sweep", kind=int, minimum=1, default=1))
        if cfg.sweep.r_c_max < cfg.sweep.r_c_min:
            raise ConfigError("sweep.r_c_max", "must be >= r_c_min")
    return cfg


def require(cfg: ScenarioConfig, mode: str) -> None:
    """Check that ``cfg`` carries what ``mode`` needs."""
    if cfg.mode is not None and cfg.mode != mode:
        raise ConfigError("mode", f"scenario is for {cfg.mode!r}, not {mode!r}")
    if mode in ("simulate", "analytic", "compare") and cfg.line is None:
        raise ConfigError("line", "missing required section")
    if mode in ("simulate", "compare") and cfg.t_end is None:
        raise ConfigError("t_end", "missing required field")
    if mode in ("gate", "sweep") and cfg.network is None:
        raise ConfigError("network", "missing required section")
    if mode == "sweep" and cfg.sweep is None:
        cfg.sweep = SweepSettings()


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("memline.presets").iterdir()
                  if p.name.endswith(".json"))


def load_config(path_or_preset: str | Path) -> ScenarioConfig:
    """Load a scenario file, or a shipped preset by bare name."""
    path = Path(path_or_preset)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
        name = path.stem
    elif str(path_or_preset) in preset_names():
        name = str(path_or_preset)
        text = resources.files("memline.presets").joinpath(f"{name}.json").read_text("utf-8")
        path = None
    else:
        raise ConfigError("", f"no such scenario file or preset: {path_or_preset} "
                              f"(presets: {', '.join(preset_names())})")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(doc, name, path)
