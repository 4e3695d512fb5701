"""The metastable memristive line: a ladder of R-M cells driven at one end.

Node ``i`` (0-based) carries the voltage across memristor ``i``.  It is tied
to the supply ``v_p`` through its bias resistor, to ground through the
memristor, to node ``i - 1`` through coupling resistor ``r[i]`` and to node
``i + 1`` through ``r[i + 1]``.  Node 0 sees the input source through
``r[0]``; the far end is open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .device import MemristorParams, MemristorState, advance_state, rate
from .tridiag import SolverError, TridiagonalSystem, solve_tridiagonal

DEFAULT_DT = 1e-4
MAX_SAMPLES = 100_000
COMPLETION_EPS = 1e-6  # fraction of (r_off - r_on)


@dataclass(frozen=True)
class Stimulus:
    """Input voltage ``V_in(t)`` applied through the first coupling resistor.

    ``baseline`` is the idle level of the source.  When left as ``None`` it
    is the resting voltage of the driven line, so an idle source draws no
    current from a line sitting in its metastable state.
    """

    kind: str = "none"
    amplitude: float = 0.0
    t_start: float = 0.0
    t_end: float = math.inf
    segments: tuple = ()
    baseline: Optional[float] = None

    KINDS = ("none", "step", "rectangular_pulse", "piecewise_constant")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown stimulus kind {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "rectangular_pulse" and not self.t_start < self.t_end:
            raise ValueError(f"pulse needs t_start < t_end, got {self.t_start} >= {self.t_end}")
        if self.kind == "piecewise_constant":
            segs = tuple((float(t), float(v)) for t, v in self.segments)
            if not segs:
                raise ValueError("piecewise_constant stimulus needs at least one segment")
            times = [t for t, _ in segs]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError("segment times must be strictly increasing")
            object.__setattr__(self, "segments", segs)

    @classmethod
    def none(cls, baseline=None) -> "Stimulus":
        return cls("none", baseline=baseline)

    @classmethod
    def step(cls, amplitude: float, t_start: float = 0.0, baseline=None) -> "Stimulus":
        return cls("step", amplitude, t_start, baseline=baseline)

    @classmethod
    def pulse(cls, amplitude: float, t_start: float, t_end: float, baseline=None) -> "Stimulus":
        return cls("rectangular_pulse", amplitude, t_start, t_end, baseline=baseline)

    @classmethod
    def piecewise(cls, segments: Sequence[tuple[float, float]], baseline=None) -> "Stimulus":
        return cls("piecewise_constant", segments=tuple(segments), baseline=baseline)

    def breakpoints(self, rest: float) -> tuple[float, list[tuple[float, float]]]:
        """Idle level and the ``(time, new value)`` change points."""
        base = rest if self.baseline is None else self.baseline
        if self.kind == "none":
            return base, []
        if self.kind == "step":
            return base, [(self.t_start, self.amplitude)]
        if self.kind == "rectangular_pulse":
            return base, [(self.t_start, self.amplitude), (self.t_end, base)]
        return base, list(self.segments)

    def value(self, t: float, rest: float = 0.0) -> float:
        v, points = self.breakpoints(rest)
        for tb, vb in points:
            if t >= tb:
                v = vb
        return v

    def schedule(self, dt: float, rest: float) -> tuple[np.ndarray, np.ndarray]:
        """Discretise onto the step grid ``t_k = k dt``.

        A change at time ``tb`` takes effect from the first grid point not
        earlier than ``tb``.  The value for step ``k`` is
        ``values[count(steps <= k)]``.
        """
        base, points = self.breakpoints(rest)
        steps = []
        values = [base]
        for tb, vb in points:
            if math.isinf(tb):
                continue
            k = max(0, math.ceil(tb / dt - 1e-9))
            if steps and steps[-1] == k:
                values[-1] = vb
            else:
                steps.append(k)
                values.append(vb)
        return np.asarray(steps, dtype=np.int64), np.asarray(values, dtype=float)

    def shifted(self, delay: float) -> "Stimulus":
        if delay == 0.0 or self.kind == "none":
            return self
        segs = tuple((t + delay, v) for t, v in self.segments)
        return replace(self, t_start=self.t_start + delay, t_end=self.t_end + delay,
                       segments=segs)


def _tuple(values, n, name, floats=True):
    if np.isscalar(values) or isinstance(values, MemristorParams):
        return (float(values) if floats else values,) * n
    values = tuple(float(v) for v in values) if floats else tuple(values)
    if len(values) != n:
        raise ValueError(f"{name} needs {n} entries, got {len(values)}")
    return values


@dataclass(frozen=True)
class LineSpec:
    """Topology, supply and initial state of an N-cell line.

    ``r[i]`` couples node ``i`` to its upstream neighbour (``r[0]`` to the
    input source); ``r_bias[i]`` ties node ``i`` to the supply.
    """

    n: int
    r: tuple
    r_bias: tuple
    v_p: float
    device: tuple
    initial_memristance: tuple

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        n = int(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", _tuple(self.r, n, "r"))
        object.__setattr__(self, "r_bias", _tuple(self.r_bias, n, "r_bias"))
        object.__setattr__(self, "device", _tuple(self.device, n, "device", floats=False))
        object.__setattr__(self, "initial_memristance",
                           _tuple(self.initial_memristance, n, "initial_memristance"))
        for name in ("r", "r_bias"):
            vals = getattr(self, name)
            if not all(v > 0.0 for v in vals):
                raise ValueError(f"all {name} resistances must be positive, got {vals}")
        for i, (dev, rm) in enumerate(zip(self.device, self.initial_memristance)):
            if not isinstance(dev, MemristorParams):
                raise TypeError(f"device[{i}] must be MemristorParams")
            if not dev.contains(rm):
                raise ValueError(
                    f"initial_memristance[{i}]={rm} outside [{dev.r_on}, {dev.r_off}]")

    @classmethod
    def homogeneous(cls, n: int = 10, r: float = 50.0, r_bias: float = 25.0,
                    v_p: float = 5.0, device: MemristorParams | None = None,
                    r_m0: float | None = None) -> "LineSpec":
        device = device or MemristorParams()
        r_m0 = device.r_on if r_m0 is None else r_m0
        return cls(n, r, r_bias, v_p, device, r_m0)

    @property
    def rest_voltage(self) -> float:
        """Divider voltage of the first cell in its initial state."""
        rm = self.initial_memristance[0]
        return self.v_p * rm / (rm + self.r_bias[0])

    def device_arrays(self):
        f = lambda attr: np.array([getattr(d, attr) for d in self.device])
        r_on, r_off = f("r_on"), f("r_off")
        r_done = r_off - COMPLETION_EPS * (r_off - r_on)
        return r_on, r_off, f("beta"), f("v_t"), r_done

    def static_terms(self, driven: bool = True):
        """Memristor-independent parts of the nodal equations.

        Returns ``(off, diag_static, rhs_static, g_in)`` where ``off[i]`` is
        the conductance between nodes ``i`` and ``i + 1``.  With
        ``driven=False`` the input end of ``r[0]`` is left open.
        """
        n = self.n
        g = [1.0 / x for x in self.r]
        gb = [1.0 / x for x in self.r_bias]
        diag = []
        for i in range(n):
            up = g[i] if driven or i > 0 else None
            down = g[i + 1] if i + 1 < n else None
            if up is not None and down is not None:
                d = up + down
            else:
                d = up if up is not None else down
            diag.append(gb[i] if d is None else d + gb[i])
        rhs = [self.v_p / x for x in self.r_bias]
        return np.array(g[1:]), np.array(diag), np.array(rhs), g[0] if driven else 0.0


def assemble(spec: LineSpec, memristances, v_in: float) -> TridiagonalSystem:
    """Nodal equations of the line for given memristances and input level."""
    rm = np.asarray(memristances, dtype=float)
    if rm.shape != (spec.n,):
        raise ValueError(f"need {spec.n} memristances, got shape {rm.shape}")
    if not np.all(rm > 0.0):
        raise ValueError("memristances must be positive")
    for i, (dev, x) in enumerate(zip(spec.device, rm)):
        if not dev.contains(x):
            raise ValueError(f"memristance[{i}]={x} outside [{dev.r_on}, {dev.r_off}]")
    off, diag_static, rhs_static, g_in = spec.static_terms()
    diag = np.array([d + 1.0 / x for d, x in zip(diag_static, rm)])
    sub = np.zeros(spec.n)
    sup = np.zeros(spec.n)
    sub[1:] = -off
    sup[:-1] = -off
    rhs = rhs_static.copy()
    rhs[0] = rhs_static[0] + g_in * v_in
    return TridiagonalSystem(sub, diag, sup, rhs)


@dataclass
class LineState:
    """Memristances of every cell; voltages follow quasi-statically."""

    spec: LineSpec
    stimulus: Stimulus
    memristances: np.ndarray

    @classmethod
    def initial(cls, spec: LineSpec, stimulus: Stimulus | None = None) -> "LineState":
        return cls(spec, stimulus or Stimulus.none(), np.array(spec.initial_memristance))

    def voltages(self, t: float) -> np.ndarray:
        v_in = self.stimulus.value(t, self.spec.rest_voltage)
        return solve_tridiagonal(assemble(self.spec, self.memristances, v_in))


def step(state: LineState, t: float, dt: float) -> LineState:
    """Solve the voltages at ``t`` then Euler-advance every memristance."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    v = state.voltages(t)
    rm = [advance_state(MemristorState(x), vi, dt, dev).r_m
          for x, vi, dev in zip(state.memristances, v, state.spec.device)]
    return LineState(state.spec, state.stimulus, np.array(rm))


@dataclass
class SimTrace:
    """Sampled trajectory; row ``k`` of each matrix belongs to ``times[k]``."""

    times: np.ndarray
    voltages: np.ndarray
    memristances: np.ndarray
    spec: LineSpec
    dt: float = DEFAULT_DT

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        n = self.spec.n
        self.voltages = np.asarray(self.voltages, dtype=float).reshape(-1, n)
        self.memristances = np.asarray(self.memristances, dtype=float).reshape(-1, n)
        m = self.times.shape[0]
        if self.voltages.shape != (m, n) or self.memristances.shape != (m, n):
            raise ValueError("trace matrices must be (samples, n)")

    def __len__(self):
        return self.times.shape[0]


def _check_run(t_end, dt):
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end >= dt:
        raise ValueError(f"t_end={t_end} must be at least dt={dt}")
    n_steps = int(round(t_end / dt))
    return n_steps


def default_stride(n_steps: int) -> int:
    return max(1, math.ceil(n_steps / MAX_SAMPLES))


def simulate(spec: LineSpec, stim: Stimulus | None, t_end: float,
             dt: float = DEFAULT_DT, sample_every: int | None = None,
             backend: str | None = None) -> SimTrace:
    """Transient run from the initial memristances up to ``t_end``.

    Samples every ``sample_every``-th step, the final step, and both steps
    around every threshold crossing or switching completion.
    """
    n_steps = _check_run(t_end, dt)
    stride = sample_every or default_stride(n_steps)
    if stride < 1:
        raise ValueError("sample_every must be >= 1")
    stim = stim or Stimulus.none()
    off, diag_static, rhs_static, g_in = spec.static_terms()
    r_on, r_off, beta, v_t, r_done = spec.device_arrays()
    steps, values = stim.schedule(dt, spec.rest_voltage)
    k = _backend.kernels(backend)
    times, volts, mems = k.run_line(
        off, diag_static, rhs_static, g_in, np.array(spec.initial_memristance),
        r_on, r_off, beta, v_t, r_done, steps, values, float(dt), n_steps, stride)
    if not np.all(np.isfinite(volts)):
        raise SolverError("non-finite node voltage during integration")
    return SimTrace(times, volts, mems, spec, dt)


@dataclass
class EventLog:
    """Per-cell switching onset / completion times (NaN when absent)."""

    onset: np.ndarray
    completion: np.ndarray
    tau_mean: Optional[float] = None
    tau_std: Optional[float] = None
    interior: tuple = field(default=())

    @property
    def empty(self) -> bool:
        return bool(np.all(np.isnan(self.onset)) and np.all(np.isnan(self.completion)))

    def all_completed(self) -> bool:
        return bool(np.all(np.isfinite(self.completion)))

    def durations(self) -> np.ndarray:
        return self.completion - self.onset


def interior_cells(n: int) -> range:
    return range(2, n - 2)


def _first_at_or_above(col, level):
    hits = np.flatnonzero(col >= level)
    return int(hits[0]) if hits.size else None


def detect_events(trace: SimTrace) -> EventLog:
    """Locate threshold crossings and switching completions in a trace.

    Onsets are linearly interpolated between the bracketing samples.  A
    completion between two consecutive integration steps is placed where
    the Euler segment meets the target, which is exact for the integrator.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    spec = trace.spec
    n = spec.n
    t = trace.times
    onset = np.full(n, np.nan)
    completion = np.full(n, np.nan)
    for i, dev in enumerate(spec.device):
        v = trace.voltages[:, i]
        j = _first_at_or_above(v, dev.v_t)
        if j is not None:
            if j == 0:
                onset[i] = t[0]
            else:
                frac = (dev.v_t - v[j - 1]) / (v[j] - v[j - 1])
                onset[i] = t[j - 1] + frac * (t[j] - t[j - 1])
        rm = trace.memristances[:, i]
        target = dev.r_off - COMPLETION_EPS * (dev.r_off - dev.r_on)
        j = _first_at_or_above(rm, target)
        if j is not None:
            if j == 0:
                completion[i] = t[0]
                continue
            h = t[j] - t[j - 1]
            f = rate(trace.voltages[j - 1, i], MemristorState(rm[j - 1]), dev)
            if abs(h - trace.dt) <= 1e-9 * trace.dt and f > 0.0:
                completion[i] = min(t[j - 1] + (target - rm[j - 1]) / f, t[j])
            else:
                frac = (target - rm[j - 1]) / (rm[j] - rm[j - 1])
                completion[i] = t[j - 1] + frac * h
    cells = interior_cells(n)
    inner = onset[list(cells)] if len(cells) else np.array([])
    tau_mean = tau_std = None
    if inner.size >= 3 and np.all(np.isfinite(inner)):
        d = np.diff(inner)
        tau_mean, tau_std = float(d.mean()), float(d.std())
    return EventLog(onset, completion, tau_mean, tau_std, tuple(cells))


def traveling_wave_residual(trace: SimTrace, tau: float, i: int) -> float:
    """Max of ``|V_{i+1}(t) - V_i(t - tau)|`` over the samples where both exist."""
    n = trace.spec.n
    if not 0 <= i < n - 1:
        raise ValueError(f"cell pair ({i}, {i + 1}) outside a {n}-cell line")
    t = trace.times
    keep = t - tau >= t[0]
    if np.count_nonzero(keep) < 2:
        raise ValueError(f"shift tau={tau} leaves fewer than two overlapping samples")
    shifted = np.interp(t[keep] - tau, t, trace.voltages[:, i])
    return float(np.max(np.abs(trace.voltages[keep, i + 1] - shifted)))
