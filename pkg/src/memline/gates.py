"""Y-connected lines with resistive inter-line coupling acting as logic gates.

Couplings are plain resistors between any two nodes of the network.  A
driven line sees its own input source through ``r[0]``; an idle source sits
at the line's resting voltage.  In the default junction the last node of
each input line couples to the first node of the output line, whose ``r[0]``
end is left open.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .line import (DEFAULT_DT, LineSpec, SimTrace, Stimulus, _check_run, default_stride,
                   detect_events)
from .tridiag import SolverError

COMBINATIONS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Coupling:
    line_a: int
    node_a: int
    line_b: int
    node_b: int
    r_c: float


@dataclass(frozen=True)
class GateNetworkSpec:
    """Lines, couplings and per-line stimuli (``None`` for an idle input).

    Node indices may be negative, counted from the far end of the line.
    ``skew`` delays the second input's stimulus during classification.
    ``driven[k]`` is False when line ``k`` has no source on its ``r[0]`` end
    (the resistor then hangs open).
    """

    lines: tuple
    couplings: tuple = ()
    stimuli: tuple = ()
    output_line: int = -1
    t_max: float = 20.0
    skew: float = 0.0
    driven: tuple = ()

    def __post_init__(self):
        lines = tuple(self.lines)
        if not lines:
            raise ValueError("network needs at least one line")
        object.__setattr__(self, "lines", lines)
        n_lines = len(lines)
        out = self.output_line
        if not -n_lines <= out < n_lines:
            raise ValueError(f"output_line {out} out of range for {n_lines} lines")
        object.__setattr__(self, "output_line", out % n_lines)
        stimuli = tuple(self.stimuli) or (None,) * n_lines
        if len(stimuli) != n_lines:
            raise ValueError(f"need one stimulus entry per line ({n_lines}), got {len(stimuli)}")
        object.__setattr__(self, "stimuli", stimuli)
        driven = tuple(bool(d) for d in self.driven) or (True,) * n_lines
        if len(driven) != n_lines:
            raise ValueError(f"need one driven flag per line ({n_lines}), got {len(driven)}")
        object.__setattr__(self, "driven", driven)
        for k, stim in enumerate(stimuli):
            if not driven[k] and stim is not None and stim.kind != "none":
                raise ValueError(f"line {k} has an open input end but a stimulus")
        if n_lines > 1 and stimuli[self.output_line] is not None and \
                stimuli[self.output_line].kind != "none":
            raise ValueError("the output line must not receive a stimulus")
        fixed = []
        for c in self.couplings:
            c = c if isinstance(c, Coupling) else Coupling(*c)
            for line, node in ((c.line_a, c.node_a), (c.line_b, c.node_b)):
                if not 0 <= line < n_lines:
                    raise ValueError(f"coupling references missing line {line}")
                n = lines[line].n
                if not -n <= node < n:
                    raise ValueError(f"coupling references node {node} outside line {line} "
                                     f"({n} nodes)")
            c = replace(c, node_a=c.node_a % lines[c.line_a].n,
                        node_b=c.node_b % lines[c.line_b].n)
            if (c.line_a, c.node_a) == (c.line_b, c.node_b):
                raise ValueError(f"coupling {c} connects a node to itself")
            if not c.r_c > 0.0:
                raise ValueError(f"coupling resistance must be positive, got {c.r_c}")
            fixed.append(c)
        object.__setattr__(self, "couplings", tuple(fixed))
        if not self.t_max > 0.0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")

    @property
    def input_lines(self) -> tuple:
        return tuple(i for i in range(len(self.lines)) if i != self.output_line)

    @property
    def offsets(self) -> list:
        return list(itertools.accumulate([0] + [ln.n for ln in self.lines]))

    def with_coupling(self, r_c: float) -> "GateNetworkSpec":
        return replace(self, couplings=tuple(replace(c, r_c=r_c) for c in self.couplings))

    def with_inputs(self, bits: Sequence[int]) -> "GateNetworkSpec":
        """Idle every input line whose bit is 0; the second input gets ``skew``."""
        stimuli = list(self.stimuli)
        for k, (line, bit) in enumerate(zip(self.input_lines, bits)):
            stim = self.stimuli[line]
            if not bit or stim is None:
                stimuli[line] = None
            else:
                stimuli[line] = stim.shifted(self.skew) if k == 1 else stim
        return replace(self, stimuli=tuple(stimuli))


def y_gate(line: LineSpec | None = None, output: LineSpec | None = None,
           r_c: float = 50.0, stimulus: Stimulus | None = None, t_max: float = 20.0,
           input_node: int = -1, output_node: int = 0, skew: float = 0.0,
           output_driven: bool = False) -> GateNetworkSpec:
    """Two input lines joined to one output line.

    The junction couples node ``input_node`` of each input line to node
    ``output_node`` of the output line through ``r_c``.  By default the
    output line has no source of its own: the couplings are its input.
    """
    line = line or LineSpec.homogeneous()
    output = output or line
    stimulus = stimulus or Stimulus.step(5.0)
    couplings = (Coupling(0, input_node, 2, output_node, r_c),
                 Coupling(1, input_node, 2, output_node, r_c))
    return GateNetworkSpec((line, line, output), couplings, (stimulus, stimulus, None),
                           output_line=2, t_max=t_max, skew=skew,
                           driven=(True, True, output_driven))


@dataclass
class NetworkSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def solve(self) -> np.ndarray:
        return np.linalg.solve(self.matrix, self.rhs)

    def is_dominant(self) -> bool:
        a = np.abs(self.matrix)
        d = np.diag(a)
        return bool(np.all(d > a.sum(axis=1) - d))


def _static(spec: GateNetworkSpec):
    offsets = spec.offsets
    size = offsets[-1]
    g = np.zeros((size, size))
    rhs = np.zeros(size)
    src_node, src_g = [], []
    for k, line in enumerate(spec.lines):
        off, diag_static, rhs_static, g_in = line.static_terms(spec.driven[k])
        o = offsets[k]
        idx = np.arange(o, o + line.n)
        g[idx, idx] = diag_static
        if line.n > 1:
            g[idx[1:], idx[:-1]] = -off
            g[idx[:-1], idx[1:]] = -off
        rhs[idx] = rhs_static
        if spec.driven[k]:
            src_node.append(o)
            src_g.append(g_in)
    for c in spec.couplings:
        a = offsets[c.line_a] + c.node_a
        b = offsets[c.line_b] + c.node_b
        gc = 1.0 / c.r_c
        g[a, a] += gc
        g[b, b] += gc
        g[a, b] -= gc
        g[b, a] -= gc
    # every row carries its bias conductance on top of its connections, and
    # memristor terms only add to the diagonal: dominance holds at any state
    sys = NetworkSystem(g, rhs)
    if not sys.is_dominant():
        raise SolverError("network matrix is not strictly diagonally dominant")
    return g, rhs, np.array(src_node, dtype=np.int64), np.array(src_g)


def _flat_memristances(spec: GateNetworkSpec, memristances) -> np.ndarray:
    if memristances is None:
        return np.concatenate([ln.initial_memristance for ln in spec.lines])
    if len(memristances) == len(spec.lines) and all(
            np.ndim(m) == 1 for m in memristances):
        flat = np.concatenate([np.asarray(m, dtype=float) for m in memristances])
    else:
        flat = np.asarray(memristances, dtype=float)
    if flat.shape != (spec.offsets[-1],):
        raise ValueError(f"need {spec.offsets[-1]} memristances, got {flat.shape}")
    return flat


def _input_value(spec, k, t):
    stim = spec.stimuli[k] or Stimulus.none()
    return stim.value(t, spec.lines[k].rest_voltage)


def assemble_network(spec: GateNetworkSpec, memristances=None, t: float = 0.0) -> NetworkSystem:
    """Nodal system of the whole network at time ``t``.

    ``memristances`` is either one array per line or a flat vector in line
    order; ``None`` uses the initial state.
    """
    g, rhs, src_node, src_g = _static(spec)
    rm = _flat_memristances(spec, memristances)
    a = g.copy()
    a[np.diag_indices_from(a)] = np.diag(g) + 1.0 / rm
    b = rhs.copy()
    driven = [k for k in range(len(spec.lines)) if spec.driven[k]]
    for k, node, gs in zip(driven, src_node, src_g):
        b[node] = b[node] + gs * _input_value(spec, k, t)
    return NetworkSystem(a, b)


@dataclass
class NetworkTrace:
    traces: list
    spec: GateNetworkSpec

    @property
    def times(self) -> np.ndarray:
        return self.traces[0].times

    def events(self) -> list:
        return [detect_events(tr) for tr in self.traces]


def simulate_network(spec: GateNetworkSpec, dt: float = DEFAULT_DT,
                     t_end: float | None = None, sample_every: int | None = None,
                     backend: str | None = None) -> NetworkTrace:
    """Transient run of the network up to ``t_end`` (default ``t_max``)."""
    t_end = spec.t_max if t_end is None else t_end
    n_steps = _check_run(t_end, dt)
    stride = sample_every or default_stride(n_steps)
    g, rhs, src_node, src_g = _static(spec)
    steps, values, src_ptr, val_ptr = [], [], [0], [0]
    for k, line in enumerate(spec.lines):
        if not spec.driven[k]:
            continue
        stim = spec.stimuli[k] or Stimulus.none()
        s, v = stim.schedule(dt, line.rest_voltage)
        steps.append(s)
        values.append(v)
        src_ptr.append(src_ptr[-1] + len(s))
        val_ptr.append(val_ptr[-1] + len(v))
    dev = [ln.device_arrays() for ln in spec.lines]
    r_on, r_off, beta, v_t, r_done = (np.concatenate([d[j] for d in dev]) for j in range(5))
    kern = _backend.kernels(backend)
    times, volts, mems = kern.run_network(
        np.ascontiguousarray(g), rhs, src_node, src_g, np.array(src_ptr, dtype=np.int64),
        np.concatenate(steps).astype(np.int64), np.array(val_ptr, dtype=np.int64),
        np.concatenate(values), _flat_memristances(spec, None), r_on, r_off, beta, v_t,
        r_done, float(dt), n_steps, stride)
    if not np.all(np.isfinite(volts)):
        raise SolverError("non-finite node voltage during integration")
    offsets = spec.offsets
    traces = [SimTrace(times, volts[:, offsets[k]:offsets[k + 1]],
                       mems[:, offsets[k]:offsets[k + 1]], line, dt)
              for k, line in enumerate(spec.lines)]
    return NetworkTrace(traces, spec)


def check_metastable(spec: GateNetworkSpec) -> tuple[bool, float]:
    """Whether the idle network sits below threshold everywhere.

    With every input idle nothing moves below threshold, so the t = 0
    operating point holds for the whole horizon.  Returns the flag and the
    smallest margin ``v_t - V`` over all nodes.
    """
    idle = replace(spec, stimuli=(None,) * len(spec.lines))
    v = np.abs(assemble_network(idle).solve())
    v_t = np.concatenate([[d.v_t for d in ln.device] for ln in spec.lines])
    margin = float(np.min(v_t - v))
    return margin > 0.0, margin


@dataclass
class GateRow:
    output_switched: bool
    completion: Optional[float]


@dataclass
class TruthTableResult:
    rows: dict
    metastable: bool = True
    traces: dict = field(default_factory=dict, repr=False)

    def outputs(self) -> tuple:
        return tuple(int(self.rows[c].output_switched) for c in COMBINATIONS)

    @property
    def label(self) -> str:
        return {(0, 1, 1, 1): "OR", (0, 0, 0, 1): "AND",
                (0, 0, 0, 0): "NONE"}.get(self.outputs(), "OTHER")

    def monotone(self) -> bool:
        o = dict(zip(COMBINATIONS, self.outputs()))
        return all(o[lo] <= o[hi] for lo in COMBINATIONS for hi in COMBINATIONS
                   if lo[0] <= hi[0] and lo[1] <= hi[1])


def _row(spec: GateNetworkSpec, trace: NetworkTrace) -> GateRow:
    ev = detect_events(trace.traces[spec.output_line])
    done = ev.completion[-1]
    ok = bool(np.isfinite(done) and done <= spec.t_max)
    return GateRow(ok, float(done) if ok else None)


def classify_gate(spec: GateNetworkSpec, dt: float = DEFAULT_DT,
                  backend: str | None = None, keep_traces: bool = False) -> TruthTableResult:
    """Run all four input combinations of a two-input network.

    The output counts as switched when the last cell of the output line
    completes within ``t_max``.
    """
    if len(spec.input_lines) != 2:
        raise ValueError(f"classification needs exactly two input lines, got "
                         f"{len(spec.input_lines)}")
    rows, traces = {}, {}
    for bits in COMBINATIONS:
        run = spec.with_inputs(bits)
        trace = simulate_network(run, dt, backend=backend)
        rows[bits] = _row(run, trace)
        if keep_traces:
            traces[bits] = trace
    return TruthTableResult(rows, check_metastable(spec)[0], traces)


@dataclass
class SweepPoint:
    r_c: float
    table: TruthTableResult

    @property
    def label(self) -> str:
        return self.table.label


@dataclass
class SweepResult:
    """Gate label per coupling resistance, in increasing ``r_c``.

    ``windows`` maps each label to its maximal runs ``(r_min, r_max)`` on
    the grid; an empty list means the regime never occurred.
    """

    points: list
    windows: dict = field(default_factory=dict)

    def labels(self) -> list:
        return [p.label for p in self.points]

    def runs(self) -> list:
        """``(label, first index, last index)`` for each maximal run."""
        out = []
        for i, lab in enumerate(self.labels()):
            if out and out[-1][0] == lab:
                out[-1] = (lab, out[-1][1], i)
            else:
                out.append((lab, i, i))
        return out

    def contiguous(self, label: str) -> bool:
        return sum(1 for lab, _, _ in self.runs() if lab == label) <= 1

    def ordered(self, start: int = 0) -> bool:
        """OR precedes AND precedes dead coupling from grid index ``start`` on."""
        rank = {"OR": 0, "AND": 1, "NONE": 2}
        seq = [rank.get(lab, -1) for lab in self.labels()[start:]]
        return -1 not in seq and seq == sorted(seq)


def _windows(points, runs):
    out = {lab: [] for lab in ("OR", "AND", "NONE", "OTHER")}
    for lab, i, j in runs:
        out[lab].append((points[i].r_c, points[j].r_c))
    return out


def _classify_at(args):
    template, r_c, dt, backend = args
    return SweepPoint(r_c, classify_gate(template.with_coupling(r_c), dt, backend))


def sweep_coupling(template: GateNetworkSpec, r_c_range: tuple, steps: int,
                   dt: float = DEFAULT_DT, backend: str | None = None,
                   workers: int = 1) -> SweepResult:
    """Classify the gate on a log-spaced grid of coupling resistances.

    Every grid point and every input combination is an independent run;
    ``workers > 1`` spreads the grid over processes.
    """
    lo, hi = r_c_range
    if not (0.0 < lo <= hi) or steps < 1:
        raise ValueError(f"need 0 < lo <= hi and steps >= 1, got {r_c_range}, {steps}")
    grid = np.geomspace(lo, hi, steps) if steps > 1 else np.array([lo])
    jobs = [(template, float(r), dt, backend) for r in grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_classify_at, jobs))
    else:
        points = [_classify_at(j) for j in jobs]
    result = SweepResult(points)
    result.windows = _windows(points, result.runs())
    return result
