"""Pure-Python time-stepping kernels.

Reference implementation of the loops in ``_ckernels.pyx``.  Both modules
perform the same floating-point operations in the same order, so a run on
either backend produces bit-identical traces.
"""

from __future__ import annotations

import numpy as np


def _rate(v, rm, r_on, r_off, beta, v_t):
    if v >= v_t:
        f = beta * (v - v_t)
    elif v <= -v_t:
        f = -(beta * (-v - v_t))
    else:
        return 0.0
    if f > 0.0 and rm >= r_off:
        return 0.0
    if f < 0.0 and rm <= r_on:
        return 0.0
    return f


def _advance(rm, f, dt, r_on, r_off):
    rm = rm + f * dt
    if rm > r_off:
        return r_off
    if rm < r_on:
        return r_on
    return rm


class _Recorder:
    """Collects strided samples plus the pair of steps around every event."""

    def __init__(self, n, r_done, v_t):
        self.n = n
        self.r_done = r_done
        self.v_t = v_t
        self.onset_seen = [False] * n
        self.done_seen = [False] * n
        self.times = []
        self.volts = []
        self.mems = []
        self.last = -1

    def _push(self, k, t, v, rm):
        self.times.append(t)
        self.volts.append(list(v))
        self.mems.append(list(rm))
        self.last = k

    def visit(self, k, t, v, rm, prev, force):
        hit = False
        for i in range(self.n):
            if not self.onset_seen[i] and v[i] >= self.v_t[i]:
                self.onset_seen[i] = True
                hit = True
            if not self.done_seen[i] and rm[i] >= self.r_done[i]:
                self.done_seen[i] = True
                hit = True
        if hit and k > 0 and self.last != k - 1:
            self._push(k - 1, *prev)
        if hit or force:
            self._push(k, t, v, rm)

    def arrays(self):
        return (np.asarray(self.times, dtype=float),
                np.asarray(self.volts, dtype=float).reshape(-1, self.n),
                np.asarray(self.mems, dtype=float).reshape(-1, self.n))


def run_line(off, diag_static, rhs_static, g_in, rm0, r_on, r_off, beta,
             v_t, r_done, stim_steps, stim_values, dt, n_steps, stride):
    """Integrate a ladder line with a Thomas solve per step.

    ``off[i]`` is the conductance between nodes ``i`` and ``i + 1`` (the
    matrix entry is its negative); the input source feeds node 0 through
    ``g_in``.  Returns ``(times, voltages, memristances)``.
    """
    n = len(diag_static)
    off = [float(x) for x in off]
    dstat = [float(x) for x in diag_static]
    bstat = [float(x) for x in rhs_static]
    r_on = [float(x) for x in r_on]
    r_off = [float(x) for x in r_off]
    beta = [float(x) for x in beta]
    v_t = [float(x) for x in v_t]
    stim_steps = [int(x) for x in stim_steps]
    stim_values = [float(x) for x in stim_values]
    rm = [float(x) for x in rm0]
    rec = _Recorder(n, [float(x) for x in r_done], v_t)
    d = [0.0] * n
    b = [0.0] * n
    x = [0.0] * n
    j = 0
    prev = None
    for k in range(n_steps + 1):
        while j < len(stim_steps) and stim_steps[j] <= k:
            j += 1
        vin = stim_values[j]
        t = k * dt
        for i in range(n):
            d[i] = dstat[i] + 1.0 / rm[i]
            b[i] = bstat[i]
        b[0] = bstat[0] + g_in * vin
        for i in range(1, n):
            a = -off[i - 1]
            f = a / d[i - 1]
            d[i] = d[i] - f * a
            b[i] = b[i] - f * b[i - 1]
        x[n - 1] = b[n - 1] / d[n - 1]
        for i in range(n - 2, -1, -1):
            s = -off[i] * x[i + 1]
            x[i] = (b[i] - s) / d[i]
        rec.visit(k, t, x, rm, prev, k % stride == 0 or k == n_steps)
        prev = (t, list(x), list(rm))
        for i in range(n):
            f = _rate(x[i], rm[i], r_on[i], r_off[i], beta[i], v_t[i])
            rm[i] = _advance(rm[i], f, dt, r_on[i], r_off[i])
    return rec.arrays()


def _pattern(g):
    """Symbolic fill-in of Gaussian elimination without pivoting."""
    n = g.shape[0]
    nz = [set(np.flatnonzero(g[i]).tolist()) for i in range(n)]
    lower = []
    upper = []
    for k in range(n):
        rows = sorted(i for i in nz[k] if i > k)
        cols = sorted(c for c in nz[k] if c > k)
        for i in rows:
            nz[i].update(cols)
        lower.append(rows)
        upper.append(cols)
    return lower, upper


def run_network(g, rhs_static, src_node, src_g, src_ptr, stim_steps,
                val_ptr, stim_values, rm0, r_on, r_off, beta, v_t, r_done,
                dt, n_steps, stride):
    """Integrate a general resistive network with dense elimination per step.

    ``g`` holds every conductance except the memristor terms.  Source ``s``
    drives ``src_node[s]`` through ``src_g[s]``; its schedule is
    ``stim_steps[src_ptr[s]:src_ptr[s+1]]`` with values
    ``stim_values[val_ptr[s]:val_ptr[s+1]]``.
    """
    n = g.shape[0]
    gl = [[float(v) for v in row] for row in np.asarray(g)]
    lower, upper = _pattern(np.asarray(g))
    bstat = [float(x) for x in rhs_static]
    r_on = [float(x) for x in r_on]
    r_off = [float(x) for x in r_off]
    beta = [float(x) for x in beta]
    v_t = [float(x) for x in v_t]
    rm = [float(x) for x in rm0]
    n_src = len(src_node)
    sched = []
    for s in range(n_src):
        steps = [int(v) for v in stim_steps[src_ptr[s]:src_ptr[s + 1]]]
        vals = [float(v) for v in stim_values[val_ptr[s]:val_ptr[s + 1]]]
        sched.append((int(src_node[s]), float(src_g[s]), steps, vals))
    pos = [0] * n_src
    rec = _Recorder(n, [float(x) for x in r_done], v_t)
    x = [0.0] * n
    prev = None
    for k in range(n_steps + 1):
        t = k * dt
        a = [row[:] for row in gl]
        b = bstat[:]
        for i in range(n):
            a[i][i] = gl[i][i] + 1.0 / rm[i]
        for s in range(n_src):
            node, gs, steps, vals = sched[s]
            while pos[s] < len(steps) and steps[pos[s]] <= k:
                pos[s] += 1
            b[node] = b[node] + gs * vals[pos[s]]
        for kk in range(n):
            piv = a[kk][kk]
            rowk = a[kk]
            for i in lower[kk]:
                rowi = a[i]
                f = rowi[kk] / piv
                for c in upper[kk]:
                    rowi[c] = rowi[c] - f * rowk[c]
                b[i] = b[i] - f * b[kk]
        for i in range(n - 1, -1, -1):
            s_ = 0.0
            rowi = a[i]
            for c in upper[i]:
                s_ = s_ + rowi[c] * x[c]
            x[i] = (b[i] - s_) / rowi[i]
        rec.visit(k, t, x, rm, prev, k % stride == 0 or k == n_steps)
        prev = (t, list(x), list(rm))
        for i in range(n):
            f = _rate(x[i], rm[i], r_on[i], r_off[i], beta[i], v_t[i])
            rm[i] = _advance(rm[i], f, dt, r_on[i], r_off[i])
    return rec.arrays()
