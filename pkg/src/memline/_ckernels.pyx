# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels.

Same arithmetic, same order as ``_pykernels``; see that module for the
argument conventions.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _rate(double v, double rm, double r_on, double r_off,
                         double beta, double v_t) noexcept nogil:
    cdef double f
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


cdef inline double _advance(double rm, double f, double dt, double r_on,
                            double r_off) noexcept nogil:
    rm = rm + f * dt
    if rm > r_off:
        return r_off
    if rm < r_on:
        return r_on
    return rm


cdef class _Recorder:
    cdef Py_ssize_t n, count, cap
    cdef long last
    cdef double[:, ::1] volts, mems
    cdef double[::1] times, r_done, v_t
    cdef char[::1] onset_seen, done_seen
    cdef object _t, _v, _m

    def __init__(self, Py_ssize_t n, Py_ssize_t cap, double[::1] r_done,
                 double[::1] v_t):
        self.n = n
        self.cap = cap
        self.count = 0
        self.last = -1
        self._t = np.empty(cap)
        self._v = np.empty((cap, n))
        self._m = np.empty((cap, n))
        self.times = self._t
        self.volts = self._v
        self.mems = self._m
        self.r_done = r_done
        self.v_t = v_t
        self.onset_seen = np.zeros(n, dtype=np.int8)
        self.done_seen = np.zeros(n, dtype=np.int8)

    cdef void _push(self, long k, double t, double[::1] v,
                    double[::1] rm) noexcept:
        cdef Py_ssize_t i, c = self.count
        self.times[c] = t
        for i in range(self.n):
            self.volts[c, i] = v[i]
            self.mems[c, i] = rm[i]
        self.count = c + 1
        self.last = k

    cdef void visit(self, long k, double t, double[::1] v, double[::1] rm,
                    double tp, double[::1] vp, double[::1] rmp,
                    bint force) noexcept:
        cdef Py_ssize_t i
        cdef bint hit = False
        for i in range(self.n):
            if not self.onset_seen[i] and v[i] >= self.v_t[i]:
                self.onset_seen[i] = 1
                hit = True
            if not self.done_seen[i] and rm[i] >= self.r_done[i]:
                self.done_seen[i] = 1
                hit = True
        if hit and k > 0 and self.last != k - 1:
            self._push(k - 1, tp, vp, rmp)
        if hit or force:
            self._push(k, t, v, rm)

    def arrays(self):
        c = self.count
        return self._t[:c].copy(), self._v[:c].copy(), self._m[:c].copy()


def _capacity(long n_steps, long stride, Py_ssize_t n):
    return n_steps // stride + 2 + 4 * n


def run_line(double[::1] off, double[::1] diag_static,
             double[::1] rhs_static, double g_in, double[::1] rm0,
             double[::1] r_on, double[::1] r_off, double[::1] beta,
             double[::1] v_t, double[::1] r_done, long[::1] stim_steps,
             double[::1] stim_values, double dt, long n_steps, long stride):
    cdef Py_ssize_t n = diag_static.shape[0]
    cdef Py_ssize_t i, j = 0, n_stim = stim_steps.shape[0]
    cdef long k
    cdef double vin, t, tp = 0.0, a, f, s
    cdef double[::1] rm = np.array(rm0, dtype=float)
    cdef double[::1] d = np.empty(n)
    cdef double[::1] b = np.empty(n)
    cdef double[::1] x = np.zeros(n)
    cdef double[::1] xp = np.zeros(n)
    cdef double[::1] rmp = np.zeros(n)
    cdef _Recorder rec = _Recorder(n, _capacity(n_steps, stride, n),
                                   r_done, v_t)
    for k in range(n_steps + 1):
        while j < n_stim and stim_steps[j] <= k:
            j += 1
        vin = stim_values[j]
        t = k * dt
        for i in range(n):
            d[i] = diag_static[i] + 1.0 / rm[i]
            b[i] = rhs_static[i]
        b[0] = rhs_static[0] + g_in * vin
        for i in range(1, n):
            a = -off[i - 1]
            f = a / d[i - 1]
            d[i] = d[i] - f * a
            b[i] = b[i] - f * b[i - 1]
        x[n - 1] = b[n - 1] / d[n - 1]
        for i in range(n - 2, -1, -1):
            s = -off[i] * x[i + 1]
            x[i] = (b[i] - s) / d[i]
        rec.visit(k, t, x, rm, tp, xp, rmp,
                  k % stride == 0 or k == n_steps)
        tp = t
        for i in range(n):
            xp[i] = x[i]
            rmp[i] = rm[i]
            f = _rate(x[i], rm[i], r_on[i], r_off[i], beta[i], v_t[i])
            rm[i] = _advance(rm[i], f, dt, r_on[i], r_off[i])
    return rec.arrays()


def run_network(double[:, ::1] g, double[::1] rhs_static, long[::1] src_node,
                double[::1] src_g, long[::1] src_ptr, long[::1] stim_steps,
                long[::1] val_ptr, double[::1] stim_values, double[::1] rm0,
                double[::1] r_on, double[::1] r_off, double[::1] beta,
                double[::1] v_t, double[::1] r_done, double dt, long n_steps,
                long stride):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t n_src = src_node.shape[0]
    cdef Py_ssize_t i, c, kk, s
    cdef long k, p
    cdef double t, tp = 0.0, piv, f, acc
    cdef double[::1] rm = np.array(rm0, dtype=float)
    cdef double[:, ::1] a = np.empty((n, n))
    cdef double[::1] b = np.empty(n)
    cdef double[::1] x = np.zeros(n)
    cdef double[::1] xp = np.zeros(n)
    cdef double[::1] rmp = np.zeros(n)
    cdef long[::1] pos = np.array(src_ptr[:n_src], dtype=np.int_)
    cdef _Recorder rec = _Recorder(n, _capacity(n_steps, stride, n),
                                   r_done, v_t)
    for k in range(n_steps + 1):
        t = k * dt
        for i in range(n):
            for c in range(n):
                a[i, c] = g[i, c]
            a[i, i] = g[i, i] + 1.0 / rm[i]
            b[i] = rhs_static[i]
        for s in range(n_src):
            p = pos[s]
            while p < src_ptr[s + 1] and stim_steps[p] <= k:
                p += 1
            pos[s] = p
            b[src_node[s]] = b[src_node[s]] + src_g[s] * stim_values[
                val_ptr[s] + p - src_ptr[s]]
        for kk in range(n):
            piv = a[kk, kk]
            for i in range(kk + 1, n):
                if a[i, kk] == 0.0:
                    continue
                f = a[i, kk] / piv
                for c in range(kk + 1, n):
                    if a[kk, c] != 0.0:
                        a[i, c] = a[i, c] - f * a[kk, c]
                b[i] = b[i] - f * b[kk]
        for i in range(n - 1, -1, -1):
            acc = 0.0
            for c in range(i + 1, n):
                if a[i, c] != 0.0:
                    acc = acc + a[i, c] * x[c]
            x[i] = (b[i] - acc) / a[i, i]
        rec.visit(k, t, x, rm, tp, xp, rmp,
                  k % stride == 0 or k == n_steps)
        tp = t
        for i in range(n):
            xp[i] = x[i]
            rmp[i] = rm[i]
            f = _rate(x[i], rm[i], r_on[i], r_off[i], beta[i], v_t[i])
            rm[i] = _advance(rm[i], f, dt, r_on[i], r_off[i])
    return rec.arrays()
