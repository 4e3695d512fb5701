"""Compare the compiled and pure-Python stepping kernels.

    python benchmarks/bench_kernels.py [--t-end 2.0] [--repeat 3]

Both backends must produce bit-identical traces; the script checks that
before reporting timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from memline import _backend
from memline.gates import simulate_network, y_gate
from memline.line import LineSpec, Stimulus, simulate


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(t_end):
    line = LineSpec.homogeneous()
    gate = y_gate(r_c=30.0, t_max=t_end).with_inputs((1, 1))
    yield ("line N=10", int(round(t_end / 1e-4)),
           lambda b: simulate(line, Stimulus.step(5.0), t_end, 1e-4, backend=b),
           lambda tr: (tr.voltages, tr.memristances))
    yield ("y-gate 3x10", int(round(t_end / 1e-4)),
           lambda b: simulate_network(gate, 1e-4, backend=b),
           lambda nt: tuple(np.hstack([getattr(t, f) for t in nt.traces])
                            for f in ("voltages", "memristances")))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=2.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    names = _backend.available()
    print(f"backends: {', '.join(names)} (default {_backend.BACKEND})")
    print(f"{'case':<14}{'steps':>9}" + "".join(f"{n + ' [s]':>14}" for n in names)
          + ("     speedup" if len(names) > 1 else ""))
    for label, steps, run, arrays in cases(args.t_end):
        res = {n: best_of(lambda: run(n), args.repeat) for n in names}
        ref = arrays(res[names[0]][1])
        for n in names[1:]:
            for a, b in zip(ref, arrays(res[n][1])):
                if not np.array_equal(a, b):
                    raise SystemExit(f"{label}: backend {n} differs from {names[0]}")
        row = f"{label:<14}{steps:>9}" + "".join(f"{res[n][0]:>14.4f}" for n in names)
        if "cython" in res and "python" in res:
            row += f"{res['python'][0] / res['cython'][0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
