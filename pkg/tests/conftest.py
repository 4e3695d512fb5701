from __future__ import annotations

import numpy as np
import pytest

from memline.analytic import HomogeneousLineParams, summarize
from memline.device import MemristorParams
from memline.line import LineSpec, Stimulus, simulate

# verdict lines from test_acceptance, echoed in the terminal summary
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_spec() -> LineSpec:
    return LineSpec.homogeneous()


@pytest.fixture(scope="session")
def ref_params() -> HomogeneousLineParams:
    return HomogeneousLineParams()


@pytest.fixture(scope="session")
def ref_trace(ref_spec):
    return simulate(ref_spec, Stimulus.step(5.0), t_end=8.0, dt=1e-4, sample_every=10)


def random_feasible(rng: np.random.Generator, count: int) -> list:
    """Rejection-sample homogeneous lines the closed-form theory accepts."""
    out = []
    while len(out) < count:
        r_on = rng.uniform(1.0, 20.0)
        dev = MemristorParams(r_on, r_on * rng.uniform(3.0, 50.0),
                              rng.uniform(1.0, 1000.0), rng.uniform(0.2, 3.0))
        p = HomogeneousLineParams(rng.uniform(10.0, 200.0), rng.uniform(5.0, 100.0),
                                  rng.uniform(1.0, 10.0), dev)
        if summarize(p).feasible:
            out.append(p)
    return out


def truncated_voltages(r_m: float, p: HomogeneousLineParams) -> np.ndarray:
    """Nodes i-1, i, i+1 solved directly, with i-2 at V_off and i+2 at V_on.

    Independent of the closed-form coefficients: it only restates the
    nodal equations for a switched left side and an unswitched right side.
    """
    d = p.device
    v_on = d.r_on / (d.r_on + p.r_bias) * p.v_p
    v_off = d.r_off / (d.r_off + p.r_bias) * p.v_p
    rm = (d.r_off, r_m, d.r_on)
    a = np.zeros((3, 3))
    b = np.full(3, p.v_p / p.r_bias)
    for k in range(3):
        a[k, k] = 2.0 / p.r + 1.0 / p.r_bias + 1.0 / rm[k]
        if k > 0:
            a[k, k - 1] = -1.0 / p.r
        if k < 2:
            a[k, k + 1] = -1.0 / p.r
    b[0] += v_off / p.r
    b[2] += v_on / p.r
    return np.linalg.solve(a, b)


@pytest.fixture(scope="session")
def default_sweep():
    """Coupling sweep at the shipped preset grid, with its wall time."""
    import time

    from memline.gates import sweep_coupling, y_gate

    t0 = time.perf_counter()
    result = sweep_coupling(y_gate(), (10.0, 300.0), 31, dt=1e-4)
    return result, time.perf_counter() - t0
