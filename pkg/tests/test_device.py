from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from memline.device import (MemristorParams, MemristorState, advance_state, clamp,
                            memristor_current, rate)

P = MemristorParams()
volts = st.floats(-20.0, 20.0, allow_nan=False)
mems = st.floats(5.0, 100.0, allow_nan=False)


def test_defaults():
    assert (P.r_on, P.r_off, P.beta, P.v_t) == (5.0, 100.0, 100.0, 1.0)


@pytest.mark.parametrize("kw", [dict(r_on=0.0), dict(r_on=10.0, r_off=5.0),
                                dict(beta=-1.0), dict(v_t=-0.1), dict(r_off=math.inf)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        MemristorParams(**kw)


@pytest.mark.parametrize("v, r, i", [(0.0, 5.0, 0.0), (5.0, 5.0, 1.0), (-2.0, 100.0, -0.02)])
def test_current_is_ohmic(v, r, i):
    assert memristor_current(v, MemristorState(r)) == pytest.approx(i, abs=1e-15)


def test_rate_examples():
    s = MemristorState(50.0)
    assert rate(0.5, s, P) == 0.0
    assert rate(1.0, s, P) == 0.0
    assert rate(2.0, s, P) == pytest.approx(100.0)
    assert rate(-2.0, s, P) == pytest.approx(-100.0)


def test_rate_zero_at_active_bound():
    assert rate(3.0, MemristorState(P.r_off), P) == 0.0
    assert rate(-3.0, MemristorState(P.r_on), P) == 0.0
    assert rate(-3.0, MemristorState(P.r_off), P) < 0.0


def test_advance_examples():
    assert advance_state(MemristorState(5.0), 0.9, 0.01, P).r_m == 5.0
    assert advance_state(MemristorState(5.0), 2.0, 0.01, P).r_m == pytest.approx(6.0)
    assert advance_state(MemristorState(99.95), 3.0, 0.01, P).r_m == 100.0


def test_advance_clamps():
    s = advance_state(MemristorState(99.0), 5.0, 1.0, P)
    assert s.r_m == P.r_off
    s = advance_state(MemristorState(6.0), -5.0, 1.0, P)
    assert s.r_m == P.r_on


def test_advance_rejects_bad_dt():
    with pytest.raises(ValueError):
        advance_state(MemristorState(10.0), 2.0, 0.0, P)


@given(volts, mems)
def test_rate_sign_follows_voltage(v, r):
    f = rate(v, MemristorState(r), P)
    assert f == 0.0 or math.copysign(1.0, f) == math.copysign(1.0, v)


@given(st.floats(-1.0, 1.0), mems)
def test_subthreshold_is_frozen(v, r):
    assert rate(v, MemristorState(r), P) == 0.0


@given(volts, mems, st.floats(1e-6, 1.0))
def test_advance_stays_in_bounds(v, r, dt):
    assert P.contains(advance_state(MemristorState(r), v, dt, P).r_m)


@given(st.floats(-1e3, 1e3))
def test_clamp_idempotent(r):
    c = clamp(r, P)
    assert clamp(c, P) == c and P.contains(c)


@given(st.floats(1.0, 20.0), st.floats(5.5, 99.5))
def test_odd_symmetry(v, r):
    s = MemristorState(r)
    assert rate(-v, s, P) == -rate(v, s, P)


@given(st.floats(1.0, 19.0), st.floats(1e-3, 1.0), st.floats(5.5, 99.5))
def test_rate_increasing_in_voltage(v, dv, r):
    s = MemristorState(r)
    assert rate(v + dv, s, P) > rate(v, s, P)


@given(st.lists(st.tuples(volts, st.floats(1e-4, 0.1)), max_size=50))
def test_clamped_under_any_sequence(seq):
    s = MemristorState(5.0)
    for v, dt in seq:
        s = advance_state(s, v, dt, P)
        assert P.contains(s.r_m)
