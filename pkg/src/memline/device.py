"""Threshold-type bipolar memristor.

Units throughout the package: resistance in kOhm, voltage in V, time in the
abstract unit t0, switching rate ``beta`` in kOhm / (V t0).  Currents come
out in mA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MemristorParams:
    """Device constants of the threshold memristor model."""

    r_on: float = 5.0
    r_off: float = 100.0
    beta: float = 100.0
    v_t: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.r_on, self.r_off, self.beta, self.v_t)):
            raise ValueError("device constants must be finite")
        if not 0.0 < self.r_on < self.r_off:
            raise ValueError(
                f"need 0 < r_on < r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.v_t > 0.0:
            raise ValueError(f"v_t must be positive, got {self.v_t}")

    def contains(self, r_m: float) -> bool:
        return self.r_on <= r_m <= self.r_off


@dataclass(frozen=True)
class MemristorState:
    """Instantaneous memristance ``r_m`` (kOhm)."""

    r_m: float

    def __post_init__(self):
        if not self.r_m > 0.0:
            raise ValueError(f"memristance must be positive, got {self.r_m}")


def memristor_current(v: float, state: MemristorState) -> float:
    """Ohmic current through the device, in mA."""
    return v / state.r_m


def rate(v: float, state: MemristorState, params: MemristorParams) -> float:
    """Memristance evolution rate dR_M/dt in kOhm/t0.

    Zero inside the dead zone ``|v| < v_t`` and whenever the change would
    push ``r_m`` past the bound it already sits on.
    """
    if v >= params.v_t:
        f = params.beta * (v - params.v_t)
    elif v <= -params.v_t:
        f = -(params.beta * (-v - params.v_t))
    else:
        return 0.0
    if f > 0.0 and state.r_m >= params.r_off:
        return 0.0
    if f < 0.0 and state.r_m <= params.r_on:
        return 0.0
    return f


def clamp(r_m: float, params: MemristorParams) -> float:
    if r_m > params.r_off:
        return params.r_off
    if r_m < params.r_on:
        return params.r_on
    return r_m


def advance_state(state: MemristorState, v: float, dt: float,
                  params: MemristorParams) -> MemristorState:
    """One explicit Euler step of the memristance, clamped to the bounds."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    f = rate(v, state, params)
    return MemristorState(clamp(state.r_m + f * dt, params))

