"""Metastable memristive lines: transient simulation, analytic theory and gates."""

from ._backend import BACKEND
from .device import MemristorParams, MemristorState, advance_state, memristor_current, rate
from .line import (
    EventLog,
    LineSpec,
    LineState,
    SimTrace,
    Stimulus,
    assemble,
    detect_events,
    simulate,
    step,
    traveling_wave_residual,
)
from .tridiag import SolverError, TridiagonalSystem, solve_tridiagonal

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "MemristorParams", "MemristorState", "advance_state", "memristor_current",
    "rate", "EventLog", "LineSpec", "LineState", "SimTrace", "Stimulus", "assemble",
    "detect_events", "simulate", "step", "traveling_wave_residual", "SolverError",
    "TridiagonalSystem", "solve_tridiagonal",
]
