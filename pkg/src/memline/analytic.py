"""Closed-form theory of edge propagation in the independent-dynamics limit.

Only the switching cell ``i`` evolves.  Its upstream neighbour is frozen at
``r_off``, its downstream neighbour at ``r_on``, and the next-nearest nodes
are pinned to the uniform voltages ``v_off`` / ``v_on``.  Eliminating the
neighbours leaves a Moebius-type map from memristance to node voltage that
integrates in closed form.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .device import MemristorParams
from .line import LineSpec

VERIFY_TOL = 1e-9  # V


class InfeasibleError(ValueError):
    """The approximation predicts no self-sustained propagation."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


@dataclass(frozen=True)
class HomogeneousLineParams:
    """Uniform line: coupling ``r``, bias ``r_bias`` (kOhm), supply ``v_p`` (V)."""

    r: float = 50.0
    r_bias: float = 25.0
    v_p: float = 5.0
    device: MemristorParams = MemristorParams()

    def __post_init__(self):
        if not (self.r > 0 and self.r_bias > 0):
            raise ValueError(f"resistances must be positive (r={self.r}, r_bias={self.r_bias})")
        if self.v_p < 0:
            raise ValueError(f"v_p must be non-negative, got {self.v_p}")

    @classmethod
    def from_line(cls, spec: LineSpec) -> "HomogeneousLineParams":
        if len(set(spec.r)) != 1 or len(set(spec.r_bias)) != 1 or len(set(spec.device)) != 1:
            raise ValueError("analytic theory needs a homogeneous line")
        return cls(spec.r[0], spec.r_bias[0], spec.v_p, spec.device[0])


@dataclass(frozen=True)
class Coefficients:
    y_on: float
    y_off: float
    gamma_on: float
    gamma_off: float
    y1: float
    y2: float


def uniform_voltages(p: HomogeneousLineParams) -> tuple[float, float]:
    """Node voltage of a line sitting entirely in ``r_on`` / ``r_off``."""
    d = p.device
    v_on = d.r_on / (d.r_on + p.r_bias) * p.v_p
    v_off = d.r_off / (d.r_off + p.r_bias) * p.v_p
    return v_on, v_off


def coefficients(p: HomogeneousLineParams) -> Coefficients:
    r, rb, d = p.r, p.r_bias, p.device
    y_on = 2.0 / r + 1.0 / rb + 1.0 / d.r_on
    y_off = 2.0 / r + 1.0 / rb + 1.0 / d.r_off

    def gamma(rx, y):
        return (r * (rb + rx) + rb * rx) / (r * rb * (rb + rx) * y)

    def load(rx, y):
        return (r * (rb + rx) + rb * rx) / (r * r * rb * (rb + rx) * y)

    y1 = 1.0 / rb + load(d.r_off, y_off) + load(d.r_on, y_on)
    y2 = 2.0 / r + 1.0 / rb - (1.0 / y_on + 1.0 / y_off) / (r * r)
    return Coefficients(y_on, y_off, gamma(d.r_on, y_on), gamma(d.r_off, y_off), y1, y2)


def _check_range(r_m, p):
    if not p.device.contains(r_m):
        raise ValueError(f"r_m={r_m} outside [{p.device.r_on}, {p.device.r_off}]")


def v_center(r_m: float, p: HomogeneousLineParams) -> float:
    """Voltage across the switching memristor at memristance ``r_m``."""
    _check_range(r_m, p)
    c = coefficients(p)
    return p.v_p * c.y1 * r_m / (c.y2 * r_m + 1.0)


def v_next(r_m: float, p: HomogeneousLineParams) -> float:
    """Downstream neighbour voltage while the centre cell is at ``r_m``."""
    c = coefficients(p)
    return v_center(r_m, p) / (p.r * c.y_on) + c.gamma_on * p.v_p


def v_prev(r_m: float, p: HomogeneousLineParams) -> float:
    """Upstream neighbour voltage while the centre cell is at ``r_m``."""
    c = coefficients(p)
    return v_center(r_m, p) / (p.r * c.y_off) + c.gamma_off * p.v_p


def _drive(p: HomogeneousLineParams, c: Coefficients) -> float:
    return c.y1 * p.v_p - c.y2 * p.device.v_t


def check_log_domain(p: HomogeneousLineParams) -> None:
    """Raise :class:`InfeasibleError` if the closed-form time law is undefined."""
    c = coefficients(p)
    a = _drive(p, c)
    if not a > 0.0:
        raise InfeasibleError("log_domain", f"Y1*Vp - Y2*Vt = {a:.6g} is not positive")
    if not a * p.device.r_on - p.device.v_t > 0.0:
        raise InfeasibleError(
            "log_domain",
            f"switching cell starts below threshold: (Y1*Vp - Y2*Vt)*R_on - Vt = "
            f"{a * p.device.r_on - p.device.v_t:.6g}")


def time_of_memristance(r_m: float, p: HomogeneousLineParams) -> float:
    """Time for the switching memristor to go from ``r_on`` to ``r_m``."""
    _check_range(r_m, p)
    check_log_domain(p)
    c = coefficients(p)
    d = p.device
    a = _drive(p, c)
    lin = c.y2 * (r_m - d.r_on) / a
    log = c.y1 * p.v_p / (a * a) * math.log((a * r_m - d.v_t) / (a * d.r_on - d.v_t))
    return (lin + log) / d.beta


def switching_time(p: HomogeneousLineParams) -> float:
    return time_of_memristance(p.device.r_off, p)


def memristance_at_time(t: float, p: HomogeneousLineParams) -> float:
    """Numerical inverse of :func:`time_of_memristance` on ``[0, T]``."""
    d = p.device
    total = switching_time(p)
    if not 0.0 <= t <= total:
        raise ValueError(f"t={t} outside [0, {total}]")
    if t == 0.0:
        return d.r_on
    if t == total:
        return d.r_off
    return brentq(lambda x: time_of_memristance(x, p) - t, d.r_on, d.r_off,
                  xtol=1e-13, rtol=4 * np.finfo(float).eps)


def rm_tau_as_printed(p: HomogeneousLineParams) -> float:
    """Trigger memristance from the closed form with the flipped denominator.

    Negative of :func:`rm_at_tau` whenever both exist; kept only so reports
    can show the discrepancy.
    """
    c = coefficients(p)
    q = p.r * c.y_on * (p.device.v_t - c.gamma_on * p.v_p)
    den = c.y2 * q - c.y1 * p.v_p
    return q / den if den != 0.0 else math.nan


def rm_at_tau(p: HomogeneousLineParams) -> float:
    """Memristance of cell ``i`` at which cell ``i + 1`` reaches threshold.

    Solves ``v_next(R) = v_t`` by inverting the Moebius map, then verifies
    the root.  Returns ``r_on`` when the neighbour is already at threshold
    as soon as cell ``i`` starts switching.
    """
    d = p.device
    c = coefficients(p)
    if v_next(d.r_on, p) >= d.v_t:
        return d.r_on
    if v_next(d.r_off, p) < d.v_t:
        raise InfeasibleError(
            "trigger", f"downstream cell never reaches threshold (v_next(R_off) = "
                       f"{v_next(d.r_off, p):.6g} V < V_t)")
    q = p.r * c.y_on * (d.v_t - c.gamma_on * p.v_p)
    root = q / (c.y1 * p.v_p - c.y2 * q)
    if not d.r_on < root <= d.r_off:
        raise InfeasibleError("trigger", f"trigger root {root:.6g} kOhm outside (R_on, R_off]")
    err = abs(v_next(root, p) - d.v_t)
    if err > VERIFY_TOL:
        raise ArithmeticError(f"trigger root fails verification by {err:.3g} V")
    return root


def propagation_delay(p: HomogeneousLineParams) -> float:
    """Edge propagation time per cell."""
    return time_of_memristance(rm_at_tau(p), p)


@dataclass(frozen=True)
class Metastability:
    metastable: bool
    margin: float
    self_sustaining: bool


def metastability_check(p: HomogeneousLineParams) -> Metastability:
    v_on, _ = uniform_voltages(p)
    v_t = p.device.v_t
    return Metastability(v_on < v_t, v_t - v_on, v_center(p.device.r_on, p) >= v_t)


@dataclass
class AnalyticCurve:
    t: np.ndarray
    r_m: np.ndarray
    v: np.ndarray


def analytic_waveforms(p: HomogeneousLineParams, samples: int = 201) -> AnalyticCurve:
    """Switching trajectory of one cell, swept in memristance."""
    if samples < 2:
        raise ValueError("need at least two samples")
    d = p.device
    check_log_domain(p)
    r_m = np.linspace(d.r_on, d.r_off, samples)
    r_m[-1] = d.r_off
    t = np.array([time_of_memristance(x, p) for x in r_m])
    v = np.array([v_center(x, p) for x in r_m])
    return AnalyticCurve(t, r_m, v)


@dataclass
class AnalyticSummary:
    v_on: float
    v_off: float
    y_on: float
    y_off: float
    gamma_on: float
    gamma_off: float
    y1: float
    y2: float
    metastable: bool
    margin: float
    self_sustaining: bool
    log_domain_valid: bool
    rm_tau: Optional[float]
    rm_tau_printed: float
    tau: Optional[float]
    t_switch: Optional[float]
    infeasible: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return self.infeasible is None

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(p: HomogeneousLineParams) -> AnalyticSummary:
    """Every analytic quantity plus the feasibility diagnostics."""
    v_on, v_off = uniform_voltages(p)
    c = coefficients(p)
    m = metastability_check(p)
    reasons = []
    log_ok = True
    try:
        check_log_domain(p)
    except InfeasibleError as exc:
        log_ok = False
        reasons.append(str(exc))
    rm_tau = tau = t_sw = None
    if log_ok:
        t_sw = switching_time(p)
        try:
            rm_tau = rm_at_tau(p)
            tau = time_of_memristance(rm_tau, p)
        except InfeasibleError as exc:
            reasons.append(str(exc))
    if not m.metastable:
        reasons.append(f"metastability: V_on = {v_on:.6g} V is not below V_t")
    return AnalyticSummary(
        v_on, v_off, c.y_on, c.y_off, c.gamma_on, c.gamma_off, c.y1, c.y2,
        m.metastable, m.margin, m.self_sustaining, log_ok, rm_tau,
        rm_tau_as_printed(p), tau, t_sw, "; ".join(reasons) or None)
