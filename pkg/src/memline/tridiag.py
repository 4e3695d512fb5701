"""Tridiagonal nodal systems and their elimination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SolverError(ArithmeticError):
    """A nodal system could not be solved (malformed or not dominant)."""


@dataclass
class TridiagonalSystem:
    """``sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]``.

    All four vectors have length n; ``sub[0]`` and ``sup[-1]`` are ignored
    and conventionally zero.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.sup = np.asarray(self.sup, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.diag.shape[0]
        for name in ("sub", "sup", "rhs"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def off_sums(self) -> np.ndarray:
        lo = np.abs(self.sub).copy()
        hi = np.abs(self.sup).copy()
        lo[0] = 0.0
        hi[-1] = 0.0
        return lo + hi

    def is_dominant(self) -> bool:
        return bool(np.all(self.diag > self.off_sums()))

    def dense(self) -> np.ndarray:
        n = self.n
        a = np.diag(self.diag)
        if n > 1:
            a[np.arange(1, n), np.arange(n - 1)] = self.sub[1:]
            a[np.arange(n - 1), np.arange(1, n)] = self.sup[:-1]
        return a

    def residual(self, x) -> np.ndarray:
        return self.dense() @ np.asarray(x, dtype=float) - self.rhs


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas elimination without pivoting.

    Requires strict diagonal dominance, which guarantees non-zero pivots.
    Raises :class:`SolverError` otherwise.
    """
    if sys.n == 0:
        raise SolverError("empty system")
    if not sys.is_dominant():
        bad = np.flatnonzero(~(sys.diag > sys.off_sums()))
        raise SolverError(f"system is not strictly diagonally dominant at rows {bad.tolist()}")
    n = sys.n
    sub = sys.sub.tolist()
    sup = sys.sup.tolist()
    d = sys.diag.tolist()
    b = sys.rhs.tolist()
    for i in range(1, n):
        f = sub[i] / d[i - 1]
        d[i] = d[i] - f * sup[i - 1]
        b[i] = b[i] - f * b[i - 1]
    x = [0.0] * n
    x[n - 1] = b[n - 1] / d[n - 1]
    for i in range(n - 2, -1, -1):
        s = sup[i] * x[i + 1]
        x[i] = (b[i] - s) / d[i]
    return np.array(x)
