"""Kernel backend selection.

The compiled extension is used when it imports; ``MEMLINE_BACKEND=python``
forces the pure-Python loops.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_AVAILABLE = {"python": _pykernels}
if _ckernels is not None:
    _AVAILABLE["cython"] = _ckernels


def available() -> list[str]:
    return sorted(_AVAILABLE)


def _default() -> str:
    forced = os.environ.get("MEMLINE_BACKEND")
    if forced:
        if forced not in _AVAILABLE:
            raise ImportError(f"MEMLINE_BACKEND={forced!r} not available; have {available()}")
        return forced
    return "cython" if "cython" in _AVAILABLE else "python"


BACKEND = _default()


def kernels(name: str | None = None) -> ModuleType:
    """Return the kernel module ``name`` (default: the selected backend)."""
    name = name or BACKEND
    try:
        return _AVAILABLE[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; have {available()}") from None
