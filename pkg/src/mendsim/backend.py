"""Kernel backend selection.

MEND_SIM_BACKEND chooses the Monte Carlo kernel implementation: "numba"
(JIT-compiled, parallel), "numpy" (pure vectorized fallback), or "auto"
(numba when importable, else numpy).  MEND_SIM_THREADS caps the numba thread
pool; 0 means leave the library default.  Results are independent of the
thread count because every trial owns its output row.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

BACKEND_ENV = "MEND_SIM_BACKEND"
THREADS_ENV = "MEND_SIM_THREADS"
CHOICES = ("auto", "numba", "numpy")


class BackendError(RuntimeError):
    """Requested backend cannot be provided in this environment."""


def _numba_available() -> bool:
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if value not in CHOICES:
        raise BackendError(f"{BACKEND_ENV} must be one of {CHOICES}, got {value!r}")
    return value


def active_backend() -> str:
    """Resolved backend name, honoring the environment override."""
    value = requested_backend()
    if value == "numpy":
        return "numpy"
    if value == "numba":
        if not _numba_available():
            raise BackendError("numba backend requested but numba is not importable")
        return "numba"
    return "numba" if _numba_available() else "numpy"


def requested_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip()
    try:
        value = int(raw)
    except ValueError:
        raise BackendError(f"{THREADS_ENV} must be a non-negative integer, got {raw!r}")
    if value < 0:
        raise BackendError(f"{THREADS_ENV} must be non-negative, got {value}")
    return value


def configure_threads() -> int:
    """Apply the thread cap to numba; returns the thread count in effect.

    The cap is clamped into numba's allowed range (a one-CPU host only
    accepts 1, whatever was requested); the numpy backend always reports 1.
    """
    if active_backend() != "numba":
        return 1
    import numba

    requested = requested_threads()
    if requested > 0:
        limit = numba.config.NUMBA_NUM_THREADS
        numba.set_num_threads(max(1, min(requested, limit)))
    return numba.get_num_threads()


def kernels(backend: str | None = None) -> ModuleType:
    """Kernel module for the given (or resolved) backend."""
    name = backend if backend is not None else active_backend()
    if name == "numba":
        return importlib.import_module("mendsim._kernels_numba")
    if name == "numpy":
        return importlib.import_module("mendsim._kernels_numpy")
    raise BackendError(f"unknown backend {name!r}")
