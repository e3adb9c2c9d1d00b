"""Kernel backend selection.

``CSA_BACKEND=numba`` (default when numba imports) runs the jit-compiled
kernels; ``CSA_BACKEND=numpy`` forces the pure-numpy fallback.  The two
modules expose identical function sets, so everything above this layer
is backend-agnostic.  ``CSA_THREADS`` caps worker threads used by the
grid-parallel operations (sweep/audit).
"""

import os

from . import _kernels_numpy

_active = None


class BackendError(RuntimeError):
    pass


def _load(name):
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba
        return _kernels_numba
    raise BackendError(f"unknown backend {name!r} (use 'numba' or 'numpy')")


def get():
    """Active kernel module, resolving CSA_BACKEND on first use."""
    global _active
    if _active is None:
        name = os.environ.get("CSA_BACKEND", "").strip().lower()
        if name:
            _active = _load(name)
        else:
            try:
                _active = _load("numba")
            except ImportError:
                _active = _kernels_numpy
    return _active


def name():
    return get().NAME


def set_backend(name_):
    """Explicit override, mainly for tests and benchmarks."""
    global _active
    _active = _load(name_)
    return _active


def thread_count():
    """Worker count for grid-parallel operations (CSA_THREADS caps it)."""
    n = os.cpu_count() or 1
    cap = os.environ.get("CSA_THREADS")
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n
