"""Numba dispatch layer.

Hot kernels are written as scalar-loop functions that compile under
``numba.njit``.  Setting the environment variable ``PENDROTOR_NO_NUMBA=1``
(or having no numba installed) selects the pure NumPy/Python fallback: the
same source runs uncompiled.  ``benchmarks/bench_modes.py`` compares the
two paths.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("PENDROTOR_NO_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in {"1", "true", "yes", "on"}

try:
    if not NUMBA_REQUESTED:
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


def jitted(func=None, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if not NUMBA_ENABLED:
        if func is None:
            return lambda f: f
        return func
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if func is None:
        return _njit(**kwargs)
    return _njit(**kwargs)(func)
