"""Optional numba acceleration.

Kernels are written once as plain python and compiled with ``numba.njit``
when numba is importable and ``LINELEAF_NUMBA`` is not set to ``0``.
"""
import os

try:  # pragma: no cover - depends on the environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("LINELEAF_NUMBA", "1") != "0"


def njit(fn):
    """Compile ``fn`` lazily; the python original stays reachable as ``.py_func``."""
    if not HAVE_NUMBA:
        fn.py_func = fn
        return fn
    return numba.njit(cache=True)(fn)
