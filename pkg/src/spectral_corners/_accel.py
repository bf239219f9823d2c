"""Backend selection for the compiled kernels.

Set ``SPECTRAL_CORNERS_NO_NUMBA=1`` before import to force the pure-numpy
kernels; the numba kernels are used whenever numba imports cleanly.
"""
import os

_DISABLED = os.environ.get("SPECTRAL_CORNERS_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by SPECTRAL_CORNERS_NO_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn
        return wrap

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def kernels():
    """Return the kernel module for the active backend."""
    if HAVE_NUMBA:
        from . import kernels_numba as mod
    else:
        from . import kernels_numpy as mod
    return mod
