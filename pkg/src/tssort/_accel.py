"""Optional numba acceleration.

Kernels are written once in a numba-compatible subset and also have a
vectorised numpy twin. ``TSSORT_DISABLE_NUMBA=1`` selects the numpy twins
even when numba is importable.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("TSSORT_DISABLE_NUMBA", "").lower() not in (
    "1",
    "true",
    "yes",
)


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
