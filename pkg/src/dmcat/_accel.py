"""Backend selection for the hot kernels.

Set ``DMCAT_NO_NUMBA=1`` to force the pure-numpy code path.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DISABLED = os.environ.get("DMCAT_NO_NUMBA", "").strip() not in ("", "0")
USE_NUMBA = numba is not None and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if numba is not None:
        return numba.njit(*args, **kwargs)

    def deco(fn):
        return fn

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return deco


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
