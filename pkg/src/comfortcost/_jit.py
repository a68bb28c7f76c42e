"""Numba switch.

Set ``COMFORTCOST_DISABLE_NUMBA=1`` to run every kernel through its pure
numpy fallback. Numba missing at import time has the same effect.
"""
import os

_FLAG = os.environ.get("COMFORTCOST_DISABLE_NUMBA", "0").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` with ``cache=True`` by default; identity when numba is absent."""
    kwargs.setdefault("cache", True)
    if numba is None:  # pragma: no cover
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
