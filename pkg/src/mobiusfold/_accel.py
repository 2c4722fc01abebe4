"""Optional numba acceleration.

Kernels are written once in plain Python/numpy style and compiled with
``numba.njit`` when numba is importable and ``MOBIUSFOLD_NUMBA`` is not set
to ``0``.  Each kernel module also ships a vectorised numpy path that is
used when compilation is disabled.
"""

import os

_flag = os.environ.get("MOBIUSFOLD_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and _flag not in ("0", "false", "no", "off")


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    kwargs.setdefault("cache", True)
    if not NUMBA_ENABLED:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend():
    return "numba" if NUMBA_ENABLED else "numpy"
