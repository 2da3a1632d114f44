"""Optional numba acceleration for the hot kernels.

The environment variable WEAKSLIT_NUMBA controls the dispatch:

    WEAKSLIT_NUMBA=0   force the pure-numpy fallback path
    WEAKSLIT_NUMBA=1   require numba (ImportError if missing)
    unset / auto       use numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` times both paths side by side.
"""

import os

_flag = os.environ.get("WEAKSLIT_NUMBA", "auto").strip().lower()

NUMBA_AVAILABLE = False
if _flag not in ("0", "false", "no", "off"):
    try:
        import numba  # noqa: F401

        NUMBA_AVAILABLE = True
    except ImportError:
        if _flag in ("1", "true", "yes", "on"):
            raise

USE_NUMBA = NUMBA_AVAILABLE


def njit(*args, **kwargs):
    """numba.njit when available, identity decorator otherwise."""
    if NUMBA_AVAILABLE:
        from numba import njit as _njit

        return _njit(*args, **kwargs)

    def wrap(func):
        return func

    if args and callable(args[0]):
        return args[0]
    return wrap
