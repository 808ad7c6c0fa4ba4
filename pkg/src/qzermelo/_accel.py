"""JIT switch.

Setting ``QZERMELO_DISABLE_NUMBA=1`` in the environment (or running without
numba installed) routes every kernel through its pure-numpy twin. The flag is
read once, at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
JIT_ENABLED = NUMBA_AVAILABLE and (
    os.environ.get("QZERMELO_DISABLE_NUMBA", "").strip().lower() in _FALSY
)

if NUMBA_AVAILABLE:
    from numba import njit, prange

    # skip the TBB probe; the system TBB is often too old and numba warns
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
else:  # pragma: no cover

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    prange = range
