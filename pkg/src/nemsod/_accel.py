"""Backend selection for the hot kernels.

Set ``NEMSOD_NO_NUMBA=1`` to force the pure-numpy path (also used
automatically when numba cannot be imported).
"""

import os

_DISABLED = os.environ.get("NEMSOD_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not _DISABLED

NUMBA_OPTS = {"cache": True, "nogil": True}


def njit(func):
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(func, **NUMBA_OPTS)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
