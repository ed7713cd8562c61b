"""Backend switch for the numeric kernels.

Set ``MIXEDPOWERS_NUMBA=0`` to force the pure-numpy implementations. When
numba is missing the numpy path is used regardless.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("MIXEDPOWERS_NUMBA", "1").strip().lower() not in {
    "0", "false", "no", "off"}


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
