"""Backend selection. Set KREINPAIR_DISABLE_NUMBA=1 to force the numpy kernels."""

import os

ENV_FLAG = "KREINPAIR_DISABLE_NUMBA"


def numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def use_numba() -> bool:
    return numba_requested() and numba_available()
