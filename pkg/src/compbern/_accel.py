"""Numba switch.

Set ``CB_DISABLE_NUMBA=1`` to force the pure-numpy kernels (useful for
debugging and for the benchmark's baseline). When numba is not importable the
numpy path is used silently.
"""
import os

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False


def _flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAS_NUMBA and not _flag("CB_DISABLE_NUMBA")


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or ``None`` when numba is missing.

    Kernels compiled through this are always defined (when numba exists) so
    that both paths can be tested side by side; ``USE_NUMBA`` only decides
    which one the public kernel names point at.
    """
    if not HAS_NUMBA:
        return lambda fn: None
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)
