"""Numba switch.

Hot loops live in ``rankone.kernels`` in two flavours: numba-compiled loops and
vectorised numpy.  Set ``RANKONE_DISABLE_NUMBA=1`` to force the numpy path
(useful for debugging, or where numba is unavailable).
"""
import os

_FLAG = os.environ.get("RANKONE_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching, or a no-op decorator without numba."""
    if HAVE_NUMBA:
        import numba
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
