"""Hot kernels with a numba path and a numpy fallback.

The active backend is chosen once at import time (see ``rankone._accel``);
``backend(name)`` returns either implementation explicitly for benchmarks
and parity tests.
"""
from rankone._accel import HAVE_NUMBA, NUMBA_ENABLED
from rankone.kernels import _numpy

if NUMBA_ENABLED:
    from rankone.kernels import _numba as _active
else:
    _active = _numpy

ACTIVE_BACKEND = "numba" if NUMBA_ENABLED else "numpy"

expand_exact = _active.expand_exact
expand_float = _active.expand_float
dedup_exact = _active.dedup_exact
dedup_float = _active.dedup_float
kint_real = _active.kint_real
kint_complex = _active.kint_complex
free_return_logprobs = _active.free_return_logprobs
lattice_return_logprobs = _active.lattice_return_logprobs


def backend(name):
    """Return the kernel module for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        from rankone.kernels import _numba
        return _numba
    raise ValueError(f"unknown backend {name!r}")
