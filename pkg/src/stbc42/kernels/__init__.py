"""Backend dispatch for the hot numeric kernels.

Two interchangeable implementations exist:

* ``numba_backend`` — ``@njit``-compiled scalar kernels (default when numba
  is importable); and
* ``numpy_backend`` — pure-numpy reference kernels.

Selection happens once at import time from the ``STBC42_BACKEND``
environment variable (``numba`` or ``numpy``).  Unset, numba is used when
available.  ``benchmarks/backend_bench.py`` times one against the other.
"""

import os

from . import numpy_backend

_ENV_VAR = "STBC42_BACKEND"


def _load(choice: str):
    if choice == "numpy":
        return numpy_backend
    if choice == "numba":
        from . import numba_backend
        return numba_backend
    raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")


def _default():
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice:
        return _load(choice)
    try:
        return _load("numba")
    except ImportError:
        return numpy_backend


active = _default()

ACTIVE_BACKEND = active.NAME

qr_mgs = active.qr_mgs
decode_exhaustive = active.decode_exhaustive
decode_sphere = active.decode_sphere
decode_fast = active.decode_fast
decode_fast_any = active.decode_fast_any
mindet_pair_scan = active.mindet_pair_scan
ber_batch = active.ber_batch


def get_backend(name: str | None = None):
    """Backend module by name (``None`` -> the active one)."""
    return active if name is None else _load(name)
