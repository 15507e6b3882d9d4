"""Backend selection for the hot simulation kernels.

Two interchangeable kernel modules exist:

* ``_kernels_nb`` -- numba ``@njit`` compiled (default when numba imports),
* ``_kernels_py`` -- pure python/numpy fallback, bit-identical output.

Set ``DELTAREC_BACKEND=numpy`` to force the fallback, ``=numba`` to require
numba (raises if unavailable), anything else / unset means auto.
"""
from __future__ import annotations

import os

_cached = None


def backend_name() -> str:
    return "numba" if use_numba() else "numpy"


def use_numba() -> bool:
    global _cached
    if _cached is None:
        choice = os.environ.get("DELTAREC_BACKEND", "auto").strip().lower()
        if choice == "numpy":
            _cached = False
        elif choice == "numba":
            import numba  # noqa: F401  (fail loudly if requested but missing)

            _cached = True
        else:
            try:
                import numba  # noqa: F401

                _cached = True
            except ImportError:
                _cached = False
    return _cached


def kernels():
    """Return the active kernel module."""
    if use_numba():
        from . import _kernels_nb

        return _kernels_nb
    from . import _kernels_py

    return _kernels_py
