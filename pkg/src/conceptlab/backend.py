"""Kernel backend selection.

The hot numeric loops (batch program evaluation, enumeration scans, ray
casting, the parity-recursion sweep) have two implementations: numba @njit
kernels and pure-numpy fallbacks.  Selection is controlled by the
CONCEPTLAB_BACKEND environment variable:

    auto   (default) use numba when importable, else numpy
    numba  require numba (ImportError if missing)
    numpy  force the pure-numpy path

The choice is made once at first use; both paths compute identical results.
"""

from __future__ import annotations

import os

_choice: str | None = None


def _decide() -> str:
    env = os.environ.get("CONCEPTLAB_BACKEND", "auto").strip().lower()
    if env not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"CONCEPTLAB_BACKEND must be auto|numba|numpy, got {env!r}"
        )
    if env == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if env == "numba":
            raise
        return "numpy"
    return "numba"


def backend() -> str:
    """Active backend name, 'numba' or 'numpy'."""
    global _choice
    if _choice is None:
        _choice = _decide()
    return _choice


def using_numba() -> bool:
    return backend() == "numba"
