"""Backend selection for the hot kernels.

The exact simplex and the sampling kernels have two implementations: a
numba-compiled fast path and a pure Python/numpy fallback.  Selection is
controlled by the LEXCONE_BACKEND environment variable:

    LEXCONE_BACKEND=numba    force numba (error if unavailable)
    LEXCONE_BACKEND=python   pure Python / numpy only
    unset                    numba when importable, fallback otherwise

Both paths produce bit-identical results; the numba simplex additionally
bails out to the Python path when intermediate values approach the int64
range, so exactness never depends on the backend.
"""

from __future__ import annotations

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    numba = None
    HAS_NUMBA = False


def use_numba() -> bool:
    choice = os.environ.get("LEXCONE_BACKEND", "").strip().lower()
    if choice in ("python", "numpy"):
        return False
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("LEXCONE_BACKEND=numba but numba is not importable")
        return True
    return HAS_NUMBA
