"""Kernel backend selection: compiled extension with NumPy fallback.

The compiled kernel is preferred when importable; set ``NLS1D_FORCE_NUMPY=1``
to force the pure-NumPy path (used by the benchmark and the equivalence
tests).  Both backends expose ``accumulate(x, q, c) -> complex`` with
identical semantics.
"""

from __future__ import annotations

import os

from . import morawetz_numpy

if os.environ.get("NLS1D_FORCE_NUMPY"):
    _impl = morawetz_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _morawetz as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = morawetz_numpy
        BACKEND = "numpy"

accumulate = _impl.accumulate

__all__ = ["accumulate", "BACKEND", "morawetz_numpy"]
