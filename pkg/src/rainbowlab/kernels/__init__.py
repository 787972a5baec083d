"""Hot kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time from ``RAINBOWLAB_BACKEND``
(``numba`` by default, ``numpy`` to force the fallback).  If numba cannot be
imported the numpy path is used silently.
"""
import os

from ._loops import EXHAUSTED, FOUND, LIMIT  # noqa: F401

BACKEND = os.environ.get("RAINBOWLAB_BACKEND", "numba").strip().lower()

if BACKEND == "numba":
    try:
        from ._numba import (batch_contains, expansion_exhaustive, hc_search,
                             induced_edge_counts, subset_hits_by_size)
    except ImportError:  # pragma: no cover
        BACKEND = "numpy"

if BACKEND != "numba":
    BACKEND = "numpy"
    from ._numpy import (batch_contains, expansion_exhaustive, hc_search,  # noqa: F811
                         induced_edge_counts, subset_hits_by_size)

__all__ = [
    "BACKEND", "FOUND", "EXHAUSTED", "LIMIT",
    "hc_search", "batch_contains", "subset_hits_by_size",
    "induced_edge_counts", "expansion_exhaustive",
]
