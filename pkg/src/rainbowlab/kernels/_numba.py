"""numba-compiled kernels."""
import types

import numba

from . import _loops

_jit = numba.njit(cache=True, nogil=True)

popcount64 = _jit(_loops.popcount64)
_loops_hc_feasible = _jit(_loops._hc_feasible)


# Compiled callees must be referenced through the compiled globals, so the
# kernels that call helpers are rebuilt against jitted versions.
def _rebind(fn, **names):
    g = dict(fn.__globals__)
    g.update(names)
    return types.FunctionType(fn.__code__, g, fn.__name__, fn.__defaults__, fn.__closure__)


hc_search = _jit(_rebind(_loops.hc_search, _hc_feasible=_loops_hc_feasible))
batch_contains = _jit(_loops.batch_contains)
subset_hits_by_size = _jit(_rebind(_loops.subset_hits_by_size, popcount64=popcount64))
induced_edge_counts = _jit(_loops.induced_edge_counts)
expansion_exhaustive = _jit(_rebind(_loops.expansion_exhaustive, popcount64=popcount64))
