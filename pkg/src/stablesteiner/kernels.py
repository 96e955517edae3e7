"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
fallback is used.  Set ``STABLESTEINER_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("STABLESTEINER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

floyd_warshall = _impl.floyd_warshall
dreyfus_wagner = _impl.dreyfus_wagner
prim_mst = _impl.prim_mst
subset_mst_weights = _impl.subset_mst_weights


def backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
