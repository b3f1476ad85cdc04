"""Kernel dispatch: the compiled extension if it imports, else pure Python.

Set ``WAVEGRAPH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("WAVEGRAPH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    else:
        BACKEND = "cython"
else:
    _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py

jacobi_eigh = _impl.jacobi_eigh
laplacian_rows = _impl.laplacian_rows

__all__ = ["BACKEND", "jacobi_eigh", "laplacian_rows"]
