"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``KOSZULCAT_PURE=1`` to force the Python kernels.
"""

import os

if os.environ.get("KOSZULCAT_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

axpy = _impl.axpy
reduce_vec = _impl.reduce_vec
echelonize = _impl.echelonize
matmul_cols = _impl.matmul_cols
IMPLEMENTATION = _impl.IMPLEMENTATION
