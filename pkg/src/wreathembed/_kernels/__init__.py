"""Dense kernel selection.

The compiled module is used when it was built; otherwise the NumPy
fallback is imported.  Setting ``WREATHEMBED_KERNELS=numpy`` forces the
fallback.
"""

import os

from . import _pykernels as python_kernels

compiled_kernels = None
if os.environ.get("WREATHEMBED_KERNELS", "").lower() != "numpy":
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None

active = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = active.BACKEND

table_mul = active.table_mul
shifted_product = active.shifted_product
scan_axis = active.scan_axis

__all__ = ["BACKEND", "active", "compiled_kernels", "python_kernels",
           "table_mul", "shifted_product", "scan_axis"]
