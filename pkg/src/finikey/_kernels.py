"""Select the optimizer kernel backend at import.

The compiled extension is used when it was built; set FINIKEY_PURE_PYTHON=1 to
force the pure-Python implementation.
"""
import os

from . import _pykernels as python_kernels

compiled_kernels = None
if not os.environ.get("FINIKEY_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "cython" if compiled_kernels is not None else "python"

bound_bits = kernels.bound_bits
optimize_shares = kernels.optimize_shares
