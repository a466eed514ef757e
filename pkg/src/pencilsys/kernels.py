"""Backend selection for the history kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise, or
when ``PENCILSYS_PURE_PYTHON`` is set, the pure-Python module stands in.
"""

import os

from . import _kernels_py

if os.environ.get("PENCILSYS_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

nabla_coefficients = _impl.nabla_coefficients
history_sum = _impl.history_sum
nabla_all = _impl.nabla_all
fractional_march = _impl.fractional_march
telescope = _impl.telescope
