"""Select the compiled kernels when available, else the numpy fallback.

``TWAKRAUS_BACKEND=python`` forces the fallback; ``=compiled`` makes a
missing extension an import error instead of a silent downgrade.
"""

import os

from . import _fallback

_choice = os.environ.get("TWAKRAUS_BACKEND", "auto").lower()

if _choice == "python":
    _impl = _fallback
    NAME = "python"
else:
    try:
        from . import _core as _impl

        NAME = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _fallback
        NAME = "python"

kernel_block = _impl.kernel_block
symbol_values = _impl.symbol_values
step_counts = _impl.step_counts
rk4_flow = _impl.rk4_flow
jacobi_eigh = _impl.jacobi_eigh
