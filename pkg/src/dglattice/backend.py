"""Kernel backend selection.

The compiled extension is used when importable; the numpy fallback otherwise.
Set ``DGLATTICE_PURE_PYTHON=1`` to force the fallback (useful for the
benchmark and for debugging).
"""

import os

if os.environ.get("DGLATTICE_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _speedups as kernels  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
