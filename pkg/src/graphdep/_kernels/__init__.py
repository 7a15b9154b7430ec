"""Backend selection for the fixed-point kernel.

The compiled extension is used when available; set GRAPHDEP_PURE_PYTHON=1
to force the NumPy fallback.  Both backends implement the same contract.
"""

import os

_force_python = os.environ.get("GRAPHDEP_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    from . import _fixed_point_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _fixed_point as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _fixed_point_py as _impl

        BACKEND = "python"

solve_grid = _impl.solve_grid


def backend_name() -> str:
    """Which kernel implementation is active: 'cython' or 'python'."""
    return BACKEND
