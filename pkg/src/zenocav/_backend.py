"""Select the compiled stepping kernels, falling back to pure numpy.

Set ``ZENOCAV_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by tests that must exercise both paths).
"""

from __future__ import annotations

import os

if os.environ.get("ZENOCAV_PURE_PYTHON"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels_cy as _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels

lindblad_rk4 = _kernels.lindblad_rk4
volterra_run = _kernels.volterra_run


def backend_name() -> str:
    return _kernels.BACKEND
