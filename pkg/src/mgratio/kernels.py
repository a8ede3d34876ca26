"""Backend selection for the hot numerical kernels.

The compiled Cython extension is used when it imports cleanly; otherwise the
numpy fallback is used. Setting ``MGRATIO_PURE_PYTHON=1`` forces the fallback.
``BACKEND`` names the active implementation.
"""

import os

from . import _kernels_py

_compiled = None
if os.environ.get("MGRATIO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    loggamma = _compiled.loggamma
    log_gamma_sum = _compiled.log_gamma_sum
else:
    BACKEND = "python"
    loggamma = _kernels_py.loggamma
    log_gamma_sum = _kernels_py.log_gamma_sum


def available_backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
