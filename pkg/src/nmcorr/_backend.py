"""Pick the kernel implementation once, at import.

Set ``NMCORR_PURE_PYTHON=1`` to force the numpy kernels even when the
compiled extension is importable.
"""
import os

from . import _kernels_py

if os.environ.get("NMCORR_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"


def available_backends():
    """Mapping of backend name to kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out
