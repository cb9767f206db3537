"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``QKZLAB_PURE=1`` to force the numpy fallback.
"""
import os

from . import _kernels_py as pure

BACKEND = "python"
kernels = pure
if os.environ.get("QKZLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled  # type: ignore[attr-defined]
    except ImportError:
        compiled = None
    else:
        kernels = compiled
        BACKEND = "cython"
else:
    compiled = None
