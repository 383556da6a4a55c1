"""Kernel backend selection.

Hot kernels are written in the scalar subset that numba compiles. Setting
``STEREOTRACE_DISABLE_JIT=1`` (or running without numba installed) leaves the
same functions as plain Python over numpy arrays, which is slow but useful for
debugging and for checking that the compiled path agrees with the reference
semantics.
"""

import os
import warnings

_disabled = os.environ.get("STEREOTRACE_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError("disabled by STEREOTRACE_DISABLE_JIT")
    import numba

    JIT_ENABLED = True
except ImportError as exc:
    numba = None
    JIT_ENABLED = False
    if not _disabled:
        warnings.warn(f"numba unavailable ({exc}); kernels run as plain Python and will be slow")

BACKEND = "numba" if JIT_ENABLED else "python"


def kernel(func):
    """Compile ``func`` with numba (nogil, cached) or return it unchanged."""
    if not JIT_ENABLED:
        return func
    return numba.njit(func, nogil=True, cache=True, error_model="numpy")
