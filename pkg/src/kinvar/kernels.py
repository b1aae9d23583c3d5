"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``KINVAR_BACKEND=python``
to force the pure-Python fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("KINVAR_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

pava_rows = _impl.pava_rows
tangent_rows = _impl.tangent_rows
godunov_flux = _impl.godunov_flux


def available_backends():
    """Map backend name -> kernel module for every backend that imports."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
