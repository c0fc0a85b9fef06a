"""Backend selection for the finite-field hot kernels.

The compiled extension ``_gfcore`` is used when it was built; otherwise the
numpy/pure-Python module ``_pycore`` takes over with identical results.
Set ``SKEWBIEXT_PURE=1`` to force the fallback.
"""

import os

from . import _pycore

if os.environ.get("SKEWBIEXT_PURE", "") not in ("", "0"):
    _impl = _pycore
else:
    try:
        from . import _gfcore as _impl
    except ImportError:
        _impl = _pycore

BACKEND = _impl.BACKEND
mulmod = _impl.mulmod
invmod = _impl.invmod
batch_mulmod = _impl.batch_mulmod
matmul_mod = _impl.matmul_mod
rref_mod = _impl.rref_mod
polar_defects = _impl.polar_defects


def backends():
    """Return the available backend modules keyed by name."""
    out = {"python": _pycore}
    try:
        from . import _gfcore
        out["cython"] = _gfcore
    except ImportError:
        pass
    return out
