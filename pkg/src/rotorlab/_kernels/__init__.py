"""Backend selection for the integrator hot loop.

The compiled Cython kernel is preferred when it was built; otherwise (or
when ROTORLAB_PURE_PY=1 is set) the pure-Python fallback is used.  Both
expose the same `integrate_midpoint` contract and constants.
"""

import os

from . import _midpoint_py

if os.environ.get("ROTORLAB_PURE_PY") == "1":
    _impl = _midpoint_py
else:
    try:
        from . import _midpoint as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _midpoint_py

BACKEND = "compiled" if _impl.COMPILED else "python"

integrate_midpoint = _impl.integrate_midpoint

GEOM_SPHERE = _impl.GEOM_SPHERE
GEOM_PSEUDOSPHERE = _impl.GEOM_PSEUDOSPHERE
GEOM_TORUS = _impl.GEOM_TORUS
POT_ZERO = _impl.POT_ZERO
POT_COSINE_WELL = _impl.POT_COSINE_WELL
POT_HARMONIC = _impl.POT_HARMONIC
STATUS_OK = _impl.STATUS_OK
STATUS_POLE = _impl.STATUS_POLE
STATUS_REJECTED = _impl.STATUS_REJECTED


def available_backends():
    """Name -> kernel module for every importable backend (benchmark hook)."""
    backends = {"python": _midpoint_py}
    try:
        from . import _midpoint

        backends["compiled"] = _midpoint
    except ImportError:
        pass
    return backends
