"""Hot numerical kernels with a compiled core and a pure-NumPy fallback.

The compiled extension (``footlens._kernels._core``) is optional; when it is
missing, or when ``FOOTLENS_FORCE_FALLBACK=1`` is set, the NumPy
implementations take over with identical semantics. ``BACKEND`` names the
active choice so callers and benchmarks can report it.
"""

import os

from . import _fallback

if os.environ.get("FOOTLENS_FORCE_FALLBACK") == "1":
    _impl = _fallback
    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "fallback"

sc_segment_integrals = _impl.sc_segment_integrals
min_edge_distance = _impl.min_edge_distance
thin_skeleton = _impl.thin_skeleton

__all__ = [
    "BACKEND",
    "sc_segment_integrals",
    "min_edge_distance",
    "thin_skeleton",
]
