"""Graph kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to the
pure-Python implementations otherwise.  Set ``CROSSNET_PURE_KERNELS=1`` to
force the pure backend (used by the benchmark and the agreement tests).
"""

from __future__ import annotations

import os

from . import pykern

if os.environ.get("CROSSNET_PURE_KERNELS", "") == "1":
    _impl = pykern
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pykern

dijkstra_lengths = _impl.dijkstra_lengths
common_neighbor_counts = _impl.common_neighbor_counts
BACKEND = _impl.BACKEND


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return BACKEND
