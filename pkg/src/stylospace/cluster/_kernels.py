"""Backend selection for the distance/MST kernels.

The compiled extension is preferred when importable; the pure-Python module
is the fallback.  Set ``STYLOSPACE_BACKEND=python`` to force the fallback
(used by the benchmark and by backend-agreement tests).  Both backends are
bit-identical in output.
"""

from __future__ import annotations

import os

_forced = os.environ.get("STYLOSPACE_BACKEND", "").lower()

if _forced in ("py", "python", "pure"):
    from . import _mstpure as _impl

    BACKEND = "python"
elif _forced in ("c", "cython", "compiled"):
    from . import _mstcore as _impl  # type: ignore[no-redef]

    BACKEND = "cython"
else:
    try:
        from . import _mstcore as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _mstpure as _impl  # type: ignore[no-redef]

        BACKEND = "python"

core_distances = _impl.core_distances
mst_edges = _impl.mst_edges
