"""Backend selection for the hot counting kernels.

The compiled extension is preferred when importable; the pure-Python twin
is the fallback.  Set ``FREEWICK_PURE_PYTHON=1`` to force the fallback
(used by the benchmark and by tests that compare the two backends).
"""

import os

if os.environ.get("FREEWICK_PURE_PYTHON"):
    from . import _corepy as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _corepy as _impl

BACKEND = _impl.BACKEND
HAVE_COMPILED_CORE = BACKEND == "compiled"

count_set_partitions = _impl.count_set_partitions
