"""Backend selection for the evaluation kernels.

The compiled ``_core`` extension is used when importable; otherwise the numpy
implementation in ``_core_py``. Set ``WIREMASK_PURE_PYTHON=1`` to force the
fallback.
"""

import logging
import os

logger = logging.getLogger(__name__)

if os.environ.get("WIREMASK_PURE_PYTHON", "") not in ("", "0"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        logger.debug("compiled kernels unavailable, using numpy fallback")
        from . import _core_py as _impl

BACKEND = "compiled" if _impl.__name__.endswith("._core") else "python"

free_field = _impl.free_field
exact_free_field = _impl.exact_free_field
axis_cost = _impl.axis_cost
greedy_place = _impl.greedy_place


def backends():
    """Available kernel modules by name."""
    from . import _core_py

    out = {"python": _core_py}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
