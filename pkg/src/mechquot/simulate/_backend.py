"""Pick the compiled RK4 kernel when it is built, else the pure-Python one.

Set ``MECHQUOT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _rk4_py

if os.environ.get("MECHQUOT_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _rk4 as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _rk4_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"


def get_kernel(name=None):
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"RK4 backend {name!r} is not available (have {sorted(BACKENDS)})") from None
