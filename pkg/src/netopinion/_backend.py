"""Kernel backend selection.

The compiled extension is preferred when importable; set
``NETOPINION_PURE_PY=1`` to force the numpy fallback.  Both expose the same
functions with bit-identical arithmetic.
"""

from __future__ import annotations

import os

from . import _backend_pure as pure

if os.environ.get("NETOPINION_PURE_PY"):
    impl = pure
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pure

BACKEND = impl.BACKEND_NAME

thomas_shared = impl.thomas_shared
thomas_rows = impl.thomas_rows
cc_explicit_update = impl.cc_explicit_update
mc_network_update = impl.mc_network_update
mc_collision_update = impl.mc_collision_update


def available_backends():
    out = {"pure-python": pure}
    try:
        from . import _core
        out["compiled"] = _core
    except ImportError:
        pass
    return out
