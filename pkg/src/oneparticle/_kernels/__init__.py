"""RK4 kernel dispatch: compiled extension when built, numpy fallback otherwise.

Set ONEPARTICLE_KERNEL=python in the environment to force the fallback even
when the extension is present. ``get_implementation`` resolves a lane by name
so callers (and the benchmark) can pin one explicitly.
"""

from __future__ import annotations

import os

from . import _rk4_py

try:
    from . import _rk4_cy
except ImportError:  # extension not built; the numpy lane covers everything
    _rk4_cy = None

HAVE_COMPILED = _rk4_cy is not None

_FORCED = os.environ.get("ONEPARTICLE_KERNEL", "auto").strip().lower()
if _FORCED not in ("auto", "python", "cython"):
    raise RuntimeError(f"ONEPARTICLE_KERNEL must be auto/python/cython, got {_FORCED!r}")

IMPLEMENTATIONS = {"python": _rk4_py}
if HAVE_COMPILED:
    IMPLEMENTATIONS["cython"] = _rk4_cy


def get_implementation(name: str = "auto"):
    """Resolve a kernel lane. "auto" prefers the compiled extension."""
    if name == "auto":
        name = _FORCED
    if name == "auto":
        name = "cython" if HAVE_COMPILED else "python"
    try:
        return IMPLEMENTATIONS[name]
    except KeyError:
        raise RuntimeError(
            f"kernel implementation {name!r} unavailable "
            f"(have: {sorted(IMPLEMENTATIONS)})"
        ) from None


ACTIVE = get_implementation()

rk4_left = ACTIVE.rk4_left
rk4_pair = ACTIVE.rk4_pair
rk4_lindblad_decay = ACTIVE.rk4_lindblad_decay
