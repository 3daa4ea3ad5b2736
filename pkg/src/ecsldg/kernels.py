"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ECSLDG_BACKEND=python or ECSLDG_BACKEND=compiled to force a choice
(the latter raises if the extension was not built).
"""
from __future__ import annotations

import os

from . import _advect_numpy

_FORCED = os.environ.get("ECSLDG_BACKEND", "auto").lower()

if _FORCED not in ("auto", "python", "compiled"):
    raise RuntimeError(f"ECSLDG_BACKEND={_FORCED!r} not one of auto|python|compiled")

_compiled = None
if _FORCED in ("auto", "compiled"):
    try:
        from . import _ext as _compiled
    except ImportError:
        if _FORCED == "compiled":
            raise RuntimeError("ECSLDG_BACKEND=compiled but ecsldg._ext is not built")
        _compiled = None

if _compiled is not None and _FORCED != "python":
    advect_lines = _compiled.advect_lines
    BACKEND = "compiled"
else:
    advect_lines = _advect_numpy.advect_lines
    BACKEND = "python"


def active_backend() -> str:
    return BACKEND


def backends() -> dict:
    """All importable kernel implementations, keyed by name (for benchmarks)."""
    out = {"python": _advect_numpy.advect_lines}
    if _compiled is not None:
        out["compiled"] = _compiled.advect_lines
    return out
