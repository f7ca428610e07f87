"""Kernel backend selection.

The compiled Cython backend is preferred when the extension built; the
numpy backend is always available.  Selection happens once at import and
can be forced with SU11_PHASE_LAB_BACKEND=python|cython (a forced cython
request fails loudly rather than falling back silently).
"""
from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None

_FORCED = os.environ.get("SU11_PHASE_LAB_BACKEND", "").strip().lower()
if _FORCED == "python":
    _active = _kernels_py
elif _FORCED == "cython":
    if _kernels_cy is None:
        raise ImportError(
            "SU11_PHASE_LAB_BACKEND=cython but the compiled extension is unavailable"
        )
    _active = _kernels_cy
elif _FORCED in ("", "auto"):
    _active = _kernels_cy if _kernels_cy is not None else _kernels_py
else:
    raise ValueError(f"unknown SU11_PHASE_LAB_BACKEND={_FORCED!r}")


def backend_name() -> str:
    return "cython" if _active is _kernels_cy else "python"


def available_backends() -> dict:
    """Name -> kernel module, for benchmarks and equivalence tests."""
    out = {"python": _kernels_py}
    if _kernels_cy is not None:
        out["cython"] = _kernels_cy
    return out


def wigner_points(k, comps, zs):
    return _active.wigner_points(k, comps, zs)


def overlap_sums(k, comps, ds):
    return _active.overlap_sums(k, comps, ds)
