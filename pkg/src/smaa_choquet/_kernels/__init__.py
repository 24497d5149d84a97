"""Hot numerical kernels with a compiled core and a pure-numpy fallback.

Three loops dominate runtime: simplex pivoting, Hit-and-Run chain steps and
per-iteration rank tallying.  The compiled extension (``_core``, built from
Cython) is preferred; when it is missing the numpy fallback is selected at
import time.  ``SMAA_CHOQUET_KERNEL=fallback|cython`` forces a backend.

Both backends implement the same contracts and are individually
deterministic; they are statistically equivalent but not guaranteed
bit-identical to each other (floating-point summation order differs inside
dot products).
"""
from __future__ import annotations

import os

from . import _fallback

fallback_backend = _fallback

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

compiled_backend = _compiled


def _choose():
    forced = os.environ.get("SMAA_CHOQUET_KERNEL", "").strip().lower()
    if forced in ("fallback", "python", "numpy"):
        return fallback_backend
    if forced in ("cython", "compiled", "core"):
        if compiled_backend is None:
            raise ImportError(
                "SMAA_CHOQUET_KERNEL requests the compiled backend but the "
                "extension is not built; run `pip install -e . --no-build-isolation`"
            )
        return compiled_backend
    return compiled_backend if compiled_backend is not None else fallback_backend


_active = _choose()


def active_backend():
    return _active


def backend_name() -> str:
    return "cython" if _active is compiled_backend and compiled_backend is not None else "fallback"
