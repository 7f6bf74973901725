"""Selects the compiled band-moment kernel, falling back to pure Python.

Set ``QUANTUMLIMITS_PURE=1`` to force the fallback.
"""
import os

from . import _fallback as fallback

HAVE_COMPILED = False
_compiled = None

if os.environ.get("QUANTUMLIMITS_PURE", "") in ("", "0"):
    try:
        from . import _kernels as _compiled
        HAVE_COMPILED = True
    except ImportError:
        _compiled = None


def compiled():
    if _compiled is None:
        raise ImportError("quantumlimits._kernels is not built; "
                          "run `pip install -e . --no-build-isolation`")
    return _compiled


def implementation():
    return _compiled if HAVE_COMPILED else fallback
