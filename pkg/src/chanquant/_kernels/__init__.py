"""Hot loops of the greedy algorithms.

The compiled extension ``_core`` is used when it has been built; otherwise
the pure-Python ``_pycore`` is used. Set ``CHANQUANT_PURE_PYTHON=1`` to force
the fallback.
"""
import os

from . import _pycore

if os.environ.get("CHANQUANT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pycore
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pycore
        BACKEND = "python"

split_run = _impl.split_run
merge_run = _impl.merge_run

__all__ = ["BACKEND", "split_run", "merge_run"]
