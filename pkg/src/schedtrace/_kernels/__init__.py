"""Tree-kernel backend selection.

The compiled Cython kernel is used when its extension built; otherwise the
pure-Python kernel takes over with identical results (and less speed).
Set SCHEDTRACE_KERNEL=python to force the fallback, e.g. for benchmarking.
"""

import os

from . import _tree_py

if os.environ.get("SCHEDTRACE_KERNEL", "").lower() == "python":
    _impl = _tree_py
    BACKEND = "python"
else:
    try:
        from . import _tree_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _tree_py
        BACKEND = "python"

grow_tree = _impl.grow_tree
splitmix64 = _tree_py.splitmix64

__all__ = ["grow_tree", "splitmix64", "BACKEND"]
