"""Multiset kernel selection.

Imports the compiled kernel when available, falling back to the pure-Python
twin.  Set ``MEMBRANES_PURE_KERNEL=1`` to force the fallback (used by the
benchmark and by tests that compare both implementations).
"""

import os

from membranes import _mskernel_py

if os.environ.get("MEMBRANES_PURE_KERNEL") == "1":
    _impl = _mskernel_py
else:
    try:
        from membranes import _mskernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _mskernel_py

IMPL = _impl.IMPL

from_pairs = _impl.from_pairs
total = _impl.total
contains = _impl.contains
add = _impl.add
subtract = _impl.subtract
count_max = _impl.count_max
insert = _impl.insert
discard = _impl.discard

EMPTY = ()
