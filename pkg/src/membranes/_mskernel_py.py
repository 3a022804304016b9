"""Pure-Python multiset kernel.

A canonical multiset is a tuple of (item, count) pairs, sorted by item,
with every count >= 1.  Items must be mutually comparable and hashable;
the data model in :mod:`membranes.core` guarantees this by encoding every
value as a nested tuple whose first element is an integer kind tag.

These functions are the hot path of state-space exploration and have a
compiled twin in ``_mskernel.pyx`` with identical semantics.
"""

IMPL = "python"


def from_pairs(pairs):
    """Build a canonical multiset from unsorted (item, count) pairs."""
    acc = {}
    for item, count in pairs:
        if count:
            acc[item] = acc.get(item, 0) + count
    return tuple(sorted(acc.items()))


def total(ms):
    """Number of elements counted with multiplicity."""
    n = 0
    for _, count in ms:
        n += count
    return n


def contains(sub, sup):
    """True iff every item of `sub` occurs in `sup` with >= multiplicity."""
    i, j = 0, 0
    nsub, nsup = len(sub), len(sup)
    while i < nsub:
        item, count = sub[i]
        while j < nsup and sup[j][0] < item:
            j += 1
        if j >= nsup or sup[j][0] != item or sup[j][1] < count:
            return False
        i += 1
        j += 1
    return True


def add(a, b):
    """Multiset union (counts add)."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i, j = 0, 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ia, ca = a[i]
        ib, cb = b[j]
        if ia < ib:
            out.append(a[i])
            i += 1
        elif ib < ia:
            out.append(b[j])
            j += 1
        else:
            out.append((ia, ca + cb))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def subtract(a, b):
    """Multiset difference a - b; requires b to be contained in a."""
    if not b:
        return a
    out = []
    i, j = 0, 0
    na, nb = len(a), len(b)
    while i < na:
        ia, ca = a[i]
        if j < nb and b[j][0] == ia:
            cb = b[j][1]
            if cb > ca:
                raise ValueError(f"multiset subtraction underflow at {ia!r}")
            if ca > cb:
                out.append((ia, ca - cb))
            j += 1
        else:
            if j < nb and b[j][0] < ia:
                raise ValueError(f"item {b[j][0]!r} not present in minuend")
            out.append(a[i])
        i += 1
    if j < nb:
        raise ValueError(f"item {b[j][0]!r} not present in minuend")
    return tuple(out)


def count_max(contents, pattern):
    """Largest k such that k copies of `pattern` fit jointly in `contents`.

    `pattern` must be nonempty.
    """
    if not pattern:
        raise ValueError("empty pattern has no defined multiplicity")
    best = None
    j = 0
    ncon = len(contents)
    for item, count in pattern:
        while j < ncon and contents[j][0] < item:
            j += 1
        if j >= ncon or contents[j][0] != item:
            return 0
        k = contents[j][1] // count
        if best is None or k < best:
            best = k
            if best == 0:
                return 0
        j += 1
    return best


def insert(ms, item, count=1):
    """Add `count` copies of `item`."""
    return add(ms, ((item, count),))


def discard(ms, item, count=1):
    """Remove `count` copies of `item`; requires presence."""
    return subtract(ms, ((item, count),))
