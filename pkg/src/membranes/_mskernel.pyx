# cython: language_level=3
"""Compiled multiset kernel.

Semantics are identical to ``_mskernel_py``; see that module for the
canonical-representation contract.  Items stay generic Python objects; the
speedup comes from C-level loops and avoiding interpreter dispatch in the
merge/containment scans that dominate state-space exploration.
"""

IMPL = "cython"


def from_pairs(pairs):
    """Build a canonical multiset from unsorted (item, count) pairs."""
    cdef dict acc = {}
    for item, count in pairs:
        if count:
            if item in acc:
                acc[item] = acc[item] + count
            else:
                acc[item] = count
    return tuple(sorted(acc.items()))


def total(tuple ms):
    """Number of elements counted with multiplicity."""
    cdef Py_ssize_t i, n = len(ms)
    cdef object acc = 0
    for i in range(n):
        acc += (<tuple>ms[i])[1]
    return acc


def contains(tuple sub, tuple sup):
    """True iff every item of `sub` occurs in `sup` with >= multiplicity."""
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t nsub = len(sub), nsup = len(sup)
    cdef tuple ps, pq
    while i < nsub:
        ps = <tuple>sub[i]
        while j < nsup and (<tuple>sup[j])[0] < ps[0]:
            j += 1
        if j >= nsup:
            return False
        pq = <tuple>sup[j]
        if pq[0] != ps[0] or pq[1] < ps[1]:
            return False
        i += 1
        j += 1
    return True


def add(tuple a, tuple b):
    """Multiset union (counts add)."""
    if not a:
        return b
    if not b:
        return a
    cdef list out = []
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t na = len(a), nb = len(b)
    cdef tuple pa, pb
    while i < na and j < nb:
        pa = <tuple>a[i]
        pb = <tuple>b[j]
        if pa[0] < pb[0]:
            out.append(pa)
            i += 1
        elif pb[0] < pa[0]:
            out.append(pb)
            j += 1
        else:
            out.append((pa[0], pa[1] + pb[1]))
            i += 1
            j += 1
    while i < na:
        out.append(a[i])
        i += 1
    while j < nb:
        out.append(b[j])
        j += 1
    return tuple(out)


def subtract(tuple a, tuple b):
    """Multiset difference a - b; requires b to be contained in a."""
    if not b:
        return a
    cdef list out = []
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t na = len(a), nb = len(b)
    cdef tuple pa, pb
    while i < na:
        pa = <tuple>a[i]
        if j < nb:
            pb = <tuple>b[j]
            if pb[0] == pa[0]:
                if pb[1] > pa[1]:
                    raise ValueError(
                        f"multiset subtraction underflow at {pa[0]!r}")
                if pa[1] > pb[1]:
                    out.append((pa[0], pa[1] - pb[1]))
                j += 1
                i += 1
                continue
            if pb[0] < pa[0]:
                raise ValueError(f"item {pb[0]!r} not present in minuend")
        out.append(pa)
        i += 1
    if j < nb:
        raise ValueError(f"item {(<tuple>b[j])[0]!r} not present in minuend")
    return tuple(out)


def count_max(tuple contents, tuple pattern):
    """Largest k such that k copies of `pattern` fit jointly in `contents`.

    `pattern` must be nonempty.
    """
    if not pattern:
        raise ValueError("empty pattern has no defined multiplicity")
    cdef Py_ssize_t j = 0, ncon = len(contents)
    cdef object best = None, k
    cdef tuple pp, pc
    for pp in pattern:
        while j < ncon and (<tuple>contents[j])[0] < pp[0]:
            j += 1
        if j >= ncon:
            return 0
        pc = <tuple>contents[j]
        if pc[0] != pp[0]:
            return 0
        k = pc[1] // pp[1]
        if best is None or k < best:
            best = k
            if best == 0:
                return 0
        j += 1
    return best


def insert(tuple ms, item, count=1):
    """Add `count` copies of `item`."""
    return add(ms, ((item, count),))


def discard(tuple ms, item, count=1):
    """Remove `count` copies of `item`; requires presence."""
    return subtract(ms, ((item, count),))
