"""Kernel twins: the compiled and pure-Python multiset kernels must agree
with each other and with a Counter-based reference."""

from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from membranes import _mskernel_py as pyk

try:
    from membranes import _mskernel as cyk
except ImportError:
    cyk = None

KERNELS = [pyk] + ([cyk] if cyk is not None else [])

items = st.integers(min_value=0, max_value=6)
pair_lists = st.lists(st.tuples(items, st.integers(min_value=0, max_value=4)),
                      max_size=8)
multisets = pair_lists.map(pyk.from_pairs)


def as_counter(ms):
    return Counter(dict(ms))


@pytest.mark.parametrize("k", KERNELS, ids=lambda k: k.IMPL)
class TestAgainstCounterReference:
    @given(pairs=pair_lists)
    def test_from_pairs(self, k, pairs):
        expected = Counter()
        for item, count in pairs:
            expected[item] += count
        expected = +expected  # drop zero counts
        assert as_counter(k.from_pairs(pairs)) == expected

    @given(a=multisets, b=multisets)
    def test_add(self, k, a, b):
        assert as_counter(k.add(a, b)) == as_counter(a) + as_counter(b)

    @given(a=multisets, b=multisets)
    def test_contains(self, k, a, b):
        assert k.contains(a, b) == (as_counter(a) <= as_counter(b))

    @given(a=multisets, b=multisets)
    def test_subtract_roundtrip(self, k, a, b):
        merged = k.add(a, b)
        assert k.subtract(merged, b) == a

    @given(a=multisets, b=multisets)
    def test_subtract_rejects_underflow(self, k, a, b):
        if as_counter(b) <= as_counter(a):
            assert as_counter(k.subtract(a, b)) \
                == as_counter(a) - as_counter(b)
        else:
            with pytest.raises(ValueError):
                k.subtract(a, b)

    @given(contents=multisets, pattern=multisets)
    def test_count_max(self, k, contents, pattern):
        if not pattern:
            with pytest.raises(ValueError):
                k.count_max(contents, pattern)
            return
        got = k.count_max(contents, pattern)
        ccon, cpat = as_counter(contents), as_counter(pattern)
        expected = min(ccon.get(item, 0) // count
                       for item, count in cpat.items())
        assert got == expected

    @given(ms=multisets)
    def test_total(self, k, ms):
        assert k.total(ms) == sum(as_counter(ms).values())


@pytest.mark.skipif(cyk is None, reason="compiled kernel not built")
@given(a=multisets, b=multisets)
def test_twins_agree(a, b):
    assert pyk.add(a, b) == cyk.add(a, b)
    assert pyk.contains(a, b) == cyk.contains(a, b)
    if pyk.contains(b, a):
        assert pyk.subtract(a, b) == cyk.subtract(a, b)
    if b:
        assert pyk.count_max(a, b) == cyk.count_max(a, b)


def test_kernel_selection_env(monkeypatch):
    import importlib

    from membranes import kernel
    monkeypatch.setenv("MEMBRANES_PURE_KERNEL", "1")
    reloaded = importlib.reload(kernel)
    try:
        assert reloaded.IMPL == "python"
    finally:
        monkeypatch.delenv("MEMBRANES_PURE_KERNEL")
        importlib.reload(kernel)
