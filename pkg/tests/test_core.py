"""Core data model: multiset algebra, canonical forms, rendering."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from membranes import core
from membranes import kernel as K
from membranes.core import (DELTA, HERE, atom, canonicalize,
                            count_submultiset, directed, membrane,
                            num_objs_rec, render_configuration, soup,
                            soup_contains, soup_of, target_in)


def objs(*names):
    return soup_of([atom(n) for n in names])


class TestSoupContains:
    def test_empty_in_anything(self):
        assert soup_contains(objs(), objs("a", "b"))

    def test_multiplicity_insufficient(self):
        assert not soup_contains(objs("a", "a"), objs("a", "b"))

    def test_submultiset(self):
        assert soup_contains(objs("a", "b"), objs("a", "a", "b"))

    @given(st.lists(st.sampled_from("abcd"), max_size=6),
           st.lists(st.sampled_from("abcd"), max_size=6))
    def test_mutual_containment_is_equality(self, xs, ys):
        u, v = objs(*xs), objs(*ys)
        both = soup_contains(u, v) and soup_contains(v, u)
        assert both == (u == v)


class TestCountSubmultiset:
    def test_plain_multiplicity(self):
        assert count_submultiset(objs("d", "d", "a"), objs("d")) == 2

    def test_joint_pattern(self):
        # Frozen from brute force: max k with k*(a b) in (a a b b b) is 2.
        contents, pattern = objs("a", "a", "b", "b", "b"), objs("a", "b")
        brute = 0
        while soup_contains(
                K.from_pairs((i, c * (brute + 1)) for i, c in pattern),
                contents):
            brute += 1
        assert brute == 2
        assert count_submultiset(contents, pattern) == 2

    def test_empty_contents(self):
        assert count_submultiset(objs(), objs("a")) == 0

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            count_submultiset(objs("a"), objs())

    @given(st.lists(st.sampled_from("ab"), max_size=6),
           st.lists(st.sampled_from("ab"), min_size=1, max_size=3))
    def test_count_bound_property(self, xs, ps):
        contents, pattern = objs(*xs), objs(*ps)
        k = count_submultiset(contents, pattern)
        k_copies = K.from_pairs((i, c * k) for i, c in pattern)
        one_more = K.from_pairs((i, c * (k + 1)) for i, c in pattern)
        assert soup_contains(k_copies, contents)
        assert not soup_contains(one_more, contents)


class TestNumObjsRec:
    def test_nested_count(self):
        cfg = soup_of([membrane("M1", soup_of(
            [atom("a"), atom("a"), membrane("M2", objs("b"))]))])
        assert num_objs_rec(cfg) == 3

    def test_empty(self):
        assert num_objs_rec(soup([])) == 0

    def test_payload_objects_counted(self):
        cfg = soup_of([membrane("M1", soup_of(
            [directed(HERE, objs("a", "b")), atom("c")]))])
        assert num_objs_rec(cfg) == 3

    def test_delta_counts(self):
        assert num_objs_rec(soup_of([DELTA, atom("a")])) == 2

    @given(st.lists(st.sampled_from("abc"), max_size=5),
           st.lists(st.sampled_from("abc"), max_size=5))
    def test_additive_over_union(self, xs, ys):
        assert num_objs_rec(K.add(objs(*xs), objs(*ys))) \
            == num_objs_rec(objs(*xs)) + num_objs_rec(objs(*ys))


class TestCanonicalize:
    def test_commutativity(self):
        left = soup_of([membrane("M1", objs("b", "a"))])
        right = soup_of([membrane("M1", objs("a", "b"))])
        assert left == right

    def test_directed_merge(self):
        raw = ((directed(HERE, objs("a")), 1), (directed(HERE, objs("b")), 1))
        merged = canonicalize(raw)
        assert merged == soup_of([directed(HERE, objs("a", "b"))])

    def test_membrane_multiset_commutativity(self):
        one = soup_of([membrane("M1", soup_of(
            [membrane("M2", objs("a")), membrane("M2", objs("b"))]))])
        other = soup_of([membrane("M1", soup_of(
            [membrane("M2", objs("b")), membrane("M2", objs("a"))]))])
        assert one == other

    def test_division_messages_not_merged(self):
        ms = soup_of([core.division(objs("t"), objs("f")),
                      core.division(objs("t"), objs("f"))])
        assert sum(c for _, c in ms) == 2

    @given(st.lists(st.sampled_from("abc"), max_size=6))
    def test_idempotent(self, xs):
        cfg = soup_of([membrane("M1", soup_of(
            [directed(target_in("M2"), objs(*xs)),
             membrane("M2", objs(*xs))]))])
        assert canonicalize(cfg) == cfg
        assert canonicalize(canonicalize(cfg)) == canonicalize(cfg)


class TestRendering:
    def test_delta_first(self):
        assert render_configuration(
            soup_of([membrane("M2", objs("d", "delta", "d"))])) \
            == "< M2 | delta d d >"

    def test_empty_membrane(self):
        assert render_configuration(soup_of([membrane("M2", soup([]))])) \
            == "< M2 | empty >"

    def test_messages_and_compounds(self):
        cfg = soup_of([membrane("M1", soup_of(
            [directed(target_in("M2"), objs("a", "a")),
             core.compound("const", (0, True))]))])
        assert render_configuration(cfg) \
            == "< M1 | const(0, true) (a a, in M2) >"

    def test_seq_rendering(self):
        cfg = soup_of([core.seq_or_atom(["a", "b", "a"], "eps"), atom("c")])
        assert render_configuration(cfg) == "c (a · b · a)"
