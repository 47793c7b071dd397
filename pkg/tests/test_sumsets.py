from __future__ import annotations

from itertools import product
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumclique.groups import GroupSet, GroupSpec, PreconditionError
from sumclique.sumsets import (
    doubling_stats,
    negation,
    pair_sum_counts,
    restricted_sumset,
    signed_iterated_sum,
    summing_quadruple_count,
    sumset,
)


def naive_restricted(g, X):
    els = X.elements()
    return {g.add(a, b) for a in els for b in els if a != b}


def quartic_quadruples(g, B):
    els = B.elements()
    return sum(
        1
        for a, b, c, d in product(els, repeat=4)
        if a != b and c != d and g.add(a, b) == g.add(c, d)
    )


@st.composite
def group_and_set(draw, max_order=64):
    if draw(st.booleans()):
        g = GroupSpec.cyclic(draw(st.integers(1, max_order)))
    else:
        g = GroupSpec.boolean(draw(st.integers(0, 6)))
    els = draw(st.sets(st.integers(0, g.order - 1), max_size=min(g.order, 70)))
    return g, GroupSet.from_elements(g, els)


def test_restricted_examples():
    z5 = GroupSpec.cyclic(5)
    assert restricted_sumset(z5, GroupSet.from_elements(z5, [0, 1])).elements() == [1]
    z10 = GroupSpec.cyclic(10)
    assert restricted_sumset(z10, GroupSet.from_elements(z10, [0, 1, 2])).elements() == [1, 2, 3]
    b = GroupSpec.boolean(2)
    assert restricted_sumset(b, GroupSet.full(b)).elements() == [1, 2, 3]


def test_sumset_examples():
    z5 = GroupSpec.cyclic(5)
    X = GroupSet.from_elements(z5, [0, 1])
    assert sumset(z5, X, X).elements() == [0, 1, 2]
    assert len(sumset(z5, X, GroupSet.empty(z5))) == 0


@settings(max_examples=200, deadline=None)
@given(group_and_set())
def test_restricted_matches_naive(gx):
    g, X = gx
    R = restricted_sumset(g, X)
    assert set(R.elements()) == naive_restricted(g, X)
    k = len(X)
    assert len(R) >= max(0, k - 1)  # x + (X - {x}) alone has k - 1 sums
    assert len(R) <= k * (k - 1) // 2
    assert R.issubset(sumset(g, X, X))


@settings(max_examples=100, deadline=None)
@given(group_and_set(max_order=40), st.data())
def test_translation_and_dilation(gx, data):
    g, X = gx
    t = data.draw(st.integers(0, g.order - 1))
    R = restricted_sumset(g, X)
    shifted = restricted_sumset(g, X.translate(t))
    if g.is_boolean:
        assert shifted == R
    else:
        assert shifted == R.translate((2 * t) % g.order)
        a = data.draw(st.integers(1, max(1, g.order - 1)))
        if gcd(a, g.order) == 1:
            img = GroupSet.from_elements(g, [(a * x + t) % g.order for x in X.elements()])
            assert len(restricted_sumset(g, img)) == len(R)


@settings(max_examples=100, deadline=None)
@given(group_and_set())
def test_boolean_full_sumset_adds_zero(gx):
    g, X = gx
    if g.is_boolean and len(X):
        assert sumset(g, X, X) == restricted_sumset(g, X).union(GroupSet.from_elements(g, [0]))


@settings(max_examples=60, deadline=None)
@given(group_and_set(max_order=24))
def test_quadruples_against_quartic_loop(gx):
    g, X = gx
    if len(X) > 12:
        X = GroupSet.from_elements(g, X.elements()[:12])
    assert summing_quadruple_count(g, X) == quartic_quadruples(g, X)


def test_cauchy_schwarz_random_sets():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        g = GroupSpec.cyclic(int(rng.integers(2, 60)))
        size = int(rng.integers(2, min(g.order, 12) + 1))
        B = GroupSet.from_elements(g, rng.choice(g.order, size, replace=False).tolist())
        m = len(restricted_sumset(g, B))
        k = len(B)
        assert summing_quadruple_count(g, B) * m >= k * k * (k - 1) ** 2


def test_pair_sum_counts_ordered():
    g = GroupSpec.cyclic(7)
    X = GroupSet.from_elements(g, [0, 1, 2])
    s = pair_sum_counts(g, X)
    assert s.tolist() == [0, 2, 2, 2, 0, 0, 0]


def test_signed_sums():
    g = GroupSpec.cyclic(20)
    X = GroupSet.from_elements(g, [0, 1])
    assert signed_iterated_sum(g, X, 2, 0).elements() == [0, 1, 2]
    assert signed_iterated_sum(g, X, 1, 1).elements() == [0, 1, 19]
    assert signed_iterated_sum(g, X, 0, 1) == negation(g, X)
    with pytest.raises(PreconditionError):
        signed_iterated_sum(g, X, 0, 0)
    with pytest.raises(PreconditionError):
        signed_iterated_sum(g, X, -1, 2)


def test_doubling_stats():
    g = GroupSpec.cyclic(100)
    st_ = doubling_stats(g, GroupSet.from_elements(g, range(10)))
    assert (st_.k, st_.m, st_.sum_size) == (10, 17, 19)
    assert str(st_.ratio) == "17/10"
    empty = doubling_stats(g, GroupSet.empty(g))
    assert empty.m == 0 and empty.ratio is None


def test_large_set_path_matches_small_path():
    g = GroupSpec.cyclic(1009)
    rng = np.random.default_rng(2)
    X = GroupSet.from_elements(g, rng.choice(1009, 200, replace=False).tolist())
    assert set(restricted_sumset(g, X).elements()) == naive_restricted(g, X)
