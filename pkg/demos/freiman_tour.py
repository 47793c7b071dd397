"""A short walk through relation spans, Freiman dimension and isomorphism classes of small integer sets."""

from __future__ import annotations

from itertools import combinations

from sumclique.freiman import (
    OrderedSet,
    are_s_isomorphic,
    check_freiman_inequality,
    classify,
    hom_space,
    relation_basis,
    spanning_subset,
)

for xs in [(0, 1, 2), (0, 1, 3), (0, 1, 2, 4), (0, 1, 3, 7)]:
    A = OrderedSet.integers(xs)
    hs = hom_space(A)
    rep = check_freiman_inequality(xs)
    print(f"{xs}: relations {relation_basis(A).basis}, dim {hs.freiman_dim}, "
          f"spanning subset {spanning_subset(A, hs).indices}, |A+A| = {rep.m} >= {rep.lower_bound}")

res = are_s_isomorphic(OrderedSet.integers((0, 1, 2)), OrderedSet.integers((5, 7, 9)))
print("\n{0,1,2} vs {5,7,9}:", res.isomorphic, res.bijection)

sets = [OrderedSet.integers(c) for c in combinations(range(10), 4)]
print("\nclasses of 4-subsets of {0..9} (s = 2):")
for c in classify(sets):
    print(f"  {c['representative'].elements}  x{c['count']}")
