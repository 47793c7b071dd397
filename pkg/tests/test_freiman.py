from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from sumclique.freiman import (
    AmbientSpace,
    OrderedSet,
    are_s_isomorphic,
    canonical_class_key,
    check_freiman_inequality,
    check_mod2_dimension_bound,
    classification_report,
    classify,
    count_homs_brute,
    definition_oracle,
    extension_class_count,
    freiman_dimension,
    hom_space,
    key_hex,
    rectify,
    relation_basis,
    spanning_subset,
    sum_classes,
    unfold,
)
from sumclique.groups import GroupSet, GroupSpec, PreconditionError
from sumclique.linalg import RationalEchelon, make_echelon

Q = OrderedSet.integers
F2_4 = AmbientSpace.boolean(4)


def boolean_set(*elements):
    return OrderedSet(F2_4, tuple(elements))


def satisfied_relations(sigma, s):
    """Every s-relation (as a vector) that sigma satisfies, from the definition."""
    k = len(sigma)
    out = set()
    for members in sum_classes(sigma, s).values():
        for a in members:
            for b in members:
                if a != b:
                    v = [0] * k
                    for i in a:
                        v[i] += 1
                    for i in b:
                        v[i] -= 1
                    out.add(tuple(v))
    return out


def all_relations(k, s):
    from itertools import combinations_with_replacement

    ms = list(combinations_with_replacement(range(k), s))
    for a in ms:
        for b in ms:
            if a != b:
                v = [0] * k
                for i in a:
                    v[i] += 1
                for i in b:
                    v[i] -= 1
                if any(v):
                    yield tuple(v)


# -- relation spans -----------------------------------------------------------


def test_relation_basis_examples():
    assert relation_basis(Q((0, 1, 2))).basis == ((1, -2, 1),)
    assert relation_basis(Q((0, 1, 3))).basis == ()
    assert relation_basis(boolean_set(0, 1, 2, 3)).basis == ((1, 1, 1, 1),)


def test_relation_basis_errors():
    with pytest.raises(PreconditionError):
        relation_basis(Q((0, 1, 2)), 4)
    with pytest.raises(PreconditionError):
        relation_basis(Q((0,)))
    with pytest.raises(PreconditionError):
        Q((0, 1, 1))


def test_basis_rows_sum_to_zero():
    rng = random.Random(3)
    for _ in range(50):
        sigma = Q(tuple(rng.sample(range(40), rng.randint(2, 7))))
        for s in (2, 3):
            for row in relation_basis(sigma, s).basis:
                assert sum(row) == 0


def test_class_keys():
    key = lambda xs: canonical_class_key(relation_basis(Q(xs)))
    assert key((0, 1, 2)) == key((5, 7, 9))
    assert key((0, 1, 2)) != key((0, 1, 3))
    assert key((4, 0, 9)) == key((4, 0, 9))
    assert len(key_hex(key((0, 1, 2)))) == 16


@pytest.mark.parametrize("s", [2, 3])
def test_span_recovers_satisfied_relations(s):
    rng = random.Random(s)
    for _ in range(25):
        k = rng.randint(2, 5)
        sigma = Q(tuple(rng.sample(range(12), k)))
        ech = RationalEchelon(k)
        for row in relation_basis(sigma, s).basis:
            ech.add(row)
        recovered = {v for v in all_relations(k, s) if ech.contains(v)}
        assert recovered == satisfied_relations(sigma, s)


def test_span_recovery_over_f2():
    rng = random.Random(9)
    for _ in range(25):
        k = rng.randint(2, 6)
        sigma = boolean_set(*rng.sample(range(16), k))
        ech = make_echelon(k, 2)
        for row in relation_basis(sigma, 2).basis:
            ech.add(row)
        got = {v for v in all_relations(k, 2) if ech.contains(v)}
        want = {v for v in all_relations(k, 2)
                if sum(sigma.elements[i] * 0 for i in range(k)) == 0 and _f2_holds(sigma, v)}
        assert got == want


def _f2_holds(sigma, v):
    acc = 0
    for i, c in enumerate(v):
        if c % 2:
            acc ^= sigma.elements[i]
    return acc == 0


def test_six_relations_saturate_lazily():
    rb = relation_basis(Q((0, 1, 2, 3, 4)), 6)
    assert rb.rank == 3  # a 5-term progression has dimension 1


# -- isomorphism ----------------------------------------------------------------


def test_isomorphism_examples():
    assert are_s_isomorphic(Q((0, 1, 2)), Q((5, 7, 9))).isomorphic
    assert not are_s_isomorphic(Q((0, 1, 2)), Q((0, 1, 3))).isomorphic
    z2 = OrderedSet(AmbientSpace.cyclic(2), (0, 1))
    assert not are_s_isomorphic(Q((0, 1)), z2).isomorphic
    assert not are_s_isomorphic(Q((0, 1)), z2, method="definition_oracle").isomorphic


def test_bijection_is_witness():
    res = are_s_isomorphic(Q((0, 1, 2, 5)), Q((0, 3, 6, 7)))
    assert res.isomorphic
    mapping = dict(res.bijection)
    a = sorted(mapping)
    b = [mapping[x] for x in a]
    assert definition_oracle(a, int.__add__, b, int.__add__, 2) == tuple(range(4))


def test_methods_agree_random_pairs():
    rng = random.Random(4)
    for _ in range(150):
        k = rng.randint(2, 5)
        A = Q(tuple(rng.sample(range(10), k)))
        B = Q(tuple(rng.sample(range(10), k)))
        for s in (2, 3):
            r1 = are_s_isomorphic(A, B, s, "relation_span")
            r2 = are_s_isomorphic(A, B, s, "definition_oracle")
            assert r1.isomorphic == r2.isomorphic


def test_oracle_cap():
    with pytest.raises(PreconditionError):
        definition_oracle(list(range(9)), int.__add__, list(range(9)), int.__add__)


def test_large_k_is_tristate():
    A = Q(tuple(range(10)))
    assert are_s_isomorphic(A, Q(tuple(range(3, 33, 3)))).isomorphic is True
    assert are_s_isomorphic(A, Q(tuple(range(9)) + (20,))).isomorphic in (False, None)


# -- homomorphism spaces --------------------------------------------------------


def test_hom_space_examples():
    assert hom_space(Q((0, 1, 2))).dim == 2
    assert freiman_dimension(Q((0, 1, 2))) == 1
    assert hom_space(Q((0, 1, 3))).dim == 3
    hs = hom_space(boolean_set(0, 1, 2, 3))
    assert hs.dim == 3 and hs.freiman_dim == 2


def test_hom_space_contains_constants():
    rng = random.Random(7)
    for _ in range(30):
        A = Q(tuple(rng.sample(range(30), rng.randint(1, 7))))
        hs = hom_space(A)
        assert hs.dim >= 1
        ech = make_echelon(len(A), 0)
        for row in hs.basis:
            ech.add(row)
        assert ech.contains([1] * len(A))


def _embedded_affine_rank(A, hs):
    k = len(A)
    char = A.space.characteristic
    points = [[row[i] for row in hs.basis] for i in range(k)]
    ech = make_echelon(hs.dim, char)
    for p in points[1:]:
        ech.add([x - y for x, y in zip(p, points[0])])
    return ech.rank


def test_embedding_spans_affine_space_of_dimension_r():
    rng = random.Random(8)
    for _ in range(30):
        A = Q(tuple(rng.sample(range(25), rng.randint(2, 7))))
        hs = hom_space(A)
        assert _embedded_affine_rank(A, hs) == hs.freiman_dim
    for _ in range(15):
        B = boolean_set(*rng.sample(range(16), rng.randint(2, 7)))
        hs = hom_space(B)
        assert _embedded_affine_rank(B, hs) == hs.freiman_dim


def test_spanning_subset_examples():
    sp = spanning_subset(Q((0, 1, 2)))
    assert sp.indices == (0, 1)
    assert tuple(sp.coefficients[2]) == (Fraction(-1), Fraction(2))
    sidon = spanning_subset(Q((0, 1, 3, 7)))
    assert sidon.indices == (0, 1, 2, 3)
    assert [list(r) for r in sidon.coefficients] == [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    sub = spanning_subset(boolean_set(0, 1, 2, 3))
    assert sub.indices == (0, 1, 2)
    assert tuple(sub.coefficients[3]) == (1, 1, 1)


def test_spanning_subset_reproduces_homs():
    rng = random.Random(12)
    for _ in range(30):
        A = Q(tuple(rng.sample(range(30), rng.randint(2, 7))))
        hs = hom_space(A)
        sp = spanning_subset(A, hs)
        assert len(sp.indices) == hs.dim
        for row in sp.coefficients:
            assert sum(row) == 1
        for phi in hs.basis:
            for a, row in enumerate(sp.coefficients):
                assert phi[a] == sum(c * phi[i] for c, i in zip(row, sp.indices))


def test_boolean_hom_count_is_power_of_two():
    rng = random.Random(13)
    for _ in range(20):
        B = boolean_set(*rng.sample(range(16), rng.randint(2, 8)))
        r = freiman_dimension(B)
        assert count_homs_brute(B, 1) == 2 ** (r + 1)


def test_hom_count_into_plane():
    # maps into F_2^2 number |F|^((r+1) * 2)
    B = boolean_set(0, 1, 2, 3)
    r = freiman_dimension(B)
    assert count_homs_brute(B, 2) == 2 ** ((r + 1) * 2)


def test_dimension_is_isomorphism_invariant():
    rng = random.Random(14)
    for _ in range(60):
        k = rng.randint(2, 5)
        A = Q(tuple(rng.sample(range(12), k)))
        B = Q(tuple(rng.sample(range(12), k)))
        if are_s_isomorphic(A, B, 2, "definition_oracle").isomorphic:
            assert freiman_dimension(A) == freiman_dimension(B)


# -- Z_N ----------------------------------------------------------------------------


def test_unfold():
    z10 = GroupSpec.cyclic(10)
    assert sorted(unfold(GroupSet.from_elements(z10, [0, 3, 9])).elements) == [3, 9, 10]
    assert unfold(GroupSet.from_elements(z10, [1, 2])).elements == (1, 2)
    with pytest.raises(PreconditionError):
        unfold(GroupSet.from_elements(GroupSpec.boolean(2), [1]))


def test_rectify_examples():
    z11 = GroupSpec.cyclic(11)
    assert rectify(GroupSet.from_elements(z11, [0, 1, 10])) == (1, 1)
    lam, mu = rectify(GroupSet.from_elements(z11, [0, 5]))
    assert all((lam * x + mu) % 11 <= 5 for x in (0, 5))
    assert rectify(GroupSet.full(GroupSpec.cyclic(13))) is None
    with pytest.raises(PreconditionError):
        rectify(GroupSet.from_elements(GroupSpec.cyclic(12), [1]))


def test_rectify_small_sets_exhaustively():
    g = GroupSpec.cyclic(13)
    for k in (2, 3):
        for c in combinations(range(13), k):
            res = rectify(GroupSet.from_elements(g, c))
            assert res is not None  # sets this small always fit in half the group


def test_freiman_inequality_examples():
    r = check_freiman_inequality([0, 1, 2, 3])
    assert (r.r, r.m, r.lower_bound, r.holds) == (1, 5, 3, True)
    r = check_freiman_inequality([0, 1, 3, 7])
    assert (r.r, r.m, r.lower_bound, r.holds) == (3, 6, 6, True)
    r = check_freiman_inequality([0, 1])
    assert (r.r, r.m, r.lower_bound, r.holds) == (1, 1, 1, True)


def test_mod2_dimension_examples():
    g = GroupSpec.boolean(4)
    rep = check_mod2_dimension_bound(GroupSet.from_elements(g, [0, 1, 2, 3]))
    assert (rep.r, rep.m, rep.bound_log2, rep.holds) == (2, 3, 6.0, True)
    rep = check_mod2_dimension_bound(GroupSet.from_elements(g, [1, 2, 4, 8]))
    assert rep.m == 6 and rep.r <= 3 and rep.bound_log2 == 12.0 and rep.holds
    rep = check_mod2_dimension_bound(GroupSet.from_elements(g, [1, 2, 4]))
    assert rep.r == 2 and rep.bound_log2 == pytest.approx(6.34, abs=0.01) and rep.holds


# -- classification -----------------------------------------------------------------


def test_classification_partitions_agree():
    sets = [Q(c) for c in combinations(range(8), 3)] + [Q(c) for c in combinations(range(8), 4)]
    span = {frozenset(A.elements for A in c["members"]) for c in classify(sets)}
    oracle = {frozenset(A.elements for A in c["members"]) for c in classify(sets, method="definition_oracle")}
    assert span == oracle


def test_sumset_size_constant_on_classes():
    sets = [Q(c) for c in combinations(range(9), 4)]
    for c in classify(sets):
        sizes = {len({x + y for x, y in combinations(A.elements, 2)}) for A in c["members"]}
        assert len(sizes) == 1


def test_classification_report():
    import json

    rows = json.loads(classification_report(classify([Q((0, 1, 2)), Q((3, 4, 5)), Q((0, 1, 3))])))
    assert [r["count"] for r in rows] == [2, 1]
    assert set(rows[0]) == {"class_key_hex", "representative", "count"}


def test_three_isomorphic_sumsets_of_six_isomorphic_sets():
    rng = random.Random(15)
    for _ in range(10):
        X = sorted(rng.sample(range(15), 4))
        a, b = rng.choice([-3, -2, 2, 3, 5]), rng.randint(-10, 10)
        Y = [a * x + b for x in X]
        assert are_s_isomorphic(Q(tuple(X)), Q(tuple(Y)), 6, "definition_oracle").isomorphic
        XX = sorted({x + y for x, y in combinations(X, 2)})
        YY = sorted({x + y for x, y in combinations(Y, 2)})
        assert definition_oracle(XX, int.__add__, YY, int.__add__, 3) is not None


@pytest.mark.parametrize("B,t", [((0, 1, 3), 1), ((0, 2, 3, 7), 1), ((0, 1, 3), 2)])
def test_extension_class_bound(B, t):
    universe = range(0, 31) if t == 1 else range(0, 14)
    assert extension_class_count(B, t, universe) <= len(B) ** (3 * t**4)
