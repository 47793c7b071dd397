from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from sumclique.groups import GroupSet, GroupSpec, PreconditionError
from sumclique.sampler import (
    SeedSpec,
    clique_number_distribution,
    popular_sum_refinement,
    random_subset,
    seven_doubling_subset,
    small_doubling_witness,
    unpopular_degrees,
    verify_refinement,
    witness_probability,
)
from sumclique.sumsets import pair_sum_counts, restricted_sumset


def test_seed_spec_streams_are_reproducible_and_distinct():
    a = SeedSpec(5, 0).rng().random(4)
    assert np.array_equal(a, SeedSpec(5, 0).rng().random(4))
    assert not np.array_equal(a, SeedSpec(5, 1).rng().random(4))
    assert SeedSpec(5).child(3) == SeedSpec(5, 3)


def test_random_subset_extreme_densities():
    g = GroupSpec.cyclic(100)
    assert len(random_subset(g, 0, seed=1)) == 0
    assert len(random_subset(g, 1, seed=1)) == 100


def test_random_subset_concentrates():
    g = GroupSpec.cyclic(1 << 20)
    N = g.order
    for seed in range(100):
        size = len(random_subset(g, Fraction(1, 2), seed))
        assert abs(size - N / 2) <= 6 * math.sqrt(N) / 2


def test_random_subset_seeded():
    g = GroupSpec.boolean(10)
    assert random_subset(g, seed=4) == random_subset(g, seed=4)
    assert random_subset(g, seed=4) != random_subset(g, seed=5)


@pytest.mark.parametrize("baseline", ["cayley", "binomial"])
def test_distribution_small(baseline):
    dist = clique_number_distribution(GroupSpec.cyclic(16), 20, seed=3, baseline=baseline, threads=1)
    assert len(dist.trials) == 20
    assert not dist.inexact_trials
    assert sum(dist.histogram.values()) == 20
    assert all(1 <= w <= 16 for w in dist.exact_omegas())


def test_distribution_thread_invariance():
    g = GroupSpec.boolean(7)
    one = clique_number_distribution(g, 8, seed=11, threads=1)
    two = clique_number_distribution(g, 8, seed=11, threads=2)
    assert one.to_json(timings=False) == two.to_json(timings=False)


def test_distribution_errors():
    with pytest.raises(PreconditionError):
        clique_number_distribution(GroupSpec.cyclic(8), 0)
    with pytest.raises(PreconditionError):
        clique_number_distribution(GroupSpec.cyclic(8), 1, baseline="other")


def test_histogram_csv():
    dist = clique_number_distribution(GroupSpec.cyclic(12), 5, seed=0, threads=1)
    lines = dist.histogram_csv().strip().splitlines()
    assert lines[0] == "omega,count"
    assert sum(int(l.split(",")[1]) for l in lines[1:]) == 5


# -- refinement -------------------------------------------------------------------


def test_unpopular_degree_paths_agree():
    g = GroupSpec.cyclic(4000)
    A = random_subset(g, Fraction(1, 4), seed=2)
    elems, deg = unpopular_degrees(g, A, 3)
    # direct count per element
    s = pair_sum_counts(g, A)
    mask = A.to_mask()
    for i in range(0, len(elems), 97):
        x = int(elems[i])
        ys = elems[elems != x]
        assert deg[i] == int(((s[g.add_arrays(ys, x)] < 3)).sum())
    assert mask[elems].all()


def test_refinement_degenerate_for_small_k():
    g = GroupSpec.cyclic(50)
    A = GroupSet.from_elements(g, [3, 9])
    r = popular_sum_refinement(g, A)
    assert r.degenerate and r.Q == 1
    assert r.A0 == A and len(r.A1) == 0 and r.a_star == 3
    assert verify_refinement(g, A, r)


def test_refinement_containment():
    g = GroupSpec.cyclic(1 << 14)
    for seed in range(5):
        A = random_subset(g, Fraction(1, 8), seed)
        r = popular_sum_refinement(g, A, seed=seed)
        assert not r.degenerate
        assert verify_refinement(g, A, r)
        shifted = GroupSet.from_elements(g, g.add_arrays(r.A1.to_array(), r.a_star).tolist())
        assert shifted.issubset(restricted_sumset(g, r.A0))


def test_refinement_on_progression_meets_target():
    g = GroupSpec.cyclic(1 << 16)
    A = GroupSet.from_elements(g, range(4000))
    r = popular_sum_refinement(g, A, seed=1)
    assert r.met_target and r.objective <= r.target


def test_refinement_errors():
    g = GroupSpec.cyclic(10)
    with pytest.raises(PreconditionError):
        popular_sum_refinement(g, GroupSet.from_elements(g, [1]))


# -- witnesses --------------------------------------------------------------------


def test_witness_density_too_large():
    g = GroupSpec.cyclic(1000)
    with pytest.raises(PreconditionError):
        small_doubling_witness(GroupSet.from_elements(g, range(100)))
    assert witness_probability(100, Fraction(1, 9)) > 1


def test_witness_epsilon_range():
    g = GroupSpec.boolean(12)
    with pytest.raises(PreconditionError):
        small_doubling_witness(GroupSet.full(g), Fraction(1, 3))
    with pytest.raises(PreconditionError):
        small_doubling_witness(GroupSet.full(g), 0)


def test_witness_full_boolean_group():
    g = GroupSpec.boolean(16)
    A = GroupSet.full(g)
    w = small_doubling_witness(A, Fraction(1, 9), seed=0)
    k = len(A)
    assert w.B.issubset(A)
    assert len(w.B) <= 3 * math.log(9) * 9 * math.sqrt(k)
    assert len(restricted_sumset(g, w.B)) >= Fraction(8, 9) * k
    assert w.achieved_m == len(restricted_sumset(g, w.B))


def test_witness_is_seeded():
    g = GroupSpec.cyclic(1 << 15)
    A = GroupSet.from_elements(g, range(0, 1 << 15, 2))
    assert small_doubling_witness(A, seed=7).B == small_doubling_witness(A, seed=7).B


def test_seven_doubling_below_minimum():
    g = GroupSpec.cyclic(100)
    with pytest.raises(PreconditionError):
        seven_doubling_subset(GroupSet.from_elements(g, range(50)))


def test_seven_doubling_small_threshold():
    g = GroupSpec.cyclic(1 << 18)
    A = GroupSet.from_elements(g, range(0, 1 << 18, 2))
    C = seven_doubling_subset(A, seed=2, k_min=1000)
    k = len(A)
    assert math.ceil(k / 8) <= len(C) <= 8 * k // 63
    assert C.issubset(A)
    assert len(restricted_sumset(g, C)) >= 7 * len(C)
    assert C == seven_doubling_subset(A, seed=2, k_min=1000)
    assert C != seven_doubling_subset(A, seed=3, k_min=1000)


@pytest.mark.slow
def test_seven_doubling_default_threshold():
    g = GroupSpec.cyclic(1 << 21)
    A = random_subset(g, Fraction(1, 2), seed=0)
    while len(A) < 1 << 20:
        A = A.union(GroupSet.from_elements(g, range(1 << 20)))
    C = seven_doubling_subset(A, seed=0)
    k = len(A)
    assert math.ceil(k / 8) <= len(C) <= 8 * k // 63
