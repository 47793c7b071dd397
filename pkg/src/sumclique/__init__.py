"""Cayley sum graphs over Z_N and Z_2^n: sumsets, clique numbers, and Freiman isomorphism tools."""

from .cayley import (
    CayleyGraph,
    CliqueResult,
    binomial_graph,
    build_cayley_sum_graph,
    count_cliques_of_size,
    is_clique,
    is_clique_by_sumset,
    max_clique,
    paley_set,
)
from .census import CensusTable, census, evaluate_count_bounds, expected_cliques, tail_sum_bound
from .freiman import (
    AmbientSpace,
    OrderedSet,
    are_s_isomorphic,
    classify,
    freiman_dimension,
    hom_space,
    rectify,
    relation_basis,
    unfold,
)
from .groups import BudgetExceeded, GroupKind, GroupSet, GroupSpec, PreconditionError
from .sampler import (
    SeedSpec,
    clique_number_distribution,
    popular_sum_refinement,
    random_subset,
    seven_doubling_subset,
    small_doubling_witness,
)
from .subspaces import (
    count_subspaces,
    enumerate_subspaces,
    intersection_pair_count,
    moment_report,
    subspace_clique_statistic,
)
from .sumsets import doubling_stats, pair_sum_counts, restricted_sumset, signed_iterated_sum, sumset

__version__ = "0.1.0"
