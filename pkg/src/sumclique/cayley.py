"""Cayley sum graphs, Paley sum graphs, and exact clique search."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ._clique_kernel import count_cliques_kernel, degeneracy_order, max_clique_kernel
from .groups import BudgetExceeded, GroupSet, GroupSpec, PreconditionError
from .sumsets import restricted_sumset

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_COUNT_CAP = 10**9


def pack_rows(matrix) -> np.ndarray:
    """Pack a square boolean matrix into ``(N, W)`` little-endian ``uint64`` words."""
    M = np.asarray(matrix, dtype=bool)
    N = M.shape[0]
    W = max(1, (N + 63) // 64)
    padded = np.zeros((N, W * 64), dtype=bool)
    padded[:, :N] = M
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(N, W).copy()


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    """Simple graph on the group with ``ij`` an edge iff ``i != j`` and ``i + j`` in the generator.

    ``generator`` is ``None`` for graphs that did not come from a set (the
    binomial baseline and complements).
    """

    group: GroupSpec | None
    generator: GroupSet | None
    dense: np.ndarray = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return self.dense.shape[0]

    @cached_property
    def adjacency(self) -> np.ndarray:
        return pack_rows(self.dense)

    @cached_property
    def rows(self) -> tuple[int, ...]:
        """Adjacency rows as Python integer bitsets."""
        return tuple(
            int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in self.dense
        )

    def degree(self, i: int) -> int:
        return int(self.dense[i].sum())

    def edges(self):
        iu, ju = np.nonzero(np.triu(self.dense, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def complement(self) -> CayleyGraph:
        comp = ~self.dense
        np.fill_diagonal(comp, False)
        gen = self.generator.complement() if self.generator is not None else None
        return CayleyGraph(self.group, gen, comp)


def _check_invariants(g: GroupSpec, A: GroupSet, dense: np.ndarray) -> None:
    if not np.array_equal(dense, dense.T):
        raise AssertionError("adjacency not symmetric")
    if dense.diagonal().any():
        raise AssertionError("self-loop present")
    mask = A.to_mask()
    idx = np.arange(g.order)
    doubled = g.add_arrays(idx, idx)
    expected = len(A) - mask[doubled].astype(np.int64)
    if not np.array_equal(dense.sum(axis=1), expected):
        raise AssertionError("degree rule violated")


def build_cayley_sum_graph(g: GroupSpec, A: GroupSet) -> CayleyGraph:
    """Graph on ``g`` joining ``i != j`` whenever ``i + j`` lies in ``A``."""
    if A.group != g:
        raise PreconditionError("generator lives in a different group")
    idx = np.arange(g.order)
    mask = A.to_mask()
    dense = mask[g.add_arrays(idx[:, None], idx[None, :])]
    np.fill_diagonal(dense, False)
    _check_invariants(g, A, dense)
    return CayleyGraph(g, A, dense)


def binomial_graph(N: int, rng: np.random.Generator, p: float = 0.5) -> CayleyGraph:
    """A G(N, p) sample, used as the baseline the Cayley construction is compared with."""
    upper = np.triu(rng.random((N, N)) < p, 1)
    return CayleyGraph(None, None, upper | upper.T)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def paley_set(N: int) -> GroupSet:
    """Nonzero quadratic residues modulo a prime ``N``."""
    if not _is_prime(N):
        raise PreconditionError(f"{N} is not prime")
    g = GroupSpec.cyclic(N)
    return GroupSet.from_elements(g, {x * x % N for x in range(1, N)})


def is_clique(graph: CayleyGraph, X: GroupSet) -> bool:
    rows = graph.rows
    for x in X.elements():
        others = X.bits & ~(1 << x)
        if others & ~rows[x]:
            return False
    return True


def is_clique_by_sumset(graph: CayleyGraph, X: GroupSet) -> bool:
    """The same predicate through the sumset: ``X`` is a clique iff its restricted sumset lies in ``A``."""
    if graph.generator is None:
        raise PreconditionError("graph has no generating set")
    return restricted_sumset(graph.group, X).issubset(graph.generator)


@dataclass(frozen=True)
class CliqueResult:
    omega: int
    witness: tuple[int, ...]
    nodes_explored: int
    exact: bool

    def to_json(self) -> dict:
        return {
            "omega": self.omega,
            "witness": list(self.witness),
            "nodes": self.nodes_explored,
            "exact": self.exact,
        }


def _greedy_clique(dense: np.ndarray, order: np.ndarray) -> list[int]:
    clique: list[int] = []
    cand = np.ones(dense.shape[0], dtype=bool)
    for v in order:
        if cand[v]:
            clique.append(int(v))
            cand &= dense[v]
    return clique


def max_clique(
    graph: CayleyGraph, budget: int = DEFAULT_NODE_BUDGET, complement: bool = False
) -> CliqueResult:
    """Exact clique number by colouring-bounded branch and bound.

    With ``complement=True`` the independence number is computed instead.
    If ``budget`` node expansions run out, the best clique found so far is
    returned with ``exact=False``.
    """
    if complement:
        graph = graph.complement()
    dense = graph.dense
    N = dense.shape[0]
    if N == 0:
        return CliqueResult(0, (), 0, True)
    order = degeneracy_order(dense)
    reordered = dense[np.ix_(order, order)]
    seed = _greedy_clique(reordered, np.arange(N))
    adj = pack_rows(reordered)
    depth_cap = int(dense.sum(axis=1).max()) + 2
    buf = np.zeros(depth_cap, dtype=np.int32)
    best, nodes, finished = max_clique_kernel(adj, N, len(seed), int(budget), buf, depth_cap)
    local = buf[:best].tolist() if best > len(seed) else seed
    witness = tuple(sorted(int(order[v]) for v in local))
    return CliqueResult(int(best), witness, int(nodes), bool(finished))


def count_cliques_of_size(graph: CayleyGraph, k: int, cap: int = DEFAULT_COUNT_CAP) -> int:
    """Number of ``k``-vertex cliques.

    Cost grows like the number of cliques of size below ``k``; it is meant
    for small graphs (N up to about 64) or small ``k``.  ``cap`` limits the
    number of partial-clique expansions.
    """
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    if k > graph.n_vertices:
        return 0
    total = count_cliques_kernel(graph.adjacency, graph.n_vertices, int(k), int(cap))
    if total < 0:
        raise BudgetExceeded(f"clique counting exceeded {cap} expansions")
    return int(total)


def format_edge_list(graph: CayleyGraph) -> str:
    return "".join(f"{i} {j}\n" for i, j in graph.edges())


def write_edge_list(graph: CayleyGraph, path) -> None:
    Path(path).write_text(format_edge_list(graph), encoding="utf-8")
