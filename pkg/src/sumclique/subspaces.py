"""Subspaces of F_2^n: counting, enumeration, intersection statistics, and the subspace-clique count."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import numpy as np

from .groups import BudgetExceeded, GroupSet, GroupSpec, PreconditionError

DEFAULT_SUBSPACE_BUDGET = 10**8
# Subspaces are tested against A in blocks of this many.
_BLOCK = 1 << 15


def count_subspaces(n: int, k: int) -> int:
    """Number of ``k``-dimensional subspaces of F_2^n (Gaussian binomial)."""
    if not 0 <= k <= n:
        raise PreconditionError("need 0 <= k <= n")
    num = den = 1
    for i in range(k):
        num *= (1 << n) - (1 << i)
        den *= (1 << k) - (1 << i)
    M, rem = divmod(num, den)
    if rem:
        raise AssertionError("Gaussian binomial not integral")
    if M.bit_length() - 1 < n * k - k * k:
        raise AssertionError("M below 2^(nk - k^2)")
    return M


@dataclass(frozen=True)
class SubspaceBasis:
    """Reduced echelon basis; row ``i`` has its lowest set bit at ``pivots[i]`` and no other pivot bits."""

    n: int
    rows: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((r & -r).bit_length() - 1 for r in self.rows)

    def elements(self) -> list[int]:
        out = [0]
        for r in self.rows:
            out += [e ^ r for e in out]
        return out

    def span_bits(self) -> int:
        """The subspace as a bitset over the 2^n group elements."""
        bits = 0
        for e in self.elements():
            bits |= 1 << e
        return bits


def enumerate_subspaces(n: int, k: int, budget: int = DEFAULT_SUBSPACE_BUDGET) -> Iterator[SubspaceBasis]:
    """Every ``k``-dimensional subspace exactly once, by pivot profile then free entries."""
    M = count_subspaces(n, k)
    if M > budget:
        raise BudgetExceeded(f"{M} subspaces exceed budget {budget}")
    for pivots in combinations(range(n), k):
        pset = set(pivots)
        free = [[j for j in range(p + 1, n) if j not in pset] for p in pivots]
        n_free = sum(len(f) for f in free)
        for code in range(1 << n_free):
            rows = []
            shift = 0
            for p, cols in zip(pivots, free):
                r = 1 << p
                for t, j in enumerate(cols):
                    if (code >> (shift + t)) & 1:
                        r |= 1 << j
                shift += len(cols)
                rows.append(r)
            yield SubspaceBasis(n, tuple(rows))


def intersection_pair_count(n: int, k: int, l: int, mode: str = "formula") -> int:
    """Ordered pairs ``(H, H')`` of ``k``-dim subspaces with ``dim(H cap H') = l``."""
    if not 0 <= l <= k <= n:
        raise PreconditionError("need 0 <= l <= k <= n")
    if mode == "formula":
        num = 1
        for i in range(2 * k - l):
            num *= (1 << n) - (1 << i)
        den = 1
        for i in range(l, k):
            den *= ((1 << k) - (1 << i)) ** 2
        for i in range(l):
            den *= (1 << l) - (1 << i)
        value, rem = divmod(num, den)
        if rem:
            raise AssertionError("pair count not integral")
        if value > 1 << (n * (2 * k - l)):
            raise AssertionError("pair count exceeds 2^(n(2k - l))")
        return value
    if mode == "brute_force":
        spans = [b.span_bits() for b in enumerate_subspaces(n, k)]
        target = 1 << l
        return sum(1 for a in spans for b in spans if (a & b).bit_count() == target)
    raise PreconditionError(f"unknown mode {mode!r}")


def _subspace_table(n: int, k: int, budget: int) -> Iterator[np.ndarray]:
    """Blocks of rows, each row the nonzero elements of one ``k``-dim subspace."""
    block = []
    for b in enumerate_subspaces(n, k, budget):
        block.append(b.elements()[1:])
        if len(block) >= _BLOCK:
            yield np.array(block, dtype=np.int64).reshape(len(block), (1 << k) - 1)
            block = []
    if block:
        yield np.array(block, dtype=np.int64).reshape(len(block), (1 << k) - 1)


class SubspaceTable:
    """All ``k``-dim subspaces of F_2^n held in memory, for repeated counting against many sets."""

    def __init__(self, n: int, k: int, budget: int = DEFAULT_SUBSPACE_BUDGET):
        self.n, self.k = n, k
        blocks = list(_subspace_table(n, k, budget))
        self.table = np.concatenate(blocks) if blocks else np.zeros((0, (1 << k) - 1), dtype=np.int64)

    def count(self, A: GroupSet) -> int:
        if A.group != GroupSpec.boolean(self.n):
            raise PreconditionError("set lives in a different group")
        if self.k == 0:
            return len(self.table)
        return int(A.to_mask()[self.table].all(axis=1).sum())


def subspace_clique_statistic(A: GroupSet, k: int, budget: int = DEFAULT_SUBSPACE_BUDGET) -> int:
    """Number of ``k``-dim subspaces ``H`` with ``H \\ {0}`` inside ``A``.

    Each such ``H`` is a clique of ``G_A`` on ``2^k`` vertices, because its
    restricted sumset is ``H \\ {0}``.
    """
    g = A.group
    if not g.is_boolean:
        raise PreconditionError("subspace statistic needs a boolean group")
    if not 0 <= k <= g.dim:
        raise PreconditionError("need 0 <= k <= n")
    mask = A.to_mask()
    total = 0
    for block in _subspace_table(g.dim, k, budget):
        total += int(mask[block].all(axis=1).sum()) if k else len(block)
    return total


def count_affine_coset_cliques(A: GroupSet, k: int, budget: int = 10**6) -> int:
    """Number of cosets ``x + H`` (``H`` a ``k``-dim subspace) that are cliques of ``G_A``.

    Checked directly on the pairwise sums of each coset, so it is only for
    small ``n``.  Every coset of ``H`` has restricted sumset ``H \\ {0}``, so
    the result is ``2^(n - k)`` times :func:`subspace_clique_statistic`.
    """
    g = A.group
    if not g.is_boolean:
        raise PreconditionError("coset cliques need a boolean group")
    n = g.dim
    work = count_subspaces(n, k) * (1 << n)
    if work > budget:
        raise BudgetExceeded(f"{work} coset elements exceed budget {budget}")
    rows = A.bits
    total = 0
    for H in enumerate_subspaces(n, k):
        elems = H.elements()
        done = 0
        for x in range(1 << n):
            if (done >> x) & 1:
                continue
            coset = [x ^ h for h in elems]
            for c in coset:
                done |= 1 << c
            if all((rows >> (a ^ b)) & 1 for i, a in enumerate(coset) for b in coset[i + 1:]):
                total += 1
    return total


def lower_bound_dim(n: int) -> int:
    """``floor(log2 n + log2 log2 n - 1)``, the subspace dimension used for the lower bound on omega."""
    if n < 2:
        raise PreconditionError("need n >= 2")
    return math.floor(math.log2(n) + math.log2(math.log2(n)) - 1)


def _pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


@dataclass(frozen=True)
class MomentReport:
    n: int
    k: int
    M: int
    E_X_exact: Fraction
    E_X_lower_bound: Fraction
    var_ub: Fraction
    cheb_ub: Fraction
    lower_bound_k: int | None

    @property
    def cheb_below_one(self) -> bool:
        return self.cheb_ub < 1

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "M": self.M,
            "E_X_exact": {"num": self.E_X_exact.numerator, "den": self.E_X_exact.denominator},
            "lb_log2": self.n * self.k - self.k ** 2 - 2 ** self.k,
            "var_ub_log2": math.log2(8 * self.k) + (2 * self.k - 1) * self.n - 2 ** (self.k + 1),
            "cheb_ub_log2": math.log2(8 * self.k) + 2 * self.k ** 2 - self.n,
            "cheb_below_one": self.cheb_below_one,
            "lower_bound_k": self.lower_bound_k,
        }


def moment_report(n: int, k: int) -> MomentReport:
    """Exact mean of the subspace-clique count for a uniformly random ``A``, with the stated bounds."""
    if not 1 <= k <= n:
        raise PreconditionError("need 1 <= k <= n")
    M = count_subspaces(n, k)
    e_exact = Fraction(M, 1 << ((1 << k) - 1))
    lb = _pow2(n * k - k * k - (1 << k))
    var_ub = 8 * k * _pow2((2 * k - 1) * n - (1 << (k + 1)))
    cheb_ub = 8 * k * _pow2(2 * k * k - n)
    if var_ub / lb**2 != cheb_ub:
        raise AssertionError("Chebyshev bound inconsistent with variance and mean bounds")
    if n >= 2 * k and e_exact < lb:
        raise AssertionError("exact mean below the stated lower bound")
    return MomentReport(n, k, M, e_exact, lb, var_ub, cheb_ub, lower_bound_dim(n) if n >= 2 else None)


def dimension_inequality_violations(n_max: int = 64) -> list[tuple[int, int]]:
    """Pairs ``(n, l)`` with ``1 <= l <= k(n)`` and ``2^l - n l > 2 - n``."""
    bad = []
    for n in range(2, n_max + 1):
        for l in range(1, lower_bound_dim(n) + 1):
            if (1 << l) - n * l > 2 - n:
                bad.append((n, l))
    return bad
