"""Exact census of k-sets by restricted-sumset size, expected clique counts, and counting bounds."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .groups import BudgetExceeded, GroupKind, GroupSet, GroupSpec, PreconditionError
from .sumsets import restricted_sumset

DEFAULT_SUBSET_BUDGET = 10**9
# Symmetry reduction keeps every visited subset in memory.
SYMMETRY_SUBSET_CAP = 5 * 10**6

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class CensusTable:
    group: GroupSpec
    k: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_json(self) -> dict:
        e = expected_cliques(self).expectation
        return {
            "group": self.group.to_json(),
            "k": self.k,
            "counts": {str(m): c for m, c in sorted(self.counts.items())},
            "expectation_num": e.numerator,
            "expectation_den": e.denominator,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "count"])
        for m, c in sorted(self.counts.items()):
            w.writerow([m, c])
        return buf.getvalue()


def _add_table(g: GroupSpec) -> np.ndarray:
    idx = np.arange(g.order)
    return g.add_arrays(idx[:, None], idx[None, :])


def _direct_counts(g: GroupSpec, k: int) -> dict[int, int]:
    """Walk k-subsets in lexicographic order, keeping pair-sum multiplicities incrementally."""
    N = g.order
    table = _add_table(g).tolist()
    mult = [0] * N
    counts: dict[int, int] = {}
    chosen: list[int] = []
    m = 0

    def push(x: int) -> None:
        nonlocal m
        row = table[x]
        for y in chosen:
            z = row[y]
            if mult[z] == 0:
                m += 1
            mult[z] += 1
        chosen.append(x)

    def pop() -> None:
        nonlocal m
        x = chosen.pop()
        row = table[x]
        for y in chosen:
            z = row[y]
            mult[z] -= 1
            if mult[z] == 0:
                m -= 1

    def walk(start: int) -> None:
        if len(chosen) == k:
            counts[m] = counts.get(m, 0) + 1
            return
        need = k - len(chosen)
        for x in range(start, N - need + 1):
            push(x)
            walk(x + 1)
            pop()

    walk(0)
    return counts


def _affine_generators(g: GroupSpec) -> list[np.ndarray]:
    """Permutations of the group generating its affine group."""
    idx = np.arange(g.order)
    gens = []
    if g.is_boolean:
        n = g.dim
        for i in range(n):
            gens.append(idx ^ (1 << i))
        # transvections x -> x + x_i e_j generate GL(n, 2)
        for i in range(n):
            for j in range(n):
                if i != j:
                    gens.append(idx ^ (((idx >> i) & 1) << j))
    else:
        N = g.order
        gens.append((idx + 1) % N)
        for a in range(2, N):
            if math.gcd(a, N) == 1:
                gens.append((a * idx) % N)
    return gens


def _orbit_counts(g: GroupSpec, k: int) -> dict[int, int]:
    """Count via affine orbits: one sumset computation per orbit, weighted by orbit size."""
    gens = [p.tolist() for p in _affine_generators(g)]
    seen: set[int] = set()
    counts: dict[int, int] = {}
    for combo in combinations(range(g.order), k):
        bits = 0
        for x in combo:
            bits |= 1 << x
        if bits in seen:
            continue
        orbit = {bits}
        frontier = [combo]
        while frontier:
            nxt = []
            for elems in frontier:
                for perm in gens:
                    img = tuple(perm[x] for x in elems)
                    b = 0
                    for x in img:
                        b |= 1 << x
                    if b not in orbit:
                        orbit.add(b)
                        nxt.append(img)
            frontier = nxt
        seen |= orbit
        m = len(restricted_sumset(g, GroupSet(g, bits)))
        counts[m] = counts.get(m, 0) + len(orbit)
    return counts


def census(
    g: GroupSpec, k: int, symmetry_reduction: bool = False, budget: int = DEFAULT_SUBSET_BUDGET
) -> CensusTable:
    """Exact table ``m -> #{X : |X| = k, |X + X| = m}`` (restricted sumset)."""
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    if k > g.order:
        return CensusTable(g, k, {})
    n_subsets = math.comb(g.order, k)
    if n_subsets > budget:
        raise BudgetExceeded(f"C({g.order},{k}) = {n_subsets} subsets exceeds budget {budget}")
    if symmetry_reduction:
        if n_subsets > SYMMETRY_SUBSET_CAP:
            raise BudgetExceeded("too many subsets for orbit bookkeeping")
        counts = _orbit_counts(g, k)
    else:
        counts = _direct_counts(g, k)
    table = CensusTable(g, k, dict(sorted(counts.items())))
    if table.total != n_subsets:
        raise AssertionError("census rows do not sum to C(N, k)")
    return table


@dataclass(frozen=True)
class ExpectationReport:
    k: int
    expectation: Fraction
    markov_bound: Fraction

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "expectation_num": self.expectation.numerator,
            "expectation_den": self.expectation.denominator,
            "expectation": float(self.expectation),
            "markov_bound": str(self.markov_bound),
        }


def expected_cliques(table: CensusTable) -> ExpectationReport:
    """Expected number of k-cliques in G_A for uniformly random A: ``sum_m count_m 2^-m``."""
    e = sum((Fraction(c, 2**m) for m, c in table.counts.items()), Fraction(0))
    return ExpectationReport(table.k, e, min(Fraction(1), e))


# -- counting bounds (log2 domain) ---------------------------------------------


def evaluate_count_bounds(kind: GroupKind | str, N: int, k: int, m: int) -> dict[str, float | None]:
    """Base-2 logarithms of the upper bounds for ``|S_k^m|``.

    Keys ``bb1``/``bb2`` apply to Z_N and ``bb1a``/``bb2a`` to Z_2^n; a bound
    outside its range of validity is reported as ``None``.
    """
    kind = GroupKind(kind)
    if k < 2:
        raise PreconditionError("k must be at least 2")
    if m < k - 1:
        raise PreconditionError("m must be at least k - 1")
    logN = math.log2(N)
    logk = math.log2(k)
    sub = k ** (31 / 32) * LOG2E
    if kind is GroupKind.CYCLIC:
        exp_N = (1 + 4 * m / k) * logN
        bb1 = exp_N + k * math.log2(2 * math.e * m / k) + sub if m <= k ** (31 / 30) / 2 else None
        bb2 = exp_N + 4 * k * logk
        return {"bb1": bb1, "bb2": bb2}
    exp_N = (4 * m * logk / k) * logN
    bb1a = exp_N + k * math.log2(math.e * m / k) + sub if m <= k ** (31 / 30) else None
    bb2a = exp_N + 4 * k * logk
    return {"bb1a": bb1a, "bb2a": bb2a}


def best_bound_log2(kind, N: int, k: int, m: int) -> float:
    vals = [v for v in evaluate_count_bounds(kind, N, k, m).values() if v is not None]
    return min(vals)


def scalar_checks(grid=None) -> dict[str, float]:
    """Maxima over ``C >= 7`` of ``log2(2eC)/C - 1`` and ``log2(eC)/C - 1``."""
    if grid is None:
        grid = np.concatenate([np.linspace(7, 100, 9301), np.geomspace(100, 1e6, 20001)])
    C = np.asarray(grid, dtype=float)
    if C.min() < 7:
        raise PreconditionError("grid must lie in C >= 7")
    return {
        "max_log2_2eC_over_C_minus_1": float(np.max(np.log2(2 * np.e * C) / C - 1)),
        "max_log2_eC_over_C_minus_1": float(np.max(np.log2(np.e * C) / C - 1)),
    }


def _log2_sum(exponents: np.ndarray) -> float:
    if exponents.size == 0:
        return -math.inf
    top = exponents.max()
    return float(top + np.log2(np.sum(np.exp2(exponents - top))))


def bound_k(kind: GroupKind | str, N: int) -> int:
    """Clique size in the upper bound on omega: ``20 log N`` for Z_N, ``11 log N log log N`` for Z_2^n."""
    kind = GroupKind(kind)
    logN = math.log2(N)
    if kind is GroupKind.CYCLIC:
        return math.floor(20 * logN)
    return math.floor(11 * logN * math.log2(logN))


@dataclass(frozen=True)
class TailSumReport:
    kind: str
    N: int
    k_used: int
    split_m: int
    log2_first: float
    log2_second: float
    log2_tail: float
    passes: bool
    log2_tail_full_bounds: float
    passes_full_bounds: bool

    def to_json(self) -> dict:
        return {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v)) for k, v in self.__dict__.items()}


def tail_sum_bound(kind: GroupKind | str, N: int) -> TailSumReport:
    """Bound ``sum_{m >= 7k} |S_k^m| 2^-m`` at the k used for the upper-bound argument.

    The sum is split at ``floor(k^(31/30)/2)``: below it the refined bound
    (bb1 / bb1a), from it up to ``k(k-1)/2`` the crude one (bb2 / bb2a).
    ``log2_tail`` uses the per-term exponents with the vanishing error terms
    set to zero, e.g. ``m((4/k + 1/m) log N + (k/m) log(2em/k) - 1)`` for
    Z_N; ``log2_tail_full_bounds`` plugs in the bounds with every factor kept.
    ``passes`` compares the former with ``N^-2``.
    """
    kind = GroupKind(kind)
    if N < 2**10:
        raise PreconditionError("tail bound evaluated only for N >= 2^10")
    k = bound_k(kind, N)
    logN = math.log2(N)
    logk = math.log2(k)
    split = math.floor(k ** (31 / 30) / 2)
    top = k * (k - 1) // 2
    m1 = np.arange(7 * k, split + 1, dtype=float)
    m2 = np.arange(split, top + 1, dtype=float)
    if kind is GroupKind.CYCLIC:
        e1 = m1 * ((4 / k + 1 / np.maximum(m1, 1)) * logN + (k / np.maximum(m1, 1)) * np.log2(2 * np.e * m1 / k) - 1)
        e2 = m2 * (4 * logN / k - 1)
    else:
        e1 = m1 * (4 * logk * logN / k + (k / np.maximum(m1, 1)) * np.log2(np.e * m1 / k) - 1)
        e2 = m2 * (4 * logk * logN / k - 1)
    l1, l2 = _log2_sum(e1), _log2_sum(e2)
    total = float(np.logaddexp2(l1, l2))

    sub = k ** (31 / 32) * LOG2E
    if kind is GroupKind.CYCLIC:
        full1 = (1 + 4 * m1 / k) * logN + k * np.log2(2 * np.e * m1 / k) + sub - m1
        full2 = (1 + 4 * m2 / k) * logN + 4 * k * logk - m2
    else:
        full1 = (4 * m1 * logk / k) * logN + k * np.log2(np.e * m1 / k) + sub - m1
        full2 = (4 * m2 * logk / k) * logN + 4 * k * logk - m2
    full = float(np.logaddexp2(_log2_sum(full1), _log2_sum(full2)))
    return TailSumReport(
        kind=kind.value, N=N, k_used=k, split_m=split,
        log2_first=l1, log2_second=l2, log2_tail=total, passes=total <= -2 * logN,
        log2_tail_full_bounds=full, passes_full_bounds=full <= -2 * logN,
    )


def census_report_json(table: CensusTable, config: dict | None = None) -> str:
    body = table.to_json()
    if config is not None:
        body = {"config": config, **body}
    return json.dumps(body, indent=2)
