"""Freiman homomorphisms: relation spans, isomorphism tests, dimension, rectification.

An ordered set ``(a_1, ..., a_k)`` satisfies the s-relation
``e_{i1}+...+e_{is} - e_{j1}-...-e_{js}`` when ``a_{i1}+...+a_{is}`` equals
``a_{j1}+...+a_{js}``.  Two ordered sets satisfying the same s-relations
are s-isomorphic through ``a_i -> b_i``, and the satisfied relations are
recovered from their span, so the span (in reduced echelon form) is a
complete isomorphism-class key for a fixed ordering.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Callable, Sequence

from .groups import GroupSet, GroupSpec, PreconditionError
from .linalg import make_echelon, nullspace, solve_combination
from .sumsets import restricted_sumset, signed_iterated_sum, sumset

SUPPORTED_ORDERS = (2, 3, 6)
ORACLE_MAX_K = 8
PERMUTATION_MAX_K = 8
RECTIFY_MAX_N = 10**4


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % f for f in range(2, math.isqrt(n) + 1))


class SpaceKind(enum.Enum):
    INTEGERS = "Z"
    BOOLEAN = "F2^n"
    CYCLIC = "Z_N"


@dataclass(frozen=True)
class AmbientSpace:
    """Where the elements live: Z (field Q), F_2^n, or Z_N (field F_N when N is prime)."""

    kind: SpaceKind
    param: int = 0

    @classmethod
    def integers(cls) -> AmbientSpace:
        return cls(SpaceKind.INTEGERS)

    @classmethod
    def boolean(cls, n: int) -> AmbientSpace:
        return cls(SpaceKind.BOOLEAN, n)

    @classmethod
    def prime_cyclic(cls, N: int) -> AmbientSpace:
        if not _is_prime(N):
            raise PreconditionError(f"{N} is not prime")
        return cls(SpaceKind.CYCLIC, N)

    @classmethod
    def cyclic(cls, N: int) -> AmbientSpace:
        """Z_N for any N; only usable with the definition oracle unless N is prime."""
        return cls(SpaceKind.CYCLIC, N)

    @classmethod
    def of_group(cls, g: GroupSpec) -> AmbientSpace:
        if g.is_boolean:
            return cls.boolean(g.dim)
        return cls.cyclic(g.order)

    @property
    def characteristic(self) -> int:
        """0 for Q, p for F_p; raises if the space is not a vector space over a prime field."""
        if self.kind is SpaceKind.INTEGERS:
            return 0
        if self.kind is SpaceKind.BOOLEAN:
            return 2
        if not _is_prime(self.param):
            raise PreconditionError(f"Z_{self.param} is not a vector space over a field")
        return self.param

    def add(self, x, y):
        if self.kind is SpaceKind.INTEGERS:
            return x + y
        if self.kind is SpaceKind.BOOLEAN:
            return x ^ y
        return (x + y) % self.param

    def zero(self):
        return 0

    def __str__(self):
        if self.kind is SpaceKind.INTEGERS:
            return "Z"
        if self.kind is SpaceKind.BOOLEAN:
            return f"F_2^{self.param}"
        return f"Z_{self.param}"


@dataclass(frozen=True)
class OrderedSet:
    space: AmbientSpace
    elements: tuple

    def __post_init__(self):
        if len(self.elements) < 1:
            raise PreconditionError("ordered set must be nonempty")
        if len(set(self.elements)) != len(self.elements):
            raise PreconditionError("ordered set has duplicate elements")

    @classmethod
    def integers(cls, elements: Sequence[int]) -> OrderedSet:
        return cls(AmbientSpace.integers(), tuple(int(x) for x in elements))

    @classmethod
    def from_groupset(cls, X: GroupSet) -> OrderedSet:
        return cls(AmbientSpace.of_group(X.group), tuple(X.elements()))

    def __len__(self):
        return len(self.elements)

    def reorder(self, perm: Sequence[int]) -> OrderedSet:
        return OrderedSet(self.space, tuple(self.elements[i] for i in perm))


def _fold_sum(space_add: Callable, elems: Sequence, multiset: Sequence[int]):
    return reduce(space_add, (elems[i] for i in multiset))


def sum_classes(sigma: OrderedSet, s: int) -> dict:
    """Map each s-fold sum value to the index multisets realising it."""
    classes: dict = defaultdict(list)
    elems, add = sigma.elements, sigma.space.add
    for ms in combinations_with_replacement(range(len(elems)), s):
        classes[_fold_sum(add, elems, ms)].append(ms)
    return classes


def _relation_vector(k: int, plus: Sequence[int], minus: Sequence[int]) -> list[int]:
    v = [0] * k
    for i in plus:
        v[i] += 1
    for j in minus:
        v[j] -= 1
    return v


@dataclass(frozen=True)
class RelationBasis:
    s: int
    k: int
    characteristic: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)


def relation_basis(sigma: OrderedSet, s: int = 2) -> RelationBasis:
    """Canonical echelon basis of the span of the s-relations satisfied by ``sigma``."""
    if s not in SUPPORTED_ORDERS:
        raise PreconditionError(f"relation order {s} unsupported; use one of {SUPPORTED_ORDERS}")
    k = len(sigma)
    if k < 2:
        raise PreconditionError("need at least two elements")
    char = sigma.space.characteristic
    ech = make_echelon(k, char)
    saturated = k - 1
    for members in sum_classes(sigma, s).values():
        first = members[0]
        for other in members[1:]:
            ech.add(_relation_vector(k, first, other))
            if ech.rank >= saturated:
                break
        if ech.rank >= saturated:
            break
    return RelationBasis(s, k, char, ech.canonical())


def canonical_class_key(rb: RelationBasis) -> tuple:
    """Hashable token; equal exactly when the relation spans are equal."""
    return (rb.s, rb.k, rb.characteristic, rb.basis)


def key_hex(key) -> str:
    return hashlib.sha256(repr(key).encode()).hexdigest()[:16]


def permute_basis(rb: RelationBasis, perm: Sequence[int]) -> RelationBasis:
    """Basis for the reordered sequence ``(a_{perm[0]}, a_{perm[1]}, ...)``."""
    ech = make_echelon(rb.k, rb.characteristic)
    for row in rb.basis:
        ech.add([row[i] for i in perm])
    return RelationBasis(rb.s, rb.k, rb.characteristic, ech.canonical())


def set_class_key(A: OrderedSet, s: int = 2) -> tuple:
    """Order-independent class key: the least relation-span key over all orderings."""
    k = len(A)
    if k > PERMUTATION_MAX_K:
        raise PreconditionError(f"ordering search capped at k <= {PERMUTATION_MAX_K}")
    if k == 1:
        return (s, 1, A.space.characteristic, ())
    rb = relation_basis(A, s)
    return min(canonical_class_key(permute_basis(rb, p)) for p in permutations(range(k)))


# -- isomorphism ------------------------------------------------------------


@dataclass(frozen=True)
class IsoResult:
    """``isomorphic`` is ``None`` when the search was inconclusive."""

    isomorphic: bool | None
    bijection: tuple | None
    method: str


def definition_oracle(
    elems_a: Sequence, add_a: Callable, elems_b: Sequence, add_b: Callable, s: int = 2
) -> tuple | None:
    """Search for a bijection ``a_i -> b_{pi(i)}`` that is a Freiman s-isomorphism.

    Works in any abelian groups, given their addition.  Returns ``pi`` or
    ``None``.  Backtracks over partial bijections, keeping the induced map
    between s-fold sum values well defined and injective.
    """
    k = len(elems_a)
    if len(elems_b) != k:
        return None
    if k > ORACLE_MAX_K:
        raise PreconditionError(f"definition oracle capped at k <= {ORACLE_MAX_K}")
    if k == 0:
        return ()
    by_top: list[list[tuple[int, ...]]] = [[] for _ in range(k)]
    for ms in combinations_with_replacement(range(k), s):
        by_top[ms[-1]].append(ms)
    sum_a = {ms: _fold_sum(add_a, elems_a, ms) for bucket in by_top for ms in bucket}

    pi = [-1] * k
    used = [False] * k
    fwd: dict = {}
    bwd: dict = {}

    def extend(t: int) -> bool:
        if t == k:
            return True
        for cand in range(k):
            if used[cand]:
                continue
            pi[t] = cand
            added = []
            ok = True
            for ms in by_top[t]:
                x = sum_a[ms]
                y = _fold_sum(add_b, elems_b, [pi[i] for i in ms])
                fx, by = fwd.get(x), bwd.get(y)
                if fx is None and by is None:
                    fwd[x] = y
                    bwd[y] = x
                    added.append((x, y))
                elif fx != y or by != x:
                    ok = False
                    break
            if ok:
                used[cand] = True
                if extend(t + 1):
                    return True
                used[cand] = False
            for x, y in added:
                del fwd[x]
                del bwd[y]
        pi[t] = -1
        return False

    return tuple(pi) if extend(0) else None


def _element_profile(sigma: OrderedSet) -> list[tuple]:
    """Per-element invariant: sorted multiplicities of the pair sums it takes part in."""
    elems, add = sigma.elements, sigma.space.add
    mult: dict = defaultdict(int)
    for i, j in combinations(range(len(elems)), 2):
        mult[add(elems[i], elems[j])] += 1
    return [
        tuple(sorted(mult[add(elems[i], elems[j])] for j in range(len(elems)) if j != i))
        for i in range(len(elems))
    ]


def are_s_isomorphic(A: OrderedSet, B: OrderedSet, s: int = 2, method: str = "relation_span") -> IsoResult:
    """Decide whether ``A`` and ``B`` are Freiman s-isomorphic.

    ``relation_span`` compares relation-span keys across orderings of ``B``
    (all of them when k <= 8; above that one invariant-sorted ordering is
    tried and a mismatch is reported as inconclusive).  ``definition_oracle``
    checks the definition directly and works in any group.
    """
    k = len(A)
    if len(B) != k:
        return IsoResult(False, None, method)
    if method == "definition_oracle":
        pi = definition_oracle(A.elements, A.space.add, B.elements, B.space.add, s)
        return IsoResult(pi is not None, _as_bijection(A, B, pi), method)
    if method != "relation_span":
        raise PreconditionError(f"unknown method {method!r}")
    if A.space.characteristic != B.space.characteristic:
        # Spans over different fields are not comparable; fall back to the definition.
        pi = definition_oracle(A.elements, A.space.add, B.elements, B.space.add, s)
        return IsoResult(pi is not None, _as_bijection(A, B, pi), "definition_oracle")
    if k == 1:
        return IsoResult(True, ((A.elements[0], B.elements[0]),), method)
    rb_a = relation_basis(A, s)
    rb_b = relation_basis(B, s)
    if rb_a.rank != rb_b.rank:
        return IsoResult(False, None, method)
    key_a = canonical_class_key(rb_a)
    if k <= PERMUTATION_MAX_K:
        for perm in permutations(range(k)):
            if canonical_class_key(permute_basis(rb_b, perm)) == key_a:
                return IsoResult(True, _as_bijection(A, B, perm), method)
        return IsoResult(False, None, method)
    pa = _element_profile(A)
    pb = _element_profile(B)
    if sorted(pa) != sorted(pb):
        return IsoResult(False, None, method)
    order_a = sorted(range(k), key=lambda i: (pa[i], i))
    order_b = sorted(range(k), key=lambda i: (pb[i], i))
    ka = canonical_class_key(relation_basis(A.reorder(order_a), s))
    kb = canonical_class_key(relation_basis(B.reorder(order_b), s))
    if ka == kb:
        return IsoResult(True, tuple(zip((A.elements[i] for i in order_a), (B.elements[i] for i in order_b))), method)
    return IsoResult(None, None, method)


def _as_bijection(A: OrderedSet, B: OrderedSet, pi) -> tuple | None:
    if pi is None:
        return None
    return tuple((A.elements[i], B.elements[pi[i]]) for i in range(len(A)))


# -- homomorphism spaces ----------------------------------------------------


@dataclass(frozen=True)
class HomSpace:
    set: OrderedSet
    dim: int
    basis: tuple[tuple, ...]

    @property
    def freiman_dim(self) -> int:
        return self.dim - 1


def hom_space(A: OrderedSet) -> HomSpace:
    """All maps ``A -> F`` respecting every 2-relation, as value vectors.

    The basis vectors are primitive integer vectors over Q and residue
    vectors over F_p.
    """
    k = len(A)
    char = A.space.characteristic
    rows = relation_basis(A, 2).basis if k >= 2 else ()
    basis = nullspace(rows, k, char)
    return HomSpace(A, len(basis), tuple(basis))


def freiman_dimension(A: OrderedSet) -> int:
    return hom_space(A).freiman_dim


@dataclass(frozen=True)
class SpanningSubset:
    indices: tuple[int, ...]
    coefficients: tuple[tuple, ...]


def spanning_subset(A: OrderedSet, hs: HomSpace | None = None) -> SpanningSubset:
    """``r+1`` positions whose values determine every homomorphism.

    Row ``a`` of ``coefficients`` expresses ``phi(a)`` as a combination of
    the values at the chosen positions; rows sum to 1.
    """
    hs = hs or hom_space(A)
    k, d = len(A), hs.dim
    char = A.space.characteristic
    values = [tuple(h[a] for h in hs.basis) for a in range(k)]
    ech = make_echelon(d, char)
    indices = []
    for a in range(k):
        if ech.add(values[a]):
            indices.append(a)
        if len(indices) == d:
            break
    chosen = [values[i] for i in indices]
    coeffs = []
    for a in range(k):
        lam = solve_combination(chosen, values[a], char)
        if lam is None:
            raise AssertionError("spanning positions do not span the homomorphism values")
        coeffs.append(lam)
    return SpanningSubset(tuple(indices), tuple(coeffs))


def count_homs_brute(A: OrderedSet, target_dim: int = 1) -> int:
    """Count maps ``A -> F_2^d`` preserving all 2-relations, by exhaustion."""
    if A.space.characteristic != 2:
        raise PreconditionError("brute-force homomorphism count is implemented over F_2")
    k = len(A)
    if k * target_dim > 24:
        raise PreconditionError("too many maps to enumerate")
    rels = []
    for members in sum_classes(A, 2).values():
        for other in members[1:]:
            rels.append(members[0] + other)
    count = 0
    for phi in product(range(1 << target_dim), repeat=k):
        if all(phi[i] ^ phi[j] ^ phi[p] ^ phi[q] == 0 for i, j, p, q in rels):
            count += 1
    return count


# -- Z_N specifics ----------------------------------------------------------


def unfold(A: GroupSet) -> OrderedSet:
    """Lift ``A`` in Z_N to ``{1, ..., N}`` by least positive residues (0 goes to N)."""
    g = A.group
    if g.is_boolean:
        raise PreconditionError("unfolding is defined for Z_N")
    N = g.order
    lifted = OrderedSet.integers([x if x >= 1 else N for x in A.elements()])
    m = len(restricted_sumset(g, A))
    lifted_m = len({x + y for x, y in combinations(lifted.elements, 2)})
    if lifted_m > 2 * m:
        raise AssertionError("unfolded restricted sumset exceeds 2m")
    return lifted


def rectify(A: GroupSet, N: int | None = None) -> tuple[int, int] | None:
    """Find ``(lam, mu)`` with ``lam*A + mu`` inside ``{0, ..., N//2}``, or ``None``.

    Scans ``lam`` upwards; for each, tries ``mu = -lam*min(A)`` first and
    otherwise takes the start of the widest circular gap, which is the only
    translate that can work.
    """
    g = A.group
    N = g.order if N is None else N
    if g.is_boolean or g.order != N:
        raise PreconditionError("rectify needs a subset of Z_N")
    if not _is_prime(N):
        raise PreconditionError(f"{N} is not prime")
    if N > RECTIFY_MAX_N:
        raise PreconditionError(f"N above rectification cap {RECTIFY_MAX_N}")
    elems = A.elements()
    if not elems:
        return (1, 0)
    half = N // 2
    for lam in range(1, N):
        image = sorted(lam * x % N for x in elems)
        mu = (-lam * min(elems)) % N
        if all((y + mu) % N <= half for y in image):
            return _checked_rectification(A, lam, mu)
        # widest gap between cyclically consecutive points
        gaps = [(image[(i + 1) % len(image)] - image[i]) % N for i in range(len(image))]
        if len(image) == 1:
            gaps = [N]
        i = max(range(len(gaps)), key=lambda j: (gaps[j], -j))
        start = image[(i + 1) % len(image)]
        if N - gaps[i] <= half:
            return _checked_rectification(A, lam, (-start) % N)
    return None


def _checked_rectification(A: GroupSet, lam: int, mu: int) -> tuple[int, int]:
    N = A.group.order
    image = [(lam * x + mu) % N for x in A.elements()]
    assert all(0 <= y <= N // 2 for y in image)
    if len(image) <= ORACLE_MAX_K:
        pi = definition_oracle(
            A.elements(), AmbientSpace.cyclic(N).add, image, AmbientSpace.integers().add, 2
        )
        if pi is None:
            raise AssertionError("rectified image is not Freiman isomorphic to A")
    return (lam, mu)


# -- inequalities -------------------------------------------------------------


@dataclass(frozen=True)
class FreimanInequalityReport:
    k: int
    r: int
    m: int
    lower_bound: Fraction
    holds: bool


def check_freiman_inequality(S: OrderedSet | Sequence[int]) -> FreimanInequalityReport:
    """Compare ``|S + S|`` (restricted) against ``r (k - (r+1)/2)`` for integer sets."""
    if not isinstance(S, OrderedSet):
        S = OrderedSet.integers(S)
    if S.space.kind is not SpaceKind.INTEGERS:
        raise PreconditionError("Freiman's inequality is checked for sets of integers")
    k = len(S)
    if k < 2:
        raise PreconditionError("need |S| >= 2")
    r = freiman_dimension(S)
    m = len({x + y for x, y in combinations(S.elements, 2)})
    lb = r * (k - Fraction(r + 1, 2))
    return FreimanInequalityReport(k, r, m, lb, m >= lb)


@dataclass(frozen=True)
class Mod2DimensionReport:
    r: int
    k: int
    m: int
    bound_log2: float
    bound_ln: float
    holds_log2: bool
    holds_ln: bool

    @property
    def holds(self) -> bool:
        return self.holds_log2


def check_mod2_dimension_bound(A: GroupSet) -> Mod2DimensionReport:
    """Compare ``r + 1`` with ``4 m log k / k`` for both readings of the logarithm."""
    if not A.group.is_boolean:
        raise PreconditionError("mod-2 dimension bound is for subsets of Z_2^n")
    k = len(A)
    if k < 3:
        raise PreconditionError("need k >= 3")
    r = freiman_dimension(OrderedSet.from_groupset(A))
    m = len(restricted_sumset(A.group, A))
    b2 = 4 * m * math.log2(k) / k
    be = 4 * m * math.log(k) / k
    return Mod2DimensionReport(r, k, m, b2, be, r + 1 <= b2, r + 1 <= be)


def plunnecke_ruzsa_violations(g: GroupSpec, A: GroupSet, max_total: int = 4) -> list[tuple[int, int]]:
    """Pairs ``(k, l)`` with ``1 <= k + l <= max_total`` where ``|kA - lA| > C^(k+l) |A|``, ``C = |A+A|/|A|``."""
    n = len(A)
    if n == 0:
        raise PreconditionError("A must be nonempty")
    doubled = len(sumset(g, A, A))
    bad = []
    for total in range(1, max_total + 1):
        for k in range(total + 1):
            size = len(signed_iterated_sum(g, A, k, total - k))
            # |kA - lA| <= (|A+A|/|A|)^(k+l) |A|, cleared of denominators
            if size * n ** total > doubled**total * n:
                bad.append((k, total - k))
    return bad


# -- classification -------------------------------------------------------------


def _cheap_invariants(A: OrderedSet, s: int) -> tuple:
    classes = sum_classes(A, s)
    return (len(A), tuple(sorted(len(v) for v in classes.values())), tuple(sorted(_element_profile(A))) if s == 2 else ())


def classify(sets: Sequence[OrderedSet], s: int = 2, method: str = "relation_span") -> list[dict]:
    """Partition ``sets`` into s-isomorphism classes.

    ``relation_span`` buckets by order-independent span keys;
    ``definition_oracle`` compares every set against class representatives
    with the definition (after bucketing by cheap isomorphism invariants).
    Returns ``[{key, class_key_hex, representative, count, members}]`` in
    first-seen order.
    """
    classes: list[dict] = []
    if method == "relation_span":
        index: dict = {}
        for A in sets:
            key = set_class_key(A, s)
            if key not in index:
                index[key] = len(classes)
                classes.append({"key": key, "representative": A, "members": []})
            classes[index[key]]["members"].append(A)
    elif method == "definition_oracle":
        buckets: dict = defaultdict(list)
        for A in sets:
            inv = _cheap_invariants(A, s)
            for cid in buckets[inv]:
                rep = classes[cid]["representative"]
                if definition_oracle(A.elements, A.space.add, rep.elements, rep.space.add, s) is not None:
                    classes[cid]["members"].append(A)
                    break
            else:
                buckets[inv].append(len(classes))
                classes.append({"key": None, "representative": A, "members": [A]})
    else:
        raise PreconditionError(f"unknown method {method!r}")
    for c in classes:
        c["count"] = len(c["members"])
        c["class_key_hex"] = key_hex(c["key"]) if c["key"] is not None else None
    return classes


def classification_report(classes: list[dict]) -> str:
    rows = [
        {
            "class_key_hex": c["class_key_hex"],
            "representative": list(c["representative"].elements),
            "count": c["count"],
        }
        for c in classes
    ]
    return json.dumps(rows, indent=2)


def extension_class_count(B: Sequence[int], t: int, universe: Sequence[int], s: int = 2) -> int:
    """Number of s-isomorphism classes among the t-extensions of ``B`` inside ``universe``."""
    base = set(B)
    pool = [x for x in universe if x not in base]
    sets = [OrderedSet.integers(sorted(base | set(E))) for E in combinations(pool, t)]
    return len(classify(sets, s, method="definition_oracle"))
