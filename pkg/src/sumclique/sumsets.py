"""Sumset algebra: restricted sumsets, iterated signed sums, doubling and energy."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import GroupSet, GroupSpec, PreconditionError

# Pair sums are flushed to a histogram once this many have accumulated.
_FLUSH = 1 << 22


@dataclass(frozen=True)
class DoublingStats:
    k: int
    m: int
    sum_size: int
    ratio: Fraction | None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "sum_size": self.sum_size,
            "ratio": None if self.ratio is None else str(self.ratio),
        }


def _iter_pair_sums(g: GroupSpec, elems: np.ndarray):
    """Yield arrays of ``x_i + x_j`` over unordered pairs ``i < j``, in chunks."""
    buf, size = [], 0
    for i in range(len(elems) - 1):
        row = g.add_arrays(elems[i + 1:], elems[i])
        buf.append(row)
        size += len(row)
        if size >= _FLUSH:
            yield np.concatenate(buf)
            buf, size = [], 0
    if buf:
        yield np.concatenate(buf)


def restricted_sumset(g: GroupSpec, X: GroupSet) -> GroupSet:
    """The set of sums ``i + j`` with ``i != j`` both in ``X``."""
    elems = X.elements()
    if len(elems) <= 48:
        bits = 0
        for a, x in enumerate(elems):
            for y in elems[a + 1:]:
                bits |= 1 << g.add(x, y)
        return GroupSet(g, bits)
    mark = np.zeros(g.order, dtype=bool)
    for chunk in _iter_pair_sums(g, np.asarray(elems, dtype=np.int64)):
        mark[chunk] = True
    return GroupSet.from_mask(g, mark)


def pair_sum_counts(g: GroupSpec, X: GroupSet) -> np.ndarray:
    """``s(x)``: number of ordered pairs of distinct elements of ``X`` summing to ``x``."""
    counts = np.zeros(g.order, dtype=np.int64)
    for chunk in _iter_pair_sums(g, X.to_array()):
        counts += np.bincount(chunk, minlength=g.order)
    return 2 * counts


def sumset(g: GroupSpec, X: GroupSet, Y: GroupSet) -> GroupSet:
    """The full sumset ``X + Y``."""
    if len(X) == 0 or len(Y) == 0:
        return GroupSet.empty(g)
    if len(Y) > len(X):
        X, Y = Y, X
    N = g.order
    if g.is_boolean:
        xm = X.to_mask()
        idx = np.arange(N)
        out = np.zeros(N, dtype=bool)
        for y in Y.elements():
            out |= xm[idx ^ y]
        return GroupSet.from_mask(g, out)
    full = (1 << N) - 1
    acc = 0
    xb = X.bits
    for y in Y.elements():
        acc |= ((xb << y) | (xb >> (N - y))) & full
    return GroupSet(g, acc)


def negation(g: GroupSpec, X: GroupSet) -> GroupSet:
    if g.is_boolean:
        return X
    return GroupSet.from_elements(g, g.negate_array(X.to_array()).tolist())


def signed_iterated_sum(g: GroupSpec, X: GroupSet, k: int, l: int) -> GroupSet:
    """``kX - lX``: sums of ``k`` elements of ``X`` minus ``l`` elements of ``X``."""
    if k < 0 or l < 0:
        raise PreconditionError("k and l must be nonnegative")
    if k + l == 0:
        raise PreconditionError("k + l must be at least 1")
    terms = [X] * k + [negation(g, X)] * l
    acc = terms[0]
    for term in terms[1:]:
        acc = sumset(g, acc, term)
    return acc


def summing_quadruple_count(g: GroupSpec, B: GroupSet) -> int:
    """Number of ``(b1,b2,b3,b4)`` in ``B^4`` with ``b1+b2 = b3+b4``, ``b1 != b2``, ``b3 != b4``.

    Computed as the sum of squares of the pair-sum histogram.
    """
    if len(B) < 2:
        return 0
    s = pair_sum_counts(g, B)
    return int(np.dot(s, s))


def doubling_stats(g: GroupSpec, X: GroupSet) -> DoublingStats:
    k = len(X)
    m = len(restricted_sumset(g, X))
    full = len(sumset(g, X, X))
    return DoublingStats(k=k, m=m, sum_size=full, ratio=Fraction(m, k) if k else None)
