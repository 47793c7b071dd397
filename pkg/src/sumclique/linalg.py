"""Exact row reduction over Q, F_p and F_2.

Rows over Q are integer lists, reduced fraction-free; every row of the
result is primitive with a positive pivot, which (together with zeros in
the other pivot columns) makes the echelon form unique per row space.
Rows over F_p are lists of residues with pivot 1.  Over F_2 rows are
bit-packed Python integers, bit ``j`` holding column ``j``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
    if g == 0:
        return row
    lead = next(x for x in row if x)
    if lead < 0:
        g = -g
    return [x // g for x in row]


class RationalEchelon:
    """Incrementally maintained reduced echelon basis over Q."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec) -> list[int]:
        v = [int(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                a, b = row[p], v[p]
                v = [a * x - b * y for x, y in zip(v, row)]
                v = _primitive(v)
        return v

    def add(self, vec) -> bool:
        """Insert ``vec``; return whether the rank grew."""
        v = self.reduce(vec)
        if not any(v):
            return False
        v = _primitive(v)
        p = next(i for i, x in enumerate(v) if x)
        for idx, row in enumerate(self.rows):
            if row[p]:
                a, b = v[p], row[p]
                self.rows[idx] = _primitive([a * x - b * y for x, y in zip(row, v)])
        at = 0
        while at < len(self.pivots) and self.pivots[at] < p:
            at += 1
        self.rows.insert(at, v)
        self.pivots.insert(at, p)
        return True

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r) for r in self.rows)


class ModPEchelon:
    """Reduced echelon basis over the prime field F_p (pivots normalised to 1)."""

    def __init__(self, width: int, p: int):
        self.width = width
        self.p = p
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec) -> list[int]:
        p = self.p
        v = [int(x) % p for x in vec]
        for row, c in zip(self.rows, self.pivots):
            f = v[c]
            if f:
                v = [(x - f * y) % p for x, y in zip(v, row)]
        return v

    def add(self, vec) -> bool:
        p = self.p
        v = self.reduce(vec)
        if not any(v):
            return False
        c = next(i for i, x in enumerate(v) if x)
        inv = pow(v[c], -1, p)
        v = [x * inv % p for x in v]
        for idx, row in enumerate(self.rows):
            f = row[c]
            if f:
                self.rows[idx] = [(x - f * y) % p for x, y in zip(row, v)]
        at = 0
        while at < len(self.pivots) and self.pivots[at] < c:
            at += 1
        self.rows.insert(at, v)
        self.pivots.insert(at, c)
        return True

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r) for r in self.rows)


class GF2Echelon:
    """Reduced echelon basis over F_2 with bit-packed rows.

    The pivot of a row is its lowest set bit, so that the column order
    agrees with the list-based classes above.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows: list[int] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: int) -> int:
        for row, c in zip(self.rows, self.pivots):
            if (v >> c) & 1:
                v ^= row
        return v

    def add(self, v) -> bool:
        if not isinstance(v, int):
            v = pack_gf2(v)
        v = self.reduce(v)
        if not v:
            return False
        c = (v & -v).bit_length() - 1
        for idx, row in enumerate(self.rows):
            if (row >> c) & 1:
                self.rows[idx] = row ^ v
        at = 0
        while at < len(self.pivots) and self.pivots[at] < c:
            at += 1
        self.rows.insert(at, v)
        self.pivots.insert(at, c)
        return True

    def contains(self, v) -> bool:
        if not isinstance(v, int):
            v = pack_gf2(v)
        return self.reduce(v) == 0

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return tuple(unpack_gf2(r, self.width) for r in self.rows)


def pack_gf2(vec) -> int:
    out = 0
    for j, x in enumerate(vec):
        if int(x) % 2:
            out |= 1 << j
    return out


def unpack_gf2(v: int, width: int) -> tuple[int, ...]:
    return tuple((v >> j) & 1 for j in range(width))


def make_echelon(width: int, characteristic: int):
    """Echelon accumulator for Q (``characteristic == 0``) or F_p."""
    if characteristic == 0:
        return RationalEchelon(width)
    if characteristic == 2:
        return GF2Echelon(width)
    return ModPEchelon(width, characteristic)


def nullspace(rows, width: int, characteristic: int) -> list[tuple]:
    """Basis of ``{x : r . x = 0 for every row r}``.

    Over Q the basis vectors are primitive integer vectors; over F_p they
    are residue tuples.  Vectors are listed by increasing free column.
    """
    ech = make_echelon(width, characteristic)
    for r in rows:
        ech.add(r)
    rows_ = [list(r) for r in ech.canonical()]
    pivots = list(ech.pivots)
    free = [j for j in range(width) if j not in set(pivots)]
    basis = []
    for f in free:
        if characteristic == 0:
            vec = [Fraction(0)] * width
            vec[f] = Fraction(1)
            for row, p in zip(rows_, pivots):
                vec[p] = Fraction(-row[f], row[p])
            den = 1
            for x in vec:
                den = den * x.denominator // gcd(den, x.denominator)
            basis.append(tuple(_primitive([int(x * den) for x in vec])))
        else:
            P = characteristic
            vec = [0] * width
            vec[f] = 1
            for row, p in zip(rows_, pivots):
                vec[p] = (-row[f]) % P
            basis.append(tuple(vec))
    return basis


def solve_combination(basis_rows, target, characteristic: int):
    """Coefficients ``c`` with ``sum c_i * basis_rows[i] == target``, or ``None``.

    ``basis_rows`` must be linearly independent.  Over Q the result is a
    tuple of Fractions, over F_p a tuple of residues.
    """
    d = len(basis_rows)
    width = len(target)
    if characteristic == 0:
        # Solve the transposed system by Gauss-Jordan over Fractions.
        aug = [[Fraction(basis_rows[i][j]) for i in range(d)] + [Fraction(target[j])] for j in range(width)]
        return _gauss_jordan(aug, d, lambda a: 1 / a, lambda x: x)
    P = characteristic
    aug = [[basis_rows[i][j] % P for i in range(d)] + [target[j] % P] for j in range(width)]
    return _gauss_jordan(aug, d, lambda a: pow(int(a), -1, P), lambda x: x % P)


def _gauss_jordan(aug, d, inverse, norm):
    rows = len(aug)
    r = 0
    where = [-1] * d
    for c in range(d):
        piv = next((i for i in range(r, rows) if norm(aug[i][c]) != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = inverse(aug[r][c])
        aug[r] = [norm(x * inv) for x in aug[r]]
        for i in range(rows):
            if i != r and norm(aug[i][c]) != 0:
                f = aug[i][c]
                aug[i] = [norm(x - f * y) for x, y in zip(aug[i], aug[r])]
        where[c] = r
        r += 1
    for i in range(r, rows):
        if norm(aug[i][d]) != 0:
            return None
    if -1 in where:
        return None
    return tuple(aug[where[c]][d] for c in range(d))
