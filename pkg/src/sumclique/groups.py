"""Finite abelian groups Z_N and Z_2^n, and subsets stored as bitsets."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

MAX_ORDER = 1 << 26


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


class BudgetExceeded(RuntimeError):
    """A configured enumeration or search budget was exhausted."""


class GroupKind(enum.Enum):
    CYCLIC = "zN"
    BOOLEAN = "z2n"


@dataclass(frozen=True)
class GroupSpec:
    """Either the cyclic group Z_N or the boolean group Z_2^n.

    Boolean elements are coordinate bitmasks: bit ``i`` is coordinate ``i+1``.
    """

    kind: GroupKind
    order: int
    dim: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise PreconditionError("group order must be positive")
        if self.order > MAX_ORDER:
            raise PreconditionError(f"group order {self.order} exceeds cap {MAX_ORDER}")
        if self.kind is GroupKind.BOOLEAN:
            if self.order != 1 << self.dim:
                raise PreconditionError("boolean group must have order 2**dim")
        elif self.dim != 0:
            raise PreconditionError("cyclic group has dim 0")

    @classmethod
    def cyclic(cls, N: int) -> GroupSpec:
        return cls(GroupKind.CYCLIC, int(N), 0)

    @classmethod
    def boolean(cls, n: int) -> GroupSpec:
        if n < 0:
            raise PreconditionError("dimension must be nonnegative")
        return cls(GroupKind.BOOLEAN, 1 << int(n), int(n))

    @property
    def is_boolean(self) -> bool:
        return self.kind is GroupKind.BOOLEAN

    def __str__(self):
        if self.is_boolean:
            return f"Z_2^{self.dim}"
        return f"Z_{self.order}"

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "order": self.order, "dim": self.dim}

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise PreconditionError(f"element {a} out of range for {self}")
        return a

    def add(self, a: int, b: int) -> int:
        a, b = self.check(a), self.check(b)
        if self.is_boolean:
            return a ^ b
        return (a + b) % self.order

    def negate(self, a: int) -> int:
        a = self.check(a)
        if self.is_boolean:
            return a
        return (-a) % self.order

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.negate(b))

    def add_arrays(self, a, b):
        """Vectorised group law on integer arrays (broadcasting allowed)."""
        if self.is_boolean:
            return np.bitwise_xor(a, b)
        return np.add(a, b) % self.order

    def negate_array(self, a):
        if self.is_boolean:
            return np.asarray(a)
        return (-np.asarray(a)) % self.order

    def elements(self) -> range:
        return range(self.order)


def _indices_to_bits(indices, order: int) -> int:
    mask = np.zeros(order, dtype=bool)
    mask[np.asarray(indices, dtype=np.int64)] = True
    return _mask_to_bits(mask)


def _mask_to_bits(mask) -> int:
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _bits_to_mask(bits: int, order: int) -> np.ndarray:
    raw = bits.to_bytes((order + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:order].astype(bool)


@dataclass(frozen=True)
class GroupSet:
    """A subset of a group, held as an arbitrary-width integer bitset."""

    group: GroupSpec
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.group.order:
            raise PreconditionError("bitset has bits outside the group")

    @classmethod
    def from_elements(cls, group: GroupSpec, elements: Iterable[int]) -> GroupSet:
        elements = [group.check(e) for e in elements]
        if len(elements) > 64:
            return cls(group, _indices_to_bits(elements, group.order))
        bits = 0
        for e in elements:
            bits |= 1 << e
        return cls(group, bits)

    @classmethod
    def from_mask(cls, group: GroupSpec, mask) -> GroupSet:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (group.order,):
            raise PreconditionError("mask length must equal the group order")
        return cls(group, _mask_to_bits(mask))

    @classmethod
    def full(cls, group: GroupSpec) -> GroupSet:
        return cls(group, (1 << group.order) - 1)

    @classmethod
    def empty(cls, group: GroupSpec) -> GroupSet:
        return cls(group, 0)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, a) -> bool:
        return 0 <= a < self.group.order and (self.bits >> a) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def elements(self) -> list[int]:
        if self.bits.bit_length() <= 256:
            out, b = [], self.bits
            while b:
                low = b & -b
                out.append(low.bit_length() - 1)
                b ^= low
            return out
        return self.to_array().tolist()

    def to_array(self) -> np.ndarray:
        return np.flatnonzero(self.to_mask()).astype(np.int64)

    def to_mask(self) -> np.ndarray:
        return _bits_to_mask(self.bits, self.group.order)

    def issubset(self, other: GroupSet) -> bool:
        return self.bits & ~other.bits == 0

    def union(self, other: GroupSet) -> GroupSet:
        return GroupSet(self.group, self.bits | other.bits)

    def intersection(self, other: GroupSet) -> GroupSet:
        return GroupSet(self.group, self.bits & other.bits)

    def difference(self, other: GroupSet) -> GroupSet:
        return GroupSet(self.group, self.bits & ~other.bits)

    def complement(self) -> GroupSet:
        return GroupSet(self.group, ((1 << self.group.order) - 1) & ~self.bits)

    def translate(self, t: int) -> GroupSet:
        arr = self.to_array()
        return GroupSet.from_elements(self.group, self.group.add_arrays(arr, self.group.check(t)).tolist())

    def __repr__(self):
        elems = self.elements()
        shown = ", ".join(map(str, elems[:12])) + (", ..." if len(elems) > 12 else "")
        return f"GroupSet({self.group}, {{{shown}}})"


def parse_set(group: GroupSpec, text: str) -> GroupSet:
    """Parse a comma/whitespace separated list of decimal elements."""
    tokens = [t for t in text.replace(",", " ").split() if t]
    elements = []
    for tok in tokens:
        try:
            value = int(tok, 10)
        except ValueError as exc:
            raise PreconditionError(f"cannot parse element {tok!r}") from exc
        elements.append(group.check(value))
    return GroupSet.from_elements(group, elements)


def read_set_file(group: GroupSpec, path) -> GroupSet:
    """Read the set-file format: one decimal element per line, ``#`` comments."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    return parse_set(group, "\n".join(body))


def format_set_file(X: GroupSet, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.extend(str(e) for e in X.elements())
    return "\n".join(lines) + "\n"
