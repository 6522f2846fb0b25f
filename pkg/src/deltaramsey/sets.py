"""Subsets of a finite carrier stored as integer bitmasks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InvalidInput


@dataclass(frozen=True)
class ElementSet:
    """A subset of ``{0, ..., universe_size - 1}``.

    Membership is bit ``i`` of ``bits``. Instances are immutable and hashable,
    so they double as memo keys.
    """

    universe_size: int
    bits: int = 0

    def __post_init__(self):
        if self.universe_size < 0:
            raise InvalidInput("universe_size must be non-negative")
        if self.bits < 0 or self.bits >> self.universe_size:
            raise InvalidInput(
                f"bits {self.bits:#x} exceed a universe of size {self.universe_size}"
            )

    @classmethod
    def of(cls, universe_size: int, elements: Iterable[int] = ()) -> ElementSet:
        bits = 0
        for x in elements:
            x = int(x)
            if not 0 <= x < universe_size:
                raise InvalidInput(f"element {x} outside [0, {universe_size})")
            bits |= 1 << x
        return cls(universe_size, bits)

    @classmethod
    def from_mask(cls, mask) -> ElementSet:
        """From a 1-d boolean array indexed by element."""
        bits = 0
        for i, flag in enumerate(mask):
            if flag:
                bits |= 1 << i
        return cls(len(mask), bits)

    @classmethod
    def full(cls, universe_size: int) -> ElementSet:
        return cls(universe_size, (1 << universe_size) - 1)

    @classmethod
    def empty(cls, universe_size: int) -> ElementSet:
        return cls(universe_size, 0)

    @property
    def mask(self) -> int:
        return (1 << self.universe_size) - 1

    def __contains__(self, x) -> bool:
        return 0 <= x < self.universe_size and bool(self.bits >> x & 1)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def _check(self, other: ElementSet):
        if not isinstance(other, ElementSet):
            return NotImplemented
        if other.universe_size != self.universe_size:
            raise InvalidInput("sets live in universes of different sizes")
        return None

    def __or__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.universe_size, self.bits | other.bits)

    def __and__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.universe_size, self.bits & other.bits)

    def __sub__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.universe_size, self.bits & ~other.bits)

    def __xor__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.universe_size, self.bits ^ other.bits)

    def __invert__(self) -> ElementSet:
        return ElementSet(self.universe_size, self.mask & ~self.bits)

    complement = __invert__

    def issubset(self, other: ElementSet) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __le__(self, other: ElementSet) -> bool:
        return self.issubset(other)

    def __ge__(self, other: ElementSet) -> bool:
        return other.issubset(self)

    def add(self, x: int) -> ElementSet:
        return ElementSet.of(self.universe_size, [x]) | self

    def min(self) -> int:
        if not self.bits:
            raise ValueError("min() of an empty set")
        return (self.bits & -self.bits).bit_length() - 1

    def to_list(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return f"ElementSet({self.universe_size}, {self.to_list()})"


def all_subsets(universe_size: int) -> Iterator[ElementSet]:
    """Every subset of the carrier, in increasing bitmask order."""
    for bits in range(1 << universe_size):
        yield ElementSet(universe_size, bits)
