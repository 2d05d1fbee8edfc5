"""Dense subsets of T_n stored as bit-vectors over the canonical element index."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .transform import Transformation


class ElementSet:
    """An immutable subset of T_n.

    Bit ``i`` is set when the transformation with dense index ``i`` is a member.
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0) -> None:
        if bits < 0 or bits >> n**n:
            raise ValueError("bits outside the index range of T_n")
        self.n = n
        self.bits = bits

    @classmethod
    def empty(cls, n: int) -> ElementSet:
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> ElementSet:
        return cls(n, (1 << n**n) - 1)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> ElementSet:
        bits = 0
        for i in indices:
            bits |= 1 << int(i)
        return cls(n, bits)

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[Transformation]) -> ElementSet:
        return cls.from_indices(n, (t.index for t in elements))

    @classmethod
    def from_mask(cls, n: int, mask: np.ndarray) -> ElementSet:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (n**n,):
            raise ValueError(f"mask must have shape ({n**n},)")
        raw = np.packbits(mask, bitorder="little").tobytes()
        return cls(n, int.from_bytes(raw, "little"))

    @property
    def size(self) -> int:
        return self.n**self.n

    def to_mask(self) -> np.ndarray:
        nbytes = (self.size + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.size].astype(bool)

    def indices(self) -> list[int]:
        return np.flatnonzero(self.to_mask()).tolist()

    def elements(self) -> list[Transformation]:
        return [Transformation.from_index(i, self.n) for i in self.indices()]

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Transformation):
            if item.n != self.n:
                return False
            item = item.index
        if not isinstance(item, (int, np.integer)):
            return False
        return bool(self.bits >> int(item) & 1)

    def _check(self, other: ElementSet) -> None:
        if not isinstance(other, ElementSet):
            raise TypeError(f"expected ElementSet, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"degree mismatch: {self.n} vs {other.n}")

    def __or__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.n, self.bits | other.bits)

    def __and__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.n, self.bits & other.bits)

    def __sub__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.n, self.bits & ~other.bits)

    def __xor__(self, other: ElementSet) -> ElementSet:
        self._check(other)
        return ElementSet(self.n, self.bits ^ other.bits)

    def complement(self) -> ElementSet:
        return ElementSet(self.n, ((1 << self.size) - 1) & ~self.bits)

    def issubset(self, other: ElementSet) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __le__(self, other: ElementSet) -> bool:
        return self.issubset(other)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ElementSet) and self.n == other.n and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic order on the ascending member indices."""
        return tuple(self.indices())

    def __repr__(self) -> str:
        return f"ElementSet(n={self.n}, size={len(self)})"


def union_all(n: int, sets: Iterable[ElementSet]) -> ElementSet:
    bits = 0
    for s in sets:
        bits |= s.bits
    return ElementSet(n, bits)
