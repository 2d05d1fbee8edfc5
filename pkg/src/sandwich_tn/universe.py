"""Vectorised dense tables over all n**n elements of a variant.

Row ``i`` of :attr:`Universe.images` holds the 0-based images of the
transformation with dense index ``i`` (see :attr:`Transformation.index`).
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np

from .elements import ElementSet
from .transform import SandwichContext, ScanLimitError, Transformation, check_scan

# full product tables above this many entries are refused (n = 6 would need 2.2e9)
MAX_TABLE_ENTRIES = 5**10


class Universe:
    def __init__(self, ctx: SandwichContext) -> None:
        self.ctx = ctx
        self.n = n = ctx.n
        self.size = n**n
        self.weights = n ** np.arange(n, dtype=np.int64)
        digits = np.arange(self.size, dtype=np.int64)[:, None] // self.weights % n
        self.images = digits.astype(np.int16)
        self.alpha = np.array(ctx.alpha.images, dtype=np.int16) - 1

    def encode(self, rows: np.ndarray) -> np.ndarray:
        return (rows.astype(np.int64) * self.weights).sum(axis=-1)

    def element(self, index: int) -> Transformation:
        return Transformation(tuple(int(v) + 1 for v in self.images[index]))

    def product(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Elementwise sandwich product of two index arrays."""
        left = np.asarray(left)
        right = np.asarray(right)
        through = self.alpha[self.images[left]]
        rows = np.take_along_axis(self.images[right], through.astype(np.intp), axis=-1)
        return self.encode(rows)

    @cached_property
    def table(self) -> np.ndarray:
        """``table[b, g]`` is the index of b * g."""
        if self.size**2 > MAX_TABLE_ENTRIES:
            raise ScanLimitError(
                f"product table for n={self.n} needs {self.size**2} entries"
            )
        dtype = np.int16 if self.size < 2**15 else np.int32
        out = np.empty((self.size, self.size), dtype=dtype)
        through = self.alpha[self.images].astype(np.intp)  # row b: alpha after b
        for g in range(self.size):
            out[:, g] = self.encode(self.images[g][through])
        return out

    @cached_property
    def _powers(self) -> tuple[np.ndarray, np.ndarray]:
        everything = np.arange(self.size, dtype=np.int64)
        root = np.full(self.size, -1, dtype=np.int64)
        exponent = np.zeros(self.size, dtype=np.int64)
        cur = everything.copy()
        k = 1
        while True:
            todo = root < 0
            if not todo.any():
                break
            idem = self.product(cur, cur) == cur
            hit = todo & idem
            root[hit] = cur[hit]
            exponent[hit] = k
            cur = self.product(cur, everything)
            k += 1
        return root, exponent

    @property
    def root(self) -> np.ndarray:
        """Index of the idempotent *-power of every element."""
        return self._powers[0]

    @property
    def exponent(self) -> np.ndarray:
        return self._powers[1]

    @cached_property
    def idempotents(self) -> np.ndarray:
        return np.flatnonzero(self.root == np.arange(self.size))

    @cached_property
    def rank(self) -> np.ndarray:
        srt = np.sort(self.images, axis=1)
        return 1 + (np.diff(srt, axis=1) != 0).sum(axis=1)

    @cached_property
    def stable_rank(self) -> np.ndarray:
        return self.rank[self.root]

    @cached_property
    def class_sets(self) -> dict[int, ElementSet]:
        """Root class of every idempotent, keyed by the idempotent's index."""
        out = {}
        order = np.argsort(self.root, kind="stable")
        roots = self.root[order]
        cuts = np.flatnonzero(np.diff(roots)) + 1
        for chunk in np.split(order, cuts):
            mask = np.zeros(self.size, dtype=bool)
            mask[chunk] = True
            out[int(self.root[chunk[0]])] = ElementSet.from_mask(self.n, mask)
        return out

    @cached_property
    def class_products(self) -> dict[tuple[int, int], frozenset[int]]:
        """Idempotents whose root classes meet C_e * C_f, for idempotents e, f."""
        idem = self.idempotents
        k = len(idem)
        label = np.searchsorted(idem, self.root).astype(np.int64)
        target = label[self.table]
        codes = (label[:, None] * k + label[None, :]) * k + target
        triples = np.unique(codes)
        out: dict[tuple[int, int], set[int]] = {}
        for code in triples.tolist():
            pair, t = divmod(code, k)
            i, j = divmod(pair, k)
            out.setdefault((int(idem[i]), int(idem[j])), set()).add(int(idem[t]))
        return {key: frozenset(v) for key, v in out.items()}

    def mask_of_roots(self, idempotents) -> np.ndarray:
        return np.isin(self.root, np.asarray(list(idempotents), dtype=np.int64))

    def set_of_roots(self, idempotents) -> ElementSet:
        bits = 0
        classes = self.class_sets
        for e in idempotents:
            bits |= classes[int(e)].bits
        return ElementSet(self.n, bits)


@lru_cache(maxsize=32)
def _universe(ctx: SandwichContext) -> Universe:
    return Universe(ctx)


def universe(ctx: SandwichContext, max_scan: int | None = None) -> Universe:
    """Cached dense tables for ``ctx``; raises ScanLimitError beyond the scan bound."""
    check_scan(ctx.n, max_scan)
    return _universe(ctx)
