"""Transformations of {1..n}, ordinary and sandwich composition, stable data.

Composition runs left to right: ``compose(beta, gamma)(x) == gamma(beta(x))``.
All public indexing is 1-based.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

DEFAULT_MAX_SCAN = 5**5
MAX_SCAN_ENV = "SANDWICH_TN_MAX_SCAN"


class ScanLimitError(RuntimeError):
    """Raised when a whole-semigroup scan would exceed the configured bound."""


def max_scan_default() -> int:
    raw = os.environ.get(MAX_SCAN_ENV)
    if raw is None:
        return DEFAULT_MAX_SCAN
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{MAX_SCAN_ENV} must be an integer, got {raw!r}") from None


def check_scan(n: int, max_scan: int | None = None) -> None:
    bound = max_scan_default() if max_scan is None else max_scan
    if n**n > bound:
        raise ScanLimitError(
            f"scanning T_{n} needs {n}^{n} = {n**n} elements, above the bound max_scan={bound}"
        )


@dataclass(frozen=True, order=True)
class Transformation:
    """A total self-map of {1..n}; ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        n = len(images)
        if n == 0:
            raise ValueError("a transformation needs degree at least 1")
        for pos, v in enumerate(images, start=1):
            if not 1 <= v <= n:
                raise ValueError(f"entry {pos} is {v}, outside 1..{n}")

    @classmethod
    def identity(cls, n: int) -> Transformation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def constant(cls, n: int, value: int) -> Transformation:
        return cls((value,) * n)

    @classmethod
    def from_index(cls, index: int, n: int) -> Transformation:
        if not 0 <= index < n**n:
            raise ValueError(f"index {index} out of range for degree {n}")
        images = []
        for _ in range(n):
            index, r = divmod(index, n)
            images.append(r + 1)
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    @cached_property
    def index(self) -> int:
        """Dense code sum((b_i - 1) * n**(i-1)), a bijection onto range(n**n)."""
        n = self.n
        return sum((v - 1) * n**i for i, v in enumerate(self.images))

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.images)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"

    def __repr__(self) -> str:
        return f"Transformation({self})"

    def image(self) -> frozenset[int]:
        return frozenset(self.images)

    def rank(self) -> int:
        return len(set(self.images))

    def kernel(self) -> Partition:
        groups: dict[int, list[int]] = {}
        for x, v in enumerate(self.images, start=1):
            groups.setdefault(v, []).append(x)
        return Partition(groups.values())

    def restrict_image(self, block: Iterable[int]) -> int:
        """The common value on ``block``; raises if the map is not constant there."""
        values = {self(x) for x in block}
        if len(values) != 1:
            raise ValueError(f"{self} is not constant on {sorted(block)}")
        return values.pop()


@dataclass(frozen=True)
class Partition:
    """A set partition of {1..n} held in canonical form.

    Blocks are sorted ascending internally and ordered by their minimal element.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]) -> None:
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise ValueError("partition blocks must be nonempty")
            if seen.intersection(b):
                raise ValueError("partition blocks must be disjoint")
            seen.update(b)
        if seen != set(range(1, len(seen) + 1)):
            raise ValueError(f"blocks do not cover 1..{len(seen)}")
        object.__setattr__(self, "blocks", canon)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def __lt__(self, other: Partition) -> bool:
        return self.blocks < other.blocks

    def __str__(self) -> str:
        return "{" + "|".join(",".join(map(str, b)) for b in self.blocks) + "}"

    def __repr__(self) -> str:
        return f"Partition({self})"

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def refines(self, other: Partition) -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        return all(set(b) <= set(other.block_of(b[0])) for b in self.blocks)

    def sizes(self) -> tuple[int, ...]:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))


_TRANSFORMATION_RE = re.compile(r"^\s*\[\s*(.*?)\s*\]\s*$")


def parse_transformation(text: str) -> Transformation:
    """Parse ``"[b1,...,bn]"`` with 1-based images."""
    m = _TRANSFORMATION_RE.match(text)
    if m is None:
        raise ValueError(f"expected a transformation like [1,1,3], got {text!r}")
    body = m.group(1)
    if not body:
        raise ValueError("empty transformation")
    parts = [p.strip() for p in body.split(",")]
    n = len(parts)
    images = []
    for pos, p in enumerate(parts, start=1):
        if not re.fullmatch(r"[+-]?\d+", p):
            raise ValueError(f"entry {pos} ({p!r}) is not an integer")
        v = int(p)
        if not 1 <= v <= n:
            raise ValueError(f"entry {pos} is {v}, outside 1..{n}")
        images.append(v)
    return Transformation(tuple(images))


def parse_partition(text: str) -> Partition:
    """Parse ``"{1,2|3}"``."""
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError(f"expected a partition like {{1,2|3}}, got {text!r}")
    return Partition(
        [int(x) for x in block.split(",")] for block in s[1:-1].split("|")
    )


def format_set(values: Iterable[int]) -> str:
    return "{" + ",".join(map(str, sorted(values))) + "}"


def parse_set(text: str) -> frozenset[int]:
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError(f"expected a set like {{1,3}}, got {text!r}")
    body = s[1:-1].strip()
    return frozenset(int(x) for x in body.split(",")) if body else frozenset()


def _same_degree(beta: Transformation, gamma: Transformation) -> None:
    if beta.n != gamma.n:
        raise ValueError(f"degree mismatch: {beta.n} vs {gamma.n}")


def compose(beta: Transformation, gamma: Transformation) -> Transformation:
    """Left-to-right product: x -> gamma(beta(x))."""
    _same_degree(beta, gamma)
    g = gamma.images
    return Transformation(tuple(g[b - 1] for b in beta.images))


def kernel(beta: Transformation) -> Partition:
    return beta.kernel()


def image(beta: Transformation) -> frozenset[int]:
    return beta.image()


def rank(beta: Transformation) -> int:
    return beta.rank()


def is_idempotent(beta: Transformation) -> bool:
    return compose(beta, beta) == beta


@dataclass(frozen=True)
class SandwichContext:
    """An idempotent sandwich element with its block structure.

    ``blocks[i-1]`` is A_i and ``reps[i-1]`` is a_i, indexed in canonical
    partition order (by minimal element).
    """

    alpha: Transformation
    blocks: tuple[tuple[int, ...], ...] = field(init=False)
    reps: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        alpha = self.alpha
        if not is_idempotent(alpha):
            raise ValueError(f"sandwich element {alpha} is not idempotent")
        blocks = alpha.kernel().blocks
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "reps", tuple(alpha(b[0]) for b in blocks))

    @classmethod
    def parse(cls, text: str) -> SandwichContext:
        return cls(parse_transformation(text))

    @property
    def n(self) -> int:
        return self.alpha.n

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.blocks)

    @property
    def A(self) -> frozenset[int]:
        return frozenset(self.reps)

    @property
    def partition(self) -> Partition:
        return Partition(self.blocks)

    def block_index(self, x: int) -> int:
        """The 1-based i with x in A_i."""
        for i, b in enumerate(self.blocks, start=1):
            if x in b:
                return i
        raise KeyError(x)

    def rep_index(self, a: int) -> int:
        """The 1-based i with a == a_i."""
        return self.reps.index(a) + 1

    def __str__(self) -> str:
        return f"(n={self.n}, alpha={self.alpha})"


def sandwich_product(
    ctx: SandwichContext, beta: Transformation, gamma: Transformation
) -> Transformation:
    """beta * gamma = beta alpha gamma."""
    if beta.n != ctx.n or gamma.n != ctx.n:
        raise ValueError(f"degree mismatch with context of degree {ctx.n}")
    a = ctx.alpha.images
    g = gamma.images
    return Transformation(tuple(g[a[b - 1] - 1] for b in beta.images))


def sandwich_power(ctx: SandwichContext, beta: Transformation, m: int) -> Transformation:
    if m < 1:
        raise ValueError("powers start at 1")
    result = beta
    for _ in range(m - 1):
        result = sandwich_product(ctx, result, beta)
    return result


def idempotent_power(
    ctx: SandwichContext, beta: Transformation
) -> tuple[Transformation, int]:
    """The unique idempotent among the *-powers of beta and its least exponent."""
    seen: dict[Transformation, int] = {}
    powers: list[Transformation] = []
    x = beta
    k = 1
    while x not in seen:
        seen[x] = k
        powers.append(x)
        x = sandwich_product(ctx, x, beta)
        k += 1
    tail = seen[x]  # first exponent inside the cycle
    period = k - tail
    # least exponent >= tail divisible by the period
    m = max(tail, period)
    m = -(-m // period) * period
    eps = powers[m - 1]
    assert sandwich_product(ctx, eps, eps) == eps
    return eps, m


@dataclass(frozen=True)
class StableData:
    strk: int
    kernel: Partition
    image: frozenset[int]


def stable_data(ctx: SandwichContext, beta: Transformation) -> StableData:
    eps, _ = idempotent_power(ctx, beta)
    return StableData(eps.rank(), eps.kernel(), eps.image())


def stable_rank(ctx: SandwichContext, beta: Transformation) -> int:
    return idempotent_power(ctx, beta)[0].rank()


def all_transformations(n: int) -> Iterator[Transformation]:
    for i in range(n**n):
        yield Transformation.from_index(i, n)


def idempotent_sandwiches(n: int) -> list[Transformation]:
    """Every idempotent of T_n, the admissible sandwich elements, by index."""
    return [t for t in all_transformations(n) if is_idempotent(t)]


def as_transformation(value: Transformation | Sequence[int] | str) -> Transformation:
    if isinstance(value, Transformation):
        return value
    if isinstance(value, str):
        return parse_transformation(value)
    return Transformation(tuple(value))
