"""Idempotents of (T_n, *), their root classes, maximal subgroups and the
homomorphisms to T_n and T(A)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .elements import ElementSet
from .transform import (
    Partition,
    SandwichContext,
    Transformation,
    compose,
    format_set,
    idempotent_power,
    sandwich_product,
)
from .universe import universe


@dataclass(frozen=True)
class IdempotentInfo:
    """Structure of an idempotent of the variant.

    ``kernel_blocks[i]`` is mapped to ``block_images[i]`` and
    ``injection[i]`` is the 1-based j with that image in A_j. The last five
    fields are only set for rank l-1.
    """

    eps: Transformation
    rank: int
    kernel_blocks: tuple[tuple[int, ...], ...]
    block_images: tuple[int, ...]
    injection: tuple[int, ...]
    distinguished: tuple[int, int] | None = None
    trifle: int | None = None
    burdened: int | None = None
    trifle_index: int | None = None
    burdened_index: int | None = None

    def to_dict(self) -> dict:
        out = {
            "eps": str(self.eps),
            "rank": self.rank,
            "kernel": str(Partition(self.kernel_blocks)),
            "image": format_set(self.block_images),
            "f": list(self.injection),
        }
        if self.trifle is not None:
            out.update(
                distinguished=format_set(self.distinguished),
                trifle=self.trifle,
                burdened=self.burdened,
                trifle_index=self.trifle_index,
                burdened_index=self.burdened_index,
            )
        return out


@dataclass(frozen=True)
class RankLm1Data:
    distinguished: tuple[int, int]
    trifle: int
    burdened: int
    trifle_index: int
    burdened_index: int


def is_variant_idempotent(ctx: SandwichContext, eps: Transformation) -> bool:
    return sandwich_product(ctx, eps, eps) == eps


def structural_idempotent_check(
    ctx: SandwichContext, eps: Transformation
) -> IdempotentInfo | None:
    """Idempotence via the block criterion, without multiplying.

    eps is idempotent iff the map f with e_i in A_f(i) is injective and
    a_f(i) lies in E_i for every kernel block E_i.
    """
    blocks = eps.kernel().blocks
    images = tuple(eps(b[0]) for b in blocks)
    f = tuple(ctx.block_index(e) for e in images)
    if len(set(f)) != len(f):
        return None
    for block, j in zip(blocks, f):
        if ctx.reps[j - 1] not in block:
            return None
    info = IdempotentInfo(eps, len(blocks), blocks, images, f)
    if len(blocks) == ctx.l - 1:
        d = _rank_lm1(ctx, blocks, f)
        info = IdempotentInfo(
            eps,
            len(blocks),
            blocks,
            images,
            f,
            d.distinguished,
            d.trifle,
            d.burdened,
            d.trifle_index,
            d.burdened_index,
        )
    return info


def _rank_lm1(
    ctx: SandwichContext, blocks: tuple[tuple[int, ...], ...], f: tuple[int, ...]
) -> RankLm1Data:
    found = []
    for block, m in zip(blocks, f):
        reps_here = [ctx.rep_index(x) for x in block if x in ctx.A]
        for k in reps_here:
            if k != m:
                found.append((m, k))
    if len(found) != 1:
        raise AssertionError(f"expected one distinguished pair, found {found}")
    m, k = found[0]
    am, ak = ctx.reps[m - 1], ctx.reps[k - 1]
    return RankLm1Data(tuple(sorted((am, ak))), ak, am, k, m)


def rank_lm1_data(ctx: SandwichContext, eps: Transformation) -> RankLm1Data:
    """Distinguished pair, trifle and burdened element of a rank l-1 idempotent.

    The trifle a_k and the burdened a_m share a kernel block E_i whose image
    lies in A_m.
    """
    info = structural_idempotent_check(ctx, eps)
    if info is None:
        raise ValueError(f"{eps} is not an idempotent of the variant")
    if info.rank != ctx.l - 1:
        raise ValueError(f"{eps} has rank {info.rank}, expected l-1 = {ctx.l - 1}")
    return _rank_lm1(ctx, info.kernel_blocks, info.injection)


def stable_lm1_data(ctx: SandwichContext, beta: Transformation) -> RankLm1Data:
    """Trifle data of any element of stable rank l-1, read off its idempotent power."""
    return rank_lm1_data(ctx, idempotent_power(ctx, beta)[0])


def enumerate_idempotents(
    ctx: SandwichContext, max_scan: int | None = None
) -> list[IdempotentInfo]:
    """All idempotents by scanning T_n with the multiplicative check."""
    u = universe(ctx, max_scan)
    everything = np.arange(u.size)
    idem = np.flatnonzero(u.product(everything, everything) == everything)
    out = []
    for i in idem.tolist():
        info = structural_idempotent_check(ctx, u.element(i))
        if info is None:
            raise AssertionError(f"structural check rejects idempotent {u.element(i)}")
        out.append(info)
    return out


def count_idempotents_formula(ctx: SandwichContext) -> int:
    """Sum over nonempty X of prod_{i in X} |A_i| * |X|**(n - |X|)."""
    sizes = [len(b) for b in ctx.blocks]
    total = 0
    for size in range(1, ctx.l + 1):
        for X in combinations(range(ctx.l), size):
            total += math.prod(sizes[i] for i in X) * size ** (ctx.n - size)
    return total


def _require_idempotent(ctx: SandwichContext, eps: Transformation) -> None:
    if not is_variant_idempotent(ctx, eps):
        raise ValueError(f"{eps} is not an idempotent of the variant")


def sqrt_class(
    ctx: SandwichContext, eps: Transformation, max_scan: int | None = None
) -> ElementSet:
    """All beta whose idempotent *-power is eps."""
    _require_idempotent(ctx, eps)
    return universe(ctx, max_scan).class_sets[eps.index]


def group_membership(ctx: SandwichContext, eps: Transformation, beta: Transformation) -> bool:
    """beta lies in the maximal subgroup at eps: same kernel and same image."""
    _require_idempotent(ctx, eps)
    return beta.kernel() == eps.kernel() and beta.image() == eps.image()


def group_of(
    ctx: SandwichContext, eps: Transformation, max_scan: int | None = None
) -> ElementSet:
    _require_idempotent(ctx, eps)
    u = universe(ctx, max_scan)
    target = np.array(eps.images) - 1
    ker = target[:, None] == target[None, :]
    rows = u.images
    same_kernel = ((rows[:, :, None] == rows[:, None, :]) == ker).all(axis=(1, 2))
    img = np.zeros(ctx.n, dtype=bool)
    img[target] = True
    present = np.zeros((u.size, ctx.n), dtype=bool)
    np.put_along_axis(present, rows.astype(np.intp), True, axis=1)
    same_image = (present == img).all(axis=1)
    group = ElementSet.from_mask(ctx.n, same_kernel & same_image)
    if len(group) != math.factorial(eps.rank()):
        raise AssertionError(f"|G({eps})| = {len(group)}, expected {eps.rank()}!")
    return group


def phi_l(ctx: SandwichContext, beta: Transformation) -> Transformation:
    """alpha beta."""
    return compose(ctx.alpha, beta)


def phi_r(ctx: SandwichContext, beta: Transformation) -> Transformation:
    """beta alpha."""
    return compose(beta, ctx.alpha)


def phi_bar(ctx: SandwichContext, beta: Transformation) -> Transformation:
    """(beta alpha) restricted to A, as a map i -> j meaning a_i -> a_j."""
    ba = phi_r(ctx, beta)
    return Transformation(tuple(ctx.rep_index(ba(a)) for a in ctx.reps))


def is_bijection(t: Transformation) -> bool:
    return t.rank() == t.n
