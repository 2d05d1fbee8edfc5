"""Isolated, completely isolated and (one-sided) convex subsemigroups of (T_n, *).

Every isolated subsemigroup is a union of root classes, so each family below
is described by the idempotents it collects:

* ``F(X, Y)``: stable rank l, stable kernel in X and stable image in Y;
* ``H(k, m, X, Y)``: stable rank l-1 with trifle a_k, burdened a_m;
* ``K({k, m}, X)``: stable rank l-1, distinguished pair {a_k, a_m}, kernel in X;
* ``L(k, M, Y)``: stable rank l-1, trifle a_k, burdened in M, image in Y;
* ``Ideal``: everything of stable rank below l;
* ``FUnionIdeal(X, Y)``: F(X, Y) together with the ideal;
* ``RootUnion``: an explicit set of idempotents (used when l = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import NamedTuple, Sequence

import numpy as np

from .elements import ElementSet
from .transform import (
    Partition,
    SandwichContext,
    ScanLimitError,
    Transformation,
    format_set,
)
from .universe import universe

TAG_ORDER = ("F", "H", "K", "L", "Ideal", "FUnionIdeal", "RootUnion")
DEFAULT_MAX_FAMILIES = 200_000

Image = tuple[int, ...]


@dataclass(frozen=True)
class FamilyDescriptor:
    """A tagged parameter record; unused parameters stay empty."""

    tag: str
    k: int | None = None
    m: int | None = None
    X: tuple[Partition, ...] = ()
    Y: tuple[Image, ...] = ()
    M: tuple[int, ...] = ()
    roots: tuple[Transformation, ...] = ()

    def __post_init__(self) -> None:
        if self.tag not in TAG_ORDER:
            raise ValueError(f"unknown family tag {self.tag!r}")
        object.__setattr__(self, "X", tuple(sorted(set(self.X))))
        object.__setattr__(self, "Y", tuple(sorted({tuple(sorted(y)) for y in self.Y})))
        object.__setattr__(self, "M", tuple(sorted(set(self.M))))
        object.__setattr__(self, "roots", tuple(sorted(set(self.roots), key=lambda t: t.index)))

    def sort_key(self) -> tuple:
        return (
            TAG_ORDER.index(self.tag),
            self.k or 0,
            self.m or 0,
            tuple(p.blocks for p in self.X),
            self.Y,
            self.M,
            tuple(t.index for t in self.roots),
        )

    def to_dict(self) -> dict:
        out: dict = {"tag": self.tag}
        if self.k is not None:
            out["k"] = self.k
        if self.m is not None:
            out["m"] = self.m
        if self.X:
            out["X"] = [str(p) for p in self.X]
        if self.Y:
            out["Y"] = [format_set(y) for y in self.Y]
        if self.M:
            out["M"] = list(self.M)
        if self.roots:
            out["roots"] = [str(t) for t in self.roots]
        return out

    def __str__(self) -> str:
        parts = [f"{key}={value}" for key, value in self.to_dict().items() if key != "tag"]
        return f"{self.tag}({', '.join(parts)})"


class Family(NamedTuple):
    descriptor: FamilyDescriptor
    elements: ElementSet


# ---------------------------------------------------------------------------
# index sets


def _assignments(ctx: SandwichContext, seeds: Sequence[frozenset[int]]) -> list[Partition]:
    rest = sorted(set(range(1, ctx.n + 1)).difference(*seeds))
    out = []
    for choice in product(range(len(seeds)), repeat=len(rest)):
        blocks = [set(s) for s in seeds]
        for x, j in zip(rest, choice):
            blocks[j].add(x)
        out.append(Partition(blocks))
    return sorted(out)


def enum_index_sets(ctx: SandwichContext) -> tuple[list[Partition], list[Image]]:
    """Kernels separating all a_i, and transversals {b_1..b_l} with b_i in A_i."""
    kernels = _assignments(ctx, [frozenset({a}) for a in ctx.reps])
    images = sorted(tuple(sorted(t)) for t in product(*ctx.blocks))
    assert len(kernels) == ctx.l ** (ctx.n - ctx.l)
    assert len(images) == math.prod(len(b) for b in ctx.blocks)
    return kernels, images


def enum_index_sets_lm1(
    ctx: SandwichContext, k: int, m: int
) -> tuple[list[Partition], list[Image]]:
    """Kernels with l-1 blocks, each meeting A, a_k and a_m together; and
    transversals of the A_i with i != k."""
    l = ctx.l
    if l < 2:
        raise ValueError("rank l-1 index sets need l >= 2")
    if k == m or not (1 <= k <= l and 1 <= m <= l):
        raise ValueError(f"need distinct k, m in 1..{l}, got {k}, {m}")
    ak, am = ctx.reps[k - 1], ctx.reps[m - 1]
    seeds = [frozenset({ak, am})] + [
        frozenset({a}) for i, a in enumerate(ctx.reps, start=1) if i not in (k, m)
    ]
    kernels = _assignments(ctx, seeds)
    others = [b for i, b in enumerate(ctx.blocks, start=1) if i != k]
    images = sorted(tuple(sorted(t)) for t in product(*others))
    assert len(kernels) == (l - 1) ** (ctx.n - l)
    assert len(images) == math.prod(len(b) for b in others)
    return kernels, images


def idempotent_with(
    ctx: SandwichContext, kernel: Partition, image: Sequence[int]
) -> Transformation:
    """The unique idempotent with the given kernel and image.

    Each block E goes to the single image point lying in some A_j with a_j in E.
    """
    image = set(image)
    out = [0] * ctx.n
    for block in kernel:
        reach = set()
        for x in block:
            if x in ctx.A:
                reach.update(ctx.blocks[ctx.rep_index(x) - 1])
        hits = image & reach
        if len(hits) != 1:
            raise ValueError(f"no unique idempotent with kernel {kernel} and image {format_set(image)}")
        value = hits.pop()
        for x in block:
            out[x - 1] = value
    eps = Transformation(tuple(out))
    if eps.image() != frozenset(image):
        raise ValueError(f"no idempotent with kernel {kernel} and image {format_set(image)}")
    return eps


# ---------------------------------------------------------------------------
# layered structure of the idempotents


@dataclass
class _Layers:
    ctx: SandwichContext
    top_kernels: list[Partition]
    top_images: list[Image]
    top: dict[tuple[Partition, Image], Transformation]
    lm1_kernels: dict[tuple[int, int], list[Partition]] = field(default_factory=dict)
    lm1_images: dict[int, list[Image]] = field(default_factory=dict)
    lm1: dict[tuple[int, int], dict[tuple[Partition, Image], Transformation]] = field(
        default_factory=dict
    )


@lru_cache(maxsize=32)
def _layers(ctx: SandwichContext) -> _Layers:
    kernels, images = enum_index_sets(ctx)
    top = {(p, y): idempotent_with(ctx, p, y) for p in kernels for y in images}
    layers = _Layers(ctx, kernels, images, top)
    if ctx.l >= 2:
        for k in range(1, ctx.l + 1):
            for m in range(1, ctx.l + 1):
                if k == m:
                    continue
                ks, ys = enum_index_sets_lm1(ctx, k, m)
                layers.lm1_kernels[(k, m)] = ks
                layers.lm1_images[k] = ys
                layers.lm1[(k, m)] = {(p, y): idempotent_with(ctx, p, y) for p in ks for y in ys}
    return layers


def _check_subset(name: str, chosen: Sequence, allowed: Sequence) -> None:
    if not chosen:
        raise ValueError(f"{name} must be nonempty")
    extra = set(chosen) - set(allowed)
    if extra:
        raise ValueError(f"{name} has entries outside its index set: {sorted(map(str, extra))}")


def family_roots(ctx: SandwichContext, d: FamilyDescriptor) -> list[Transformation]:
    """Idempotents whose root classes make up the family (Ideal parts excluded)."""
    layers = _layers(ctx)
    l = ctx.l
    if d.tag in ("F", "FUnionIdeal"):
        if d.tag == "FUnionIdeal" and l < 2:
            raise ValueError("FUnionIdeal needs l >= 2")
        _check_subset("X", d.X, layers.top_kernels)
        _check_subset("Y", d.Y, layers.top_images)
        return [layers.top[(p, y)] for p in d.X for y in d.Y]
    if d.tag == "H":
        if (d.k, d.m) not in layers.lm1:
            raise ValueError(f"H needs distinct k, m in 1..{l} and l >= 2")
        _check_subset("X", d.X, layers.lm1_kernels[(d.k, d.m)])
        _check_subset("Y", d.Y, layers.lm1_images[d.k])
        return [layers.lm1[(d.k, d.m)][(p, y)] for p in d.X for y in d.Y]
    if d.tag == "K":
        if d.k is None or d.m is None or not d.k < d.m or (d.k, d.m) not in layers.lm1:
            raise ValueError(f"K needs k < m in 1..{l} and l >= 2")
        _check_subset("X", d.X, layers.lm1_kernels[(d.k, d.m)])
        out = []
        for k, m in ((d.k, d.m), (d.m, d.k)):
            out += [layers.lm1[(k, m)][(p, y)] for p in d.X for y in layers.lm1_images[k]]
        return out
    if d.tag == "L":
        if d.k is None or not 1 <= d.k <= l or l < 2:
            raise ValueError(f"L needs k in 1..{l} and l >= 2")
        others = [a for i, a in enumerate(ctx.reps, start=1) if i != d.k]
        if len(d.M) < 2 or not set(d.M) <= set(others):
            raise ValueError(f"M must be a subset of {others} with at least two elements")
        _check_subset("Y", d.Y, layers.lm1_images[d.k])
        out = []
        for a in d.M:
            m = ctx.rep_index(a)
            table = layers.lm1[(d.k, m)]
            out += [table[(p, y)] for p in layers.lm1_kernels[(d.k, m)] for y in d.Y]
        return out
    if d.tag == "Ideal":
        if l < 2:
            raise ValueError("the ideal of stable rank below l is empty when l = 1")
        return []
    if d.tag == "RootUnion":
        if not d.roots:
            raise ValueError("RootUnion needs at least one idempotent")
        return list(d.roots)
    raise ValueError(d.tag)


def _ideal_set(ctx: SandwichContext, max_scan: int | None = None) -> ElementSet:
    u = universe(ctx, max_scan)
    return ElementSet.from_mask(ctx.n, u.stable_rank < ctx.l)


def family_elements(
    ctx: SandwichContext, d: FamilyDescriptor, max_scan: int | None = None
) -> ElementSet:
    u = universe(ctx, max_scan)
    roots = family_roots(ctx, d)
    classes = u.class_sets
    bits = 0
    for eps in roots:
        if eps.index not in classes:
            raise ValueError(f"{eps} is not an idempotent of the variant")
        bits |= classes[eps.index].bits
    out = ElementSet(ctx.n, bits)
    if d.tag in ("Ideal", "FUnionIdeal"):
        out = out | _ideal_set(ctx, max_scan)
    return out


# ---------------------------------------------------------------------------
# counting


def _nonempty_subsets(items: Sequence) -> list[tuple]:
    return [c for r in range(1, len(items) + 1) for c in combinations(items, r)]


def _rect(a: int, b: int) -> int:
    """Subsemigroups of an a-by-b rectangular band: 2^(a+b) - 2^a - 2^b + 1."""
    return 2 ** (a + b) - 2**a - 2**b + 1


def _sizes(ctx: SandwichContext) -> tuple[int, int, int, list[int]]:
    l, n = ctx.l, ctx.n
    sizes = [len(b) for b in ctx.blocks]
    p = math.prod(sizes)
    p_k = [p // s for s in sizes]
    return l ** (n - l), p, (l - 1) ** (n - l) if l >= 2 else 0, p_k


def count_F(ctx: SandwichContext) -> int:
    x, p, _, _ = _sizes(ctx)
    return _rect(x, p)


def count_H(ctx: SandwichContext, k: int, m: int) -> int:
    """Isolated subsemigroups inside one trifle/burdened layer T^(l-1,k,m)."""
    if ctx.l < 2 or k == m:
        return 0
    _, _, u, p_k = _sizes(ctx)
    return _rect(u, p_k[k - 1])


def count_K(ctx: SandwichContext) -> int:
    """K families for one unordered pair {k, m}."""
    if ctx.l < 2:
        return 0
    _, _, u, _ = _sizes(ctx)
    return 2**u - 1


def count_L(ctx: SandwichContext, k: int) -> int:
    if ctx.l < 2:
        return 0
    _, _, _, p_k = _sizes(ctx)
    return (2 ** (ctx.l - 1) - ctx.l) * (2 ** p_k[k - 1] - 1)


def family_counts(ctx: SandwichContext) -> dict[str, int]:
    """Number of families of each tag, summed with their full multiplicities."""
    l, n = ctx.l, ctx.n
    if l == 1:
        return {"RootUnion": 2**n - 1}
    return {
        "F": count_F(ctx),
        "H": sum(count_H(ctx, k, m) for k in range(1, l + 1) for m in range(1, l + 1) if k != m),
        "K": math.comb(l, 2) * count_K(ctx),
        "L": sum(count_L(ctx, k) for k in range(1, l + 1)),
        "Ideal": 1 if l > 2 else 0,
        "FUnionIdeal": count_F(ctx),
    }


def corollary_formula(ctx: SandwichContext) -> tuple[int, dict[str, int]]:
    """The published closed form for the number of isolated subsemigroups,
    with its summands labelled by the family they are meant to count."""
    l, n = ctx.l, ctx.n
    x, p, u, p_k = _sizes(ctx)
    if l == 1:
        terms = {"RootUnion": 2**n - 1}
    elif l == 2:
        s = 2 ** (n - 2)
        terms = {"F": 2 ** (s + p) - 2**s - 2**p + 1, "RootUnion": 2**n - 1}
    else:
        terms = {
            "K": sum(
                (2**u - 1) * (2 ** p_k[k - 1] - 1) * (2 ** p_k[m - 1] - 1)
                for k in range(2, l + 1)
                for m in range(1, k)
            ),
            "H": sum(l * _rect(u, p_k[k - 1]) for k in range(1, l + 1)),
            "L": sum((2 ** (l - 1) - l) * (2 ** p_k[k - 1] - 1) for k in range(1, l + 1)),
            "F+FUnionIdeal": 2 * _rect(x, p),
            "Ideal": 1,
        }
    return sum(terms.values()), terms


def rank2_root_union_list_count(ctx: SandwichContext) -> int | None:
    """Size of the published l = 2 list: F and F-with-ideal families plus every
    nonempty union of constant-map root classes."""
    if ctx.l != 2:
        return None
    return 2 * count_F(ctx) + 2**ctx.n - 1


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class Catalogue:
    families: list[Family]
    duplicates: list[tuple[FamilyDescriptor, FamilyDescriptor]]  # (dropped, kept)

    def by_set(self) -> dict[ElementSet, FamilyDescriptor]:
        return {f.elements: f.descriptor for f in self.families}


def _subset_unions(items: Sequence[int]) -> list[int]:
    """OR of every nonempty subset of bitsets, indexed by subset mask - 1."""
    out = [0] * (1 << len(items))
    for mask in range(1, 1 << len(items)):
        low = mask & -mask
        out[mask] = out[mask ^ low] | items[low.bit_length() - 1]
    return out[1:]


def _rect_families(
    kernels: list[Partition],
    images: list[Image],
    cls_of: dict[tuple[Partition, Image], int],
) -> list[tuple[tuple[Partition, ...], tuple[Image, ...], int]]:
    """(X, Y, bits) for every nonempty X and Y of a rectangular layer."""
    xs = _nonempty_subsets(kernels)
    ys = _nonempty_subsets(images)
    rows = {p: _subset_unions([cls_of[(p, y)] for y in images]) for p in kernels}
    out = []
    for yi, Y in enumerate(ys):
        # _nonempty_subsets orders by size, so map Y back to its subset mask
        mask = sum(1 << images.index(y) for y in Y)
        for X in xs:
            bits = 0
            for p in X:
                bits |= rows[p][mask - 1]
            out.append((X, Y, bits))
    return out


def _generate(ctx: SandwichContext, max_scan: int | None) -> list[Family]:
    n, l = ctx.n, ctx.l
    u = universe(ctx, max_scan)
    classes = {e: s.bits for e, s in u.class_sets.items()}
    out: list[Family] = []
    if l == 1:
        idem = [u.element(e) for e in u.idempotents.tolist()]
        for roots in _nonempty_subsets(idem):
            bits = 0
            for t in roots:
                bits |= classes[t.index]
            out.append(Family(FamilyDescriptor("RootUnion", roots=roots), ElementSet(n, bits)))
        return out

    layers = _layers(ctx)
    ideal = _ideal_set(ctx, max_scan).bits
    top_bits = {key: classes[eps.index] for key, eps in layers.top.items()}
    for X, Y, bits in _rect_families(layers.top_kernels, layers.top_images, top_bits):
        out.append(Family(FamilyDescriptor("F", X=X, Y=Y), ElementSet(n, bits)))
        out.append(Family(FamilyDescriptor("FUnionIdeal", X=X, Y=Y), ElementSet(n, bits | ideal)))

    lm1_bits = {
        km: {key: classes[eps.index] for key, eps in table.items()}
        for km, table in layers.lm1.items()
    }
    for (k, m), table in lm1_bits.items():
        for X, Y, bits in _rect_families(layers.lm1_kernels[(k, m)], layers.lm1_images[k], table):
            out.append(Family(FamilyDescriptor("H", k=k, m=m, X=X, Y=Y), ElementSet(n, bits)))

    for k in range(1, l + 1):
        for m in range(k + 1, l + 1):
            kernels = layers.lm1_kernels[(k, m)]
            per_kernel = {}
            for p in kernels:
                bits = 0
                for kk, mm in ((k, m), (m, k)):
                    for y in layers.lm1_images[kk]:
                        bits |= lm1_bits[(kk, mm)][(p, y)]
                per_kernel[p] = bits
            for X in _nonempty_subsets(kernels):
                bits = 0
                for p in X:
                    bits |= per_kernel[p]
                out.append(Family(FamilyDescriptor("K", k=k, m=m, X=X), ElementSet(n, bits)))

    for k in range(1, l + 1):
        images = layers.lm1_images[k]
        others = [a for i, a in enumerate(ctx.reps, start=1) if i != k]
        # per burdened a_m: the union over all kernels, one entry per image
        per_burdened = {}
        for a in others:
            m = ctx.rep_index(a)
            per_burdened[a] = {
                y: _or(lm1_bits[(k, m)][(p, y)] for p in layers.lm1_kernels[(k, m)])
                for y in images
            }
        for M in _nonempty_subsets(others):
            if len(M) < 2:
                continue
            for Y in _nonempty_subsets(images):
                bits = 0
                for a in M:
                    for y in Y:
                        bits |= per_burdened[a][y]
                out.append(Family(FamilyDescriptor("L", k=k, M=M, Y=Y), ElementSet(n, bits)))

    if l > 2:
        out.append(Family(FamilyDescriptor("Ideal"), ElementSet(n, ideal)))
    return out


def _or(values) -> int:
    bits = 0
    for v in values:
        bits |= v
    return bits


def expected_family_total(ctx: SandwichContext) -> int:
    return sum(family_counts(ctx).values())


@lru_cache(maxsize=16)
def _catalogue(ctx: SandwichContext) -> Catalogue:
    raw = _generate(ctx, max_scan=ctx.n**ctx.n)  # guard already applied by the caller
    kept: dict[ElementSet, FamilyDescriptor] = {}
    duplicates = []
    for fam in sorted(raw, key=lambda f: f.descriptor.sort_key()):
        prev = kept.get(fam.elements)
        if prev is None:
            kept[fam.elements] = fam.descriptor
        else:
            duplicates.append((fam.descriptor, prev))
    families = [Family(d, s) for s, d in kept.items()]
    families.sort(key=lambda f: f.descriptor.sort_key())
    return Catalogue(families, duplicates)


def isolated_catalogue(
    ctx: SandwichContext,
    max_scan: int | None = None,
    max_families: int = DEFAULT_MAX_FAMILIES,
) -> Catalogue:
    """Every family of the classification, materialised and deduplicated by set."""
    universe(ctx, max_scan)  # guard
    expected = expected_family_total(ctx)
    if expected > max_families:
        raise ScanLimitError(
            f"{expected} families to materialise, above the bound max_families={max_families}"
        )
    return _catalogue(ctx)


def enumerate_isolated(
    ctx: SandwichContext,
    max_scan: int | None = None,
    max_families: int = DEFAULT_MAX_FAMILIES,
) -> list[Family]:
    return isolated_catalogue(ctx, max_scan, max_families).families


def _canonical(
    cat: Catalogue, ctx: SandwichContext, descriptors: list[FamilyDescriptor], max_scan
) -> list[Family]:
    index = cat.by_set()
    out = {}
    for d in descriptors:
        s = family_elements(ctx, d, max_scan)
        if s not in index:
            raise AssertionError(f"{d} is not in the isolated list")
        out[s] = index[s]
    fams = [Family(d, s) for s, d in out.items()]
    fams.sort(key=lambda f: f.descriptor.sort_key())
    return fams


def _global(ctx: SandwichContext) -> tuple[list[Partition], list[Image]]:
    layers = _layers(ctx)
    return layers.top_kernels, layers.top_images


def _whole(ctx: SandwichContext) -> FamilyDescriptor:
    if ctx.l == 1:
        u = universe(ctx)
        return FamilyDescriptor("RootUnion", roots=tuple(u.element(e) for e in u.idempotents.tolist()))
    kernels, images = _global(ctx)
    return FamilyDescriptor("FUnionIdeal", X=tuple(kernels), Y=tuple(images))


def enumerate_completely_isolated(
    ctx: SandwichContext, max_scan: int | None = None
) -> list[Family]:
    cat = isolated_catalogue(ctx, max_scan)
    if ctx.l == 1:
        return list(cat.families)
    kernels, images = _global(ctx)
    ds = [
        _whole(ctx),
        FamilyDescriptor("F", X=tuple(kernels), Y=tuple(images)),
        FamilyDescriptor("Ideal"),
    ]
    for X in _nonempty_subsets(kernels)[:-1]:
        ds.append(FamilyDescriptor("F", X=X, Y=tuple(images)))
        ds.append(FamilyDescriptor("FUnionIdeal", X=X, Y=tuple(images)))
    for Y in _nonempty_subsets(images)[:-1]:
        ds.append(FamilyDescriptor("F", X=tuple(kernels), Y=Y))
        ds.append(FamilyDescriptor("FUnionIdeal", X=tuple(kernels), Y=Y))
    return _canonical(cat, ctx, ds, max_scan)


def enumerate_one_sided_convex(
    ctx: SandwichContext, side: str, max_scan: int | None = None
) -> list[Family]:
    """Right convex: xy in T forces y in T. Left convex: forces x in T."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    cat = isolated_catalogue(ctx, max_scan)
    if ctx.l == 1:
        if side == "right":
            return list(cat.families)
        return _canonical(cat, ctx, [_whole(ctx)], max_scan)
    kernels, images = _global(ctx)
    ds = [_whole(ctx)]
    if side == "right":
        ds += [FamilyDescriptor("F", X=tuple(kernels), Y=Y) for Y in _nonempty_subsets(images)]
    else:
        ds += [FamilyDescriptor("F", X=X, Y=tuple(images)) for X in _nonempty_subsets(kernels)]
    return _canonical(cat, ctx, ds, max_scan)


def enumerate_convex(ctx: SandwichContext, max_scan: int | None = None) -> list[Family]:
    cat = isolated_catalogue(ctx, max_scan)
    ds = [_whole(ctx)]
    if ctx.l >= 2:
        kernels, images = _global(ctx)
        ds.append(FamilyDescriptor("F", X=tuple(kernels), Y=tuple(images)))
    return _canonical(cat, ctx, ds, max_scan)


# ---------------------------------------------------------------------------
# reports and derived structure


def count_isolated_formula(
    ctx: SandwichContext,
    enumerate_families: bool = True,
    max_scan: int | None = None,
    max_families: int = DEFAULT_MAX_FAMILIES,
) -> dict:
    """Closed-form counts next to the materialised family count.

    ``formula`` is the published corollary; ``family_total`` sums the
    per-family counts with their multiplicities. The enumeration is
    authoritative when they disagree.
    """
    formula, terms = corollary_formula(ctx)
    per_family = family_counts(ctx)
    report = {
        "formula": formula,
        "formula_terms": terms,
        "per_family": per_family,
        "family_total": sum(per_family.values()),
        "enumerated": None,
        "enumeration_status": "not requested",
    }
    l2 = rank2_root_union_list_count(ctx)
    if l2 is not None:
        report["rank2_listed"] = l2
    if enumerate_families:
        try:
            report["enumerated"] = len(enumerate_isolated(ctx, max_scan, max_families))
            report["enumeration_status"] = "done"
        except ScanLimitError as exc:
            report["enumeration_status"] = f"skipped: {exc}"
    enumerated = report["enumerated"]
    report["match"] = None if enumerated is None else formula == enumerated
    report["family_match"] = None if enumerated is None else report["family_total"] == enumerated
    return report


def minimal_isolated(
    ctx: SandwichContext, beta: Transformation, max_scan: int | None = None
) -> ElementSet:
    """The least isolated subsemigroup containing beta.

    Works on root classes: a class is added whenever a product of two
    collected classes meets it, until nothing changes.
    """
    u = universe(ctx, max_scan)
    start = int(u.root[beta.index])
    products = u.class_products
    have = {start}
    frontier = [start]
    while frontier:
        new = set()
        for e in frontier:
            for f in list(have):
                new |= products[(e, f)] | products[(f, e)]
        new -= have
        have |= new
        frontier = list(new)
    return u.set_of_roots(have)


@dataclass(frozen=True)
class ConvexCongruence:
    convex: list[Family]
    classes: list[ElementSet]
    is_congruence: bool
    classes_isolated: bool
    convex_are_unions: bool


def convex_congruence(ctx: SandwichContext, max_scan: int | None = None) -> ConvexCongruence:
    """Classes cut out by the proper convex subsemigroups and their complements."""
    u = universe(ctx, max_scan)
    convex = enumerate_convex(ctx, max_scan)
    full = ElementSet.full(ctx.n)
    proper = [f.elements for f in convex if f.elements != full]
    signature = np.zeros(u.size, dtype=np.int64)
    for bit, s in enumerate(proper):
        signature |= s.to_mask().astype(np.int64) << bit
    labels, label_of = np.unique(signature, return_inverse=True)
    classes = [ElementSet.from_mask(ctx.n, label_of == i) for i in range(len(labels))]
    table = u.table
    prod_label = label_of[table]
    is_congruence = True
    for i in range(len(classes)):
        rows = label_of == i
        for j in range(len(classes)):
            cols = label_of == j
            if len(np.unique(prod_label[np.ix_(rows, cols)])) != 1:
                is_congruence = False
    root = u.root
    isolated = True
    for i, c in enumerate(classes):
        rows = label_of == i
        closed = bool((label_of[table[np.ix_(rows, rows)]] == i).all())
        root_closed = bool((label_of[root[rows]] == i).all()) and bool(
            (label_of[np.isin(root, root[rows])] == i).all()
        )
        isolated = isolated and closed and root_closed
    unions = all(
        s == _union_of(ctx.n, [c for c in classes if c.issubset(s)]) for s in proper
    )
    classes.sort(key=lambda s: s.sort_key())
    return ConvexCongruence(convex, classes, is_congruence, isolated, unions)


def _union_of(n: int, sets: list[ElementSet]) -> ElementSet:
    bits = 0
    for s in sets:
        bits |= s.bits
    return ElementSet(n, bits)


def rank2_root_union_crosscheck(ctx: SandwichContext, max_scan: int | None = None) -> list[dict]:
    """For l = 2: every nonempty union of constant-map root classes, whether it
    is closed under *, and which catalogue family (if any) realises it."""
    if ctx.l != 2:
        raise ValueError("only meaningful for l = 2")
    u = universe(ctx, max_scan)
    index = isolated_catalogue(ctx, max_scan).by_set()
    products = u.class_products
    consts = [Transformation.constant(ctx.n, i).index for i in range(1, ctx.n + 1)]
    out = []
    for X in _nonempty_subsets(consts):
        chosen = set(X)
        closed = all(products[(e, f)] <= chosen for e in X for f in X)
        s = u.set_of_roots(X)
        d = index.get(s)
        out.append(
            {
                "roots": [str(u.element(e)) for e in X],
                "closed": closed,
                "family": None if d is None else str(d),
            }
        )
    return out
