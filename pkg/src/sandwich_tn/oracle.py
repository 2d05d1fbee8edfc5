"""Definition-level brute force over the whole multiplication table.

Nothing here uses the family machinery of :mod:`sandwich_tn.classification`;
only the dense product table is shared, so the two routes stay independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .elements import ElementSet
from .transform import SandwichContext, ScanLimitError
from .universe import universe

DEFAULT_MAX_SUBSETS = 22
_CHUNK = 1 << 16


class _Table:
    """Product table plus root classes recomputed from the table alone."""

    def __init__(self, ctx: SandwichContext, max_scan: int | None) -> None:
        self.ctx = ctx
        self.n = ctx.n
        self.table = universe(ctx, max_scan).table.astype(np.int64)
        self.size = len(self.table)

    @cached_property
    def diagonal(self) -> np.ndarray:
        return self.table[np.arange(self.size), np.arange(self.size)]

    @cached_property
    def idempotents(self) -> np.ndarray:
        return np.flatnonzero(self.diagonal == np.arange(self.size))

    @cached_property
    def root(self) -> np.ndarray:
        """Idempotent power of every element, by walking x, x^2, x^3, ..."""
        base = np.arange(self.size)
        root = np.full(self.size, -1)
        cur = base.copy()
        while (root < 0).any():
            hit = (root < 0) & (self.diagonal[cur] == cur)
            root[hit] = cur[hit]
            cur = self.table[cur, base]
        return root

    @cached_property
    def class_masks(self) -> dict[int, np.ndarray]:
        return {int(e): self.root == e for e in self.idempotents}

    @cached_property
    def class_relation(self) -> np.ndarray:
        """``rel[i, j]``: bitmask over idempotent positions met by C_i * C_j."""
        idem = self.idempotents
        k = len(idem)
        label = np.searchsorted(idem, self.root)
        hit = np.zeros((k, k, k), dtype=bool)
        target = label[self.table]
        hit[label[:, None], label[None, :], target] = True
        rel = np.zeros((k, k), dtype=object)
        for i, j, m in zip(*np.nonzero(hit)):
            rel[i, j] = int(rel[i, j]) | (1 << int(m))
        return rel


@lru_cache(maxsize=16)
def _cached_table(ctx: SandwichContext) -> _Table:
    return _Table(ctx, ctx.n**ctx.n)


def _table(ctx: SandwichContext, max_scan: int | None) -> _Table:
    universe(ctx, max_scan)  # guard
    return _cached_table(ctx)


def _mask(ctx: SandwichContext, S: ElementSet) -> np.ndarray:
    if S.n != ctx.n:
        raise ValueError(f"degree mismatch: set over T_{S.n}, context T_{ctx.n}")
    if not S:
        raise ValueError("subsemigroups are nonempty; got the empty set")
    return S.to_mask()


def is_subsemigroup(ctx: SandwichContext, S: ElementSet, max_scan: int | None = None) -> bool:
    t = _table(ctx, max_scan)
    m = _mask(ctx, S)
    idx = np.flatnonzero(m)
    return bool(m[t.table[np.ix_(idx, idx)]].all())


def closure(ctx: SandwichContext, S: ElementSet, max_scan: int | None = None) -> ElementSet:
    """Least *-closed superset of S."""
    t = _table(ctx, max_scan)
    m = _mask(ctx, S).copy()
    while True:
        idx = np.flatnonzero(m)
        grown = m.copy()
        grown[t.table[np.ix_(idx, idx)].ravel()] = True
        if (grown == m).all():
            return ElementSet.from_mask(ctx.n, m)
        m = grown


def _require_semigroup(ctx, S, max_scan) -> np.ndarray:
    if not is_subsemigroup(ctx, S, max_scan):
        raise ValueError("input is not a subsemigroup")
    return S.to_mask()


def is_isolated_def(ctx: SandwichContext, S: ElementSet, max_scan: int | None = None) -> bool:
    """x^m in S for some m > 0 implies x in S, checked over every x.

    Powers x^j and x^(2j) advance together; once they coincide for every x,
    all powers up to the tail plus the period have been visited.
    """
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    base = np.arange(t.size)
    slow = base.copy()
    fast = base.copy()
    touched = m[base].copy()
    while True:
        slow = t.table[slow, base]
        fast = t.table[fast, base]
        touched |= m[fast]
        fast = t.table[fast, base]
        touched |= m[fast]
        if (slow == fast).all():
            break
    return not (touched & ~m).any()


def _product_in(t: _Table, m: np.ndarray) -> np.ndarray:
    return m[t.table]


def is_ci_def(ctx, S, max_scan=None) -> bool:
    """xy in S implies x in S or y in S."""
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    bad = _product_in(t, m) & ~m[:, None] & ~m[None, :]
    return not bad.any()


def is_rc_def(ctx, S, max_scan=None) -> bool:
    """xy in S implies y in S."""
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    return not (_product_in(t, m) & ~m[None, :]).any()


def is_lc_def(ctx, S, max_scan=None) -> bool:
    """xy in S implies x in S."""
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    return not (_product_in(t, m) & ~m[:, None]).any()


def is_convex_def(ctx, S, max_scan=None) -> bool:
    """xy in S implies x in S and y in S."""
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    inside = _product_in(t, m)
    return not (inside & ~(m[:, None] & m[None, :])).any()


# complement forms: the complement is empty, or a subsemigroup / left ideal /
# right ideal / two-sided ideal


def _complement(ctx, S, max_scan):
    t = _table(ctx, max_scan)
    m = _require_semigroup(ctx, S, max_scan)
    return t, ~m


def ci_by_complement(ctx, S, max_scan=None) -> bool:
    t, c = _complement(ctx, S, max_scan)
    if not c.any():
        return True
    idx = np.flatnonzero(c)
    return bool(c[t.table[np.ix_(idx, idx)]].all())


def rc_by_complement(ctx, S, max_scan=None) -> bool:
    """Complement is a left ideal: T_n * C within C."""
    t, c = _complement(ctx, S, max_scan)
    if not c.any():
        return True
    return bool(c[t.table[:, c]].all())


def lc_by_complement(ctx, S, max_scan=None) -> bool:
    """Complement is a right ideal: C * T_n within C."""
    t, c = _complement(ctx, S, max_scan)
    if not c.any():
        return True
    return bool(c[t.table[c, :]].all())


def convex_by_complement(ctx, S, max_scan=None) -> bool:
    return rc_by_complement(ctx, S, max_scan) and lc_by_complement(ctx, S, max_scan)


PREDICATES = {
    "isolated": is_isolated_def,
    "completely_isolated": is_ci_def,
    "left_convex": is_lc_def,
    "right_convex": is_rc_def,
    "convex": is_convex_def,
}

COMPLEMENT_PREDICATES = {
    "completely_isolated": ci_by_complement,
    "left_convex": lc_by_complement,
    "right_convex": rc_by_complement,
    "convex": convex_by_complement,
}


# ---------------------------------------------------------------------------
# exhaustive enumeration of isolated subsemigroups


def root_classes(ctx: SandwichContext, max_scan: int | None = None) -> dict[int, ElementSet]:
    t = _table(ctx, max_scan)
    return {e: ElementSet.from_mask(ctx.n, m) for e, m in t.class_masks.items()}


def _union_sets(ctx: SandwichContext, t: _Table, subsets: list[int]) -> list[ElementSet]:
    idem = t.idempotents
    bits = [ElementSet.from_mask(ctx.n, t.class_masks[int(e)]).bits for e in idem]
    out = []
    for sub in subsets:
        acc = 0
        j = 0
        while sub:
            if sub & 1:
                acc |= bits[j]
            sub >>= 1
            j += 1
        out.append(ElementSet(ctx.n, acc))
    return out


def _scan_closed(rel: np.ndarray) -> list[int]:
    """Every nonempty subset U of idempotent positions with rel[i, j] within U
    for all i, j in U, by testing all 2^k masks in chunks."""
    k = len(rel)
    pairs = [(i, j, int(rel[i, j])) for i in range(k) for j in range(k)]
    found = []
    total = 1 << k
    for start in range(1, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ok = np.ones(len(masks), dtype=bool)
        for i, j, r in pairs:
            if r == 0:
                continue
            has = ((masks >> i) & 1).astype(bool) & ((masks >> j) & 1).astype(bool)
            ok &= ~(has & ((masks & r) != r))
        found.extend(masks[ok].tolist())
    return found


def _next_closure(rel: np.ndarray) -> list[int]:
    """All closed sets of the binary closure system via Ganter's NextClosure."""
    k = len(rel)
    rows = [[int(rel[i, j]) for j in range(k)] for i in range(k)]

    def close(s: int) -> int:
        frontier = s
        while frontier:
            new = 0
            f = frontier
            while f:
                low = f & -f
                i = low.bit_length() - 1
                f ^= low
                row = rows[i]
                m = s
                while m:
                    lowj = m & -m
                    j = lowj.bit_length() - 1
                    m ^= lowj
                    new |= row[j] | rows[j][i]
            new &= ~s
            s |= new
            frontier = new
        return s

    found = []
    current = close(0)
    if current:
        found.append(current)
    full = (1 << k) - 1
    while current != full:
        for i in range(k - 1, -1, -1):
            bit = 1 << i
            if current & bit:
                continue
            below = current & (bit - 1)
            candidate = close(below | bit)
            if candidate & (bit - 1) == below:
                current = candidate
                found.append(current)
                break
        else:
            break
    return found


def brute_isolated_all(
    ctx: SandwichContext,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
    pruned: bool = False,
    max_scan: int | None = None,
) -> list[ElementSet]:
    """Every isolated subsemigroup, as the *-closed unions of root classes.

    Without ``pruned`` all 2^|E| subsets of idempotents are tested, refused
    when |E| > ``max_subsets``. With ``pruned`` the closed unions are listed
    directly by NextClosure, for any |E|.
    """
    t = _table(ctx, max_scan)
    k = len(t.idempotents)
    if pruned:
        subsets = _next_closure(t.class_relation)
    else:
        if k > max_subsets:
            raise ScanLimitError(
                f"|E| = {k} idempotents needs 2^{k} subsets, above max_subsets={max_subsets}"
            )
        subsets = _scan_closed(t.class_relation)
    sets = sorted(set(_union_sets(ctx, t, subsets)), key=ElementSet.sort_key)
    for s in sets:
        if not is_subsemigroup(ctx, s, max_scan):
            raise AssertionError("closed union of root classes is not a subsemigroup")
    return sets


# ---------------------------------------------------------------------------
# comparison against the classification


@dataclass
class Section:
    status: str  # "pass" | "fail" | "skipped"
    detail: dict

    def to_dict(self) -> dict:
        return {"status": self.status, **self.detail}


def _diff(expected: list[ElementSet], got: list[ElementSet], labels: dict) -> dict:
    exp, have = set(expected), set(got)
    return {
        "expected": len(exp),
        "listed": len(have),
        "missing": sorted((_describe(s, labels) for s in exp - have), key=str),
        "extra": sorted((_describe(s, labels) for s in have - exp), key=str),
    }


def _describe(s: ElementSet, labels: dict) -> str:
    if s in labels:
        return labels[s]
    return f"<{len(s)} elements: " + ",".join(str(t) for t in s.elements()[:4]) + ",...>"


def verify_classification(
    ctx: SandwichContext,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
    pruned: bool = False,
    max_scan: int | None = None,
) -> dict:
    """Compare the classification lists against definitional brute force."""
    from . import classification as cl
    from .idempotents import count_idempotents_formula

    sections: dict[str, Section] = {}
    try:
        t = _table(ctx, max_scan)
    except ScanLimitError as exc:
        return {
            "context": {"n": ctx.n, "alpha": str(ctx.alpha), "l": ctx.l},
            "sections": {"all": {"status": "skipped", "reason": str(exc)}},
            "verdict": "partial(skips)",
        }

    formula_e = count_idempotents_formula(ctx)
    sections["idempotents"] = Section(
        "pass" if formula_e == len(t.idempotents) else "fail",
        {"scanned": len(t.idempotents), "formula": formula_e},
    )

    isolated = cl.enumerate_isolated(ctx, max_scan)
    labels = {f.elements: str(f.descriptor) for f in isolated}
    listed = {
        "isolated": [f.elements for f in isolated],
        "completely_isolated": [f.elements for f in cl.enumerate_completely_isolated(ctx, max_scan)],
        "left_convex": [f.elements for f in cl.enumerate_one_sided_convex(ctx, "left", max_scan)],
        "right_convex": [f.elements for f in cl.enumerate_one_sided_convex(ctx, "right", max_scan)],
        "convex": [f.elements for f in cl.enumerate_convex(ctx, max_scan)],
    }

    # definitional checks of every listed set, independent of the brute list
    failures = []
    for kind, sets in listed.items():
        for s in sets:
            ok = is_subsemigroup(ctx, s, max_scan) and PREDICATES[kind](ctx, s, max_scan)
            if kind in COMPLEMENT_PREDICATES:
                ok = ok and COMPLEMENT_PREDICATES[kind](ctx, s, max_scan)
            if not ok:
                failures.append(f"{kind}: {_describe(s, labels)}")
    distinct = len(set(listed["isolated"])) == len(listed["isolated"])
    sections["definitional"] = Section(
        "pass" if not failures and distinct else "fail",
        {"failures": failures, "isolated_distinct": distinct,
         "checked": sum(len(v) for v in listed.values())},
    )

    try:
        brute = brute_isolated_all(ctx, max_subsets, pruned, max_scan)
    except ScanLimitError as exc:
        brute = None
        for kind in listed:
            sections[kind] = Section("skipped", {"reason": str(exc)})
    if brute is not None:
        filtered = {"isolated": brute}
        for kind in ("completely_isolated", "left_convex", "right_convex", "convex"):
            filtered[kind] = [s for s in brute if PREDICATES[kind](ctx, s, max_scan)]
        for kind, expected in filtered.items():
            d = _diff(expected, listed[kind], labels)
            sections[kind] = Section("pass" if not d["missing"] and not d["extra"] else "fail", d)

    counts = cl.count_isolated_formula(ctx, max_scan=max_scan)
    oracle_count = None if brute is None else len(brute)
    counts["oracle"] = oracle_count
    counts["formula_matches_oracle"] = None if brute is None else counts["formula"] == oracle_count
    counts["family_total_matches_oracle"] = (
        None if brute is None else counts["family_total"] == oracle_count
    )
    fam_ok = counts["family_total"] == counts["enumerated"] and (
        brute is None or counts["family_total"] == oracle_count
    )
    # the published closed form is reported, never a pass/fail condition
    sections["counts"] = Section("pass" if fam_ok else "fail", counts)

    statuses = [s.status for s in sections.values()]
    if "fail" in statuses:
        verdict = "fail"
    elif "skipped" in statuses:
        verdict = "partial(skips)"
    else:
        verdict = "pass"
    return {
        "context": {"n": ctx.n, "alpha": str(ctx.alpha), "l": ctx.l},
        "sections": {name: s.to_dict() for name, s in sections.items()},
        "verdict": verdict,
    }
