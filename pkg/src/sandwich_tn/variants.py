"""Isomorphism types of variants and reduction to an idempotent sandwich element."""

from __future__ import annotations

from dataclasses import dataclass

from .transform import Partition, SandwichContext, Transformation


def kernel_type(alpha: Transformation) -> tuple[int, ...]:
    """Kernel block sizes of ``alpha``, sorted descending."""
    return alpha.kernel().sizes()


def variants_isomorphic(alpha1: Transformation, alpha2: Transformation) -> bool:
    """Whether (T_n, *_alpha1) and (T_n, *_alpha2) are isomorphic.

    Two variants are isomorphic exactly when the sandwich elements have the
    same number of kernel blocks of every size.
    """
    if alpha1.n != alpha2.n:
        raise ValueError(f"degree mismatch: {alpha1.n} vs {alpha2.n}")
    return kernel_type(alpha1) == kernel_type(alpha2)


@dataclass(frozen=True)
class Normalization:
    input: Transformation
    context: SandwichContext

    @property
    def changed(self) -> bool:
        return self.context.alpha != self.input

    def to_dict(self) -> dict:
        ctx = self.context
        return {
            "input": str(self.input),
            "normalized": str(ctx.alpha),
            "changed": self.changed,
            "l": ctx.l,
            "blocks": str(Partition(ctx.blocks)),
            "reps": list(ctx.reps),
            "kernel_type": list(kernel_type(self.input)),
        }


def normalize_sandwich(alpha: Transformation) -> Normalization:
    """An idempotent with the kernel of ``alpha``, mapping each block to its minimum."""
    images = [0] * alpha.n
    for block in alpha.kernel():
        for x in block:
            images[x - 1] = block[0]
    return Normalization(alpha, SandwichContext(Transformation(tuple(images))))


def context_for(alpha: Transformation) -> SandwichContext:
    """``alpha`` itself when idempotent, else its normalization."""
    try:
        return SandwichContext(alpha)
    except ValueError:
        return normalize_sandwich(alpha).context
