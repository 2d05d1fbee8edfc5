"""Variants of the full transformation semigroup and their isolated subsemigroups."""

from .elements import ElementSet
from .transform import (
    Partition,
    SandwichContext,
    ScanLimitError,
    StableData,
    Transformation,
    compose,
    idempotent_power,
    image,
    kernel,
    parse_partition,
    parse_transformation,
    rank,
    sandwich_product,
    stable_data,
)
from .variants import context_for, kernel_type, normalize_sandwich, variants_isomorphic

__all__ = [
    "ElementSet",
    "Partition",
    "SandwichContext",
    "ScanLimitError",
    "StableData",
    "Transformation",
    "compose",
    "context_for",
    "idempotent_power",
    "image",
    "kernel",
    "kernel_type",
    "normalize_sandwich",
    "parse_partition",
    "parse_transformation",
    "rank",
    "sandwich_product",
    "stable_data",
    "variants_isomorphic",
]

__version__ = "0.1.0"
