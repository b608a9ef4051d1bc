"""Exact tools for monovex box complexes: monotone paths, contractions, retractions, homology."""

from .dyadic import Dyadic, exact
from .geometry import (
    BoxRegion,
    DimensionMismatch,
    Interval,
    Lattice,
    SpanComplex,
    box,
    cheb_distance,
    contains,
    is_subset,
    minkowski_box,
    project,
)
from .homology import CubicalComplex, betti_numbers, poset_betti
from .paths import MonotonePath, is_monovex, monotone_reachable, validate_monotone

__all__ = [
    "BoxRegion",
    "CubicalComplex",
    "DimensionMismatch",
    "Dyadic",
    "Interval",
    "Lattice",
    "MonotonePath",
    "SpanComplex",
    "betti_numbers",
    "box",
    "cheb_distance",
    "contains",
    "exact",
    "is_monovex",
    "is_subset",
    "minkowski_box",
    "monotone_reachable",
    "poset_betti",
    "project",
    "validate_monotone",
]
