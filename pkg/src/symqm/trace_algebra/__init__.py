"""Symbolic algebra of single-trace operators built from adjoint oscillators."""

from .expr import (
    TraceExpr,
    TraceMonomial,
    UnsupportedReduction,
    cayley_hamilton_reduce,
    commutator,
    fierz_contract,
    normal_order,
    vacuum_expectation,
)
from .newton import elementary_symmetric, power_sum, reduce_poly
from .polynomial import annihilate, create, partition_poly, poly_to_partitions
from .words import ANNIHILATE, CREATE, TraceWord

__all__ = [
    "ANNIHILATE",
    "CREATE",
    "TraceExpr",
    "TraceMonomial",
    "TraceWord",
    "UnsupportedReduction",
    "annihilate",
    "cayley_hamilton_reduce",
    "commutator",
    "create",
    "elementary_symmetric",
    "fierz_contract",
    "normal_order",
    "partition_poly",
    "poly_to_partitions",
    "power_sum",
    "reduce_poly",
    "vacuum_expectation",
]
