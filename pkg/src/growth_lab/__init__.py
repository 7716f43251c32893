"""Exact experiments on the growth of A(A+1) and related product sets."""

from growth_lab.errors import AuditFailure, CapabilityError, GrowthLabError
from growth_lab.field_core import (
    DlogTable,
    PrimeField,
    build_dlog_table,
    find_primitive_root,
    is_prime,
    mod_inverse,
)
from growth_lab.set_arith import FpSet, PairRelation

__all__ = [
    "AuditFailure",
    "CapabilityError",
    "DlogTable",
    "FpSet",
    "GrowthLabError",
    "PairRelation",
    "PrimeField",
    "build_dlog_table",
    "find_primitive_root",
    "is_prime",
    "mod_inverse",
]

__version__ = "0.1.0"
