"""Exact dyadic Hilbert transform (Haar shift) restricted to dyadic intervals."""

from .scalar import Sqrt2Scalar, format_scalar, parse_scalar
from .dyadic import (
    DyadicInterval,
    HalfLineSign,
    apex,
    child_sign,
    children,
    epsilon_child,
    haar_value,
    meet,
    parent,
    reflect,
    shift_haar_value,
)
from .haar import DyadicFunction, LeafVector, analyze, synthesize
from .shift import (
    CaseClass,
    RestrictedShiftForm,
    ancestor_sum,
    classify,
    interior_norm2,
    restricted_indicator_shift,
    restricted_shift,
    shift_full,
    shift_zero_mean,
)

__version__ = "0.1.0"

__all__ = [
    "Sqrt2Scalar", "format_scalar", "parse_scalar",
    "DyadicInterval", "HalfLineSign", "apex", "child_sign", "children", "epsilon_child",
    "haar_value", "meet", "parent", "reflect", "shift_haar_value",
    "DyadicFunction", "LeafVector", "analyze", "synthesize",
    "CaseClass", "RestrictedShiftForm", "ancestor_sum", "classify", "interior_norm2",
    "restricted_indicator_shift", "restricted_shift", "shift_full", "shift_zero_mean",
]
