"""Dyadic intervals ``[l 2^k, (l+1) 2^k)`` and the combinatorial symbols on them.

An interval is identified by the integer pair (scale ``k``, index ``l``),
so equality and hashing never touch rational endpoints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .scalar import Sqrt2Scalar, pow2, pow2_half


class HalfLineSign(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1

    def flipped(self) -> "HalfLineSign":
        return HalfLineSign(-self.value)


@dataclass(frozen=True, order=True)
class DyadicInterval:
    scale: int
    index: int

    def __post_init__(self):
        if type(self.scale) is not int or type(self.index) is not int:
            raise TypeError("scale and index must be integers")

    @classmethod
    def parse(cls, text: str) -> "DyadicInterval":
        """Parse the ``"k:l"`` syntax, e.g. ``"-1:5"`` is [5/2, 3)."""
        try:
            k, l = text.strip().split(":")
            return cls(int(k), int(l))
        except (ValueError, AttributeError):
            raise ValueError(f"interval must look like 'k:l', got {text!r}") from None

    def __str__(self) -> str:
        return f"{self.scale}:{self.index}"

    @property
    def size(self) -> Fraction:
        return pow2(self.scale)

    @property
    def left(self) -> Fraction:
        return self.index * pow2(self.scale)

    @property
    def right(self) -> Fraction:
        return (self.index + 1) * pow2(self.scale)

    @property
    def center(self) -> Fraction:
        return (2 * self.index + 1) * pow2(self.scale - 1)

    @property
    def half_line(self) -> HalfLineSign:
        return HalfLineSign.POSITIVE if self.index >= 0 else HalfLineSign.NEGATIVE

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return children(self)

    def parent(self) -> "DyadicInterval":
        return parent(self)

    def ancestor(self, scale: int) -> "DyadicInterval":
        """The dyadic interval of the given (larger or equal) scale containing self."""
        if scale < self.scale:
            raise ValueError(f"scale {scale} is below {self.scale}")
        return DyadicInterval(scale, self.index >> (scale - self.scale))

    def contains(self, other: "DyadicInterval") -> bool:
        """Set inclusion ``other ⊆ self``."""
        return other.scale <= self.scale and (other.index >> (self.scale - other.scale)) == self.index

    def strictly_contains(self, other: "DyadicInterval") -> bool:
        return other.scale < self.scale and (other.index >> (self.scale - other.scale)) == self.index

    def intersects(self, other: "DyadicInterval") -> bool:
        return self.contains(other) or other.contains(self)

    def is_zero_anchored(self) -> bool:
        return self.index in (0, -1)

    def subintervals(self, depth: int) -> Iterator["DyadicInterval"]:
        """The 2^depth descendants at ``scale - depth``, left to right."""
        base = self.index << depth
        k = self.scale - depth
        for j in range(1 << depth):
            yield DyadicInterval(k, base + j)

    def to_float_endpoints(self) -> tuple[float, float]:
        return float(self.left), float(self.right)


def children(I: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
    """``(I_-, I_+)``: the left and right halves."""
    return DyadicInterval(I.scale - 1, 2 * I.index), DyadicInterval(I.scale - 1, 2 * I.index + 1)


def parent(I: DyadicInterval) -> DyadicInterval:
    return DyadicInterval(I.scale + 1, I.index >> 1)


def child_sign(I: DyadicInterval) -> int:
    """+1 if I is the right child of its parent, -1 if the left one."""
    return 1 if I.index & 1 else -1


def epsilon_child(K: DyadicInterval, I: DyadicInterval) -> int:
    """+1 if ``K ⊆ I_+``, -1 if ``K ⊆ I_-``; requires ``K ⊊ I``."""
    if not I.strictly_contains(K):
        raise ValueError(f"{K} is not strictly inside {I}")
    return 1 if (K.index >> (I.scale - 1 - K.scale)) & 1 else -1


def meet(I: DyadicInterval, K: DyadicInterval) -> Optional[DyadicInterval]:
    """Minimal dyadic interval containing both, or None across the origin."""
    if (I.index >= 0) != (K.index >= 0):
        return None
    k = max(I.scale, K.scale)
    a, b = I.index >> (k - I.scale), K.index >> (k - K.scale)
    while a != b:
        a >>= 1
        b >>= 1
        k += 1
    return DyadicInterval(k, a)


def apex_scale(I: DyadicInterval) -> int:
    l = I.index
    return I.scale + (l if l >= 0 else ~l).bit_length()


def apex(I: DyadicInterval) -> DyadicInterval:
    """Smallest zero-anchored ancestor: [0, 2^M) on the right, [-2^M, 0) on the left."""
    return DyadicInterval(apex_scale(I), 0 if I.index >= 0 else -1)


def reflect(I: DyadicInterval) -> DyadicInterval:
    """The interval ``-I`` (re-oriented to be half-open)."""
    return DyadicInterval(I.scale, -I.index - 1)


def haar_value(L: DyadicInterval, K: DyadicInterval) -> Sqrt2Scalar:
    """Value of h_L on K, for K inside one child of L."""
    return pow2_half(-L.scale) * epsilon_child(K, L)


def shift_sign(L: DyadicInterval, K: DyadicInterval) -> int:
    """Sign of Ш h_L on K, for K inside a grandchild of L.

    Ш h_L is +|L|^(-1/2) on (L_+)_+ and (L_-)_-, and -|L|^(-1/2) on the
    two middle grandchildren.
    """
    if K.scale > L.scale - 2 or (K.index >> (L.scale - K.scale)) != L.index:
        raise ValueError(f"{K} is not inside a grandchild of {L}")
    d = L.scale - K.scale
    s = (K.index >> (d - 1)) & 1
    t = (K.index >> (d - 2)) & 1
    return 1 if s == t else -1


def shift_haar_value(L: DyadicInterval, K: DyadicInterval) -> Sqrt2Scalar:
    """Value of Ш h_L on K, for K inside a grandchild of L."""
    return pow2_half(-L.scale) * shift_sign(L, K)


def ancestors(I: DyadicInterval, top_scale: int) -> Iterator[DyadicInterval]:
    """Strict ancestors of I up to and including ``top_scale``, bottom-up."""
    for m in range(I.scale + 1, top_scale + 1):
        yield I.ancestor(m)
