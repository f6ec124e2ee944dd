"""The Haar shift Ш and exact closed forms for ``1_K Ш f``.

Ш acts on the Haar basis by ``Ш h_J = (h_{J+} - h_{J-}) / sqrt2``.  For f
supported in a dyadic interval I,

    1_K Ш f = <f>_I 1_K Ш 1_I + sum_J f̂(J) 1_K Ш h_J,
    Ш 1_I   = |I| sum_{L ⊋ I} h_L(I) Ш h_L.

Each ``1_K Ш h_L`` is one of: the full atom ``Ш h_L`` (L ⊆ K), a multiple of
``h_K`` (L = parent of K), a constant on K (L above the parent of K), or zero.
The constant part is an infinite series over ancestors.  It is summed exactly:
a finite walk up to the zero-anchored apex of the configuration plus a
closed-form geometric tail.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from .dyadic import (
    DyadicInterval,
    apex_scale,
    child_sign,
    epsilon_child,
    haar_value,
    meet,
    shift_haar_value,
    shift_sign,
)
from .haar import DyadicFunction, amplitude
from .scalar import Sqrt2Scalar, format_scalar, pow2, pow2_half

ZERO = Sqrt2Scalar(0)
INV_SQRT2 = Sqrt2Scalar(0, Fraction(1, 2))


class CaseClass(enum.Enum):
    EQUAL = "equal"
    INTERIOR = "interior"
    COVERING = "covering"
    GAP = "gap"
    OPPOSITE = "opposite"


def classify(I: DyadicInterval, K: DyadicInterval) -> CaseClass:
    """Relative position of K with respect to the support interval I."""
    if I == K:
        return CaseClass.EQUAL
    if I.contains(K):
        return CaseClass.INTERIOR
    if K.contains(I):
        return CaseClass.COVERING
    if (I.index >= 0) != (K.index >= 0):
        return CaseClass.OPPOSITE
    return CaseClass.GAP


# the ancestor series ----------------------------------------------------


def _ancestor_sum(I: DyadicInterval, K: DyadicInterval, base: DyadicInterval) -> Fraction:
    """``sum_{L ⊋ base} (<1_I, h_L>/|I|) * Ш h_L(K)`` as an exact rational.

    Requires I, K in the same half-line and ``base ⊇ parent(K)``.  The
    coefficient ``<1_I, h_L>/|I|`` equals h_L(I) when I ⊊ L and 0 otherwise.

    Above the apex A (smallest zero-anchored interval holding I and base)
    every ancestor is zero-anchored, A sits in the child of the next ancestor
    pointing at the origin, and the terms form a geometric series.  Its sum
    is (t - h) / (2|A|), where t = ±1 records the child of A holding K and
    h = +1 on the right half-line, -1 on the left.
    """
    kI, lI = I.scale, I.index
    kK, lK = K.scale, K.index
    kb = base.scale
    top = max(apex_scale(I), apex_scale(base))
    # numerator over 2^(top+1)
    num = 0
    for m in range(max(kb, kI) + 1, top + 1):
        if (lI >> (m - kI)) != (lK >> (m - kK)):
            continue
        s_i = (lI >> (m - 1 - kI)) & 1
        s_k = (lK >> (m - 1 - kK)) & 1
        t_k = (lK >> (m - 2 - kK)) & 1
        # h_L(I) * Ш h_L(K) = sign(I) * sign(K) * sign(grandchild) / |L|
        sign = 1 if (s_i ^ s_k ^ t_k) & 1 else -1
        num += sign << (top + 1 - m)
    t = 1 if (lK >> (top - 1 - kK)) & 1 else -1
    h = 1 if lK >= 0 else -1
    num += t - h
    return num / pow2(top + 1)


def _check_walk(I: DyadicInterval, K: DyadicInterval, base: DyadicInterval) -> None:
    if (I.index >= 0) != (K.index >= 0):
        raise ValueError(f"{I} and {K} lie in opposite half-lines")
    if not base.strictly_contains(K):
        raise ValueError(f"base {base} must contain the parent of {K}")


def ancestor_sum(I: DyadicInterval, K: DyadicInterval, base: DyadicInterval) -> Sqrt2Scalar:
    """``S = sum_{L ⊋ base} h_L(I) Ш h_L(K)`` summed in closed form.

    Terms where L does not strictly contain I vanish (the indicator of I has
    no component on such h_L).
    """
    _check_walk(I, K, base)
    return Sqrt2Scalar(_ancestor_sum(I, K, base))


def ancestor_partial_sum(I: DyadicInterval, K: DyadicInterval, base: DyadicInterval, top: int) -> Fraction:
    """Truncated ``sum_{base ⊊ L, scale(L) <= top}``, term by term (no tail formula)."""
    _check_walk(I, K, base)
    total = Fraction(0)
    for m in range(base.scale + 1, top + 1):
        L = K.ancestor(m)
        if not L.strictly_contains(I):
            continue
        total += (haar_value(L, I) * shift_haar_value(L, K)).to_fraction()
    return total


def radical_inverse(n: int) -> Fraction:
    """Base-2 van der Corput value of n >= 0 (bits mirrored about the point)."""
    q = Fraction(0)
    w = Fraction(1, 2)
    while n:
        if n & 1:
            q += w
        n >>= 1
        w /= 2
    return q


def self_constant(I: DyadicInterval) -> Fraction:
    """The constant c in ``1_I Ш 1_I = c 1_I + (sqrt|I|/2) h_I``.

    Closed form: c = φ(l) - 1/2 on the right half-line, where φ is the
    base-2 radical inverse of the index, and the negative of the mirrored
    value on the left (Ш is odd).
    """
    if I.index >= 0:
        return radical_inverse(I.index) - Fraction(1, 2)
    return Fraction(1, 2) - radical_inverse(-I.index - 1)


def interior_constant(I: DyadicInterval, K: DyadicInterval) -> Fraction:
    """Constant value of 1_K Ш 1_I for K ⊊ I: ``ε(K,I)/2 + c_I``."""
    return Fraction(epsilon_child(K, I), 2) + self_constant(I)


# forms --------------------------------------------------------------------


def _inner_sort_key(L: DyadicInterval):
    return (-L.scale, L.index)


@dataclass(frozen=True)
class RestrictedShiftForm:
    """``constant * 1_K + haar * h_K + sum_L inner[L] * Ш h_L`` (all L ⊆ K).

    The three parts are mutually orthogonal, so the squared norm is
    ``constant^2 |K| + haar^2 + sum inner[L]^2``.
    """

    K: DyadicInterval
    constant: object = ZERO
    haar: object = ZERO
    inner: Mapping[DyadicInterval, object] = field(default_factory=dict)

    def __post_init__(self):
        for L in self.inner:
            if not self.K.contains(L):
                raise ValueError(f"inner interval {L} is not inside {self.K}")
        object.__setattr__(self, "inner", {L: c for L, c in self.inner.items() if c})

    @property
    def exact(self) -> bool:
        return not isinstance(self.constant, float)

    def norm2(self):
        size = self.K.size if self.exact else float(self.K.size)
        total = self.constant * self.constant * size + self.haar * self.haar
        for c in self.inner.values():
            total = total + c * c
        return total

    def is_zero(self) -> bool:
        return not self.constant and not self.haar and not self.inner

    def scaled(self, s) -> "RestrictedShiftForm":
        return RestrictedShiftForm(
            self.K, self.constant * s, self.haar * s, {L: c * s for L, c in self.inner.items()}
        )

    def to_float(self) -> "RestrictedShiftForm":
        return RestrictedShiftForm(
            self.K, float(self.constant), float(self.haar),
            {L: float(c) for L, c in self.inner.items()},
        )

    def required_depth(self) -> int:
        if self.inner:
            return self.K.scale - min(L.scale for L in self.inner) + 2
        return 1 if self.haar else 0

    def to_function(self, depth: int | None = None) -> DyadicFunction:
        need = self.required_depth()
        depth = need if depth is None else depth
        if depth < need:
            raise ValueError(f"depth {depth} cannot resolve this form (needs {need})")
        exact = self.exact
        half = INV_SQRT2 if exact else 2 ** -0.5
        coeffs: dict = {}
        if self.haar:
            coeffs[self.K] = self.haar
        for L, c in self.inner.items():
            lo, hi = L.children()
            for J, v in ((hi, c * half), (lo, -(c * half))):
                coeffs[J] = coeffs[J] + v if J in coeffs else v
        return DyadicFunction(self.K, depth, self.constant, coeffs, exact=exact)

    def value_at(self, x):
        """Pointwise value at x in K (rational or float)."""
        K = self.K
        if not (K.left <= x < K.right):
            return ZERO if self.exact else 0.0
        v = self.constant
        if self.haar:
            v = v + self.haar * amplitude(-K.scale, self.exact) * (1 if x >= K.center else -1)
        for L, c in self.inner.items():
            if L.left <= x < L.right:
                lo, hi = L.children()
                sub = hi if x >= hi.left else lo
                sgn_outer = 1 if sub is hi else -1
                sgn_inner = 1 if x >= sub.center else -1
                # Ш h_L = sgn_outer * sgn_inner / sqrt|L| on the grandchild
                v = v + c * amplitude(-L.scale, self.exact) * (sgn_outer * sgn_inner)
        return v

    def to_json(self) -> dict:
        return {
            "K": str(self.K),
            "constant": _fmt(self.constant),
            "haar": _fmt(self.haar),
            "inner": [
                {"L": str(L), "coef": _fmt(self.inner[L])}
                for L in sorted(self.inner, key=_inner_sort_key)
            ],
            "norm2": _fmt(self.norm2()),
        }


def _fmt(x) -> str | float:
    return float(x) if isinstance(x, float) else format_scalar(x)


def form_from_json(data: Mapping) -> RestrictedShiftForm:
    from .scalar import parse_scalar

    K = DyadicInterval.parse(data["K"])
    inner = {DyadicInterval.parse(e["L"]): parse_scalar(e["coef"]) for e in data.get("inner", [])}
    return RestrictedShiftForm(K, parse_scalar(data["constant"]), parse_scalar(data["haar"]), inner)


@lru_cache(maxsize=1 << 14)
def restricted_indicator_shift(I: DyadicInterval, K: DyadicInterval) -> RestrictedShiftForm:
    """Exact ``1_K Ш 1_I`` for any pair of dyadic intervals.

    The ancestor expansion of ``1_I`` splits by where each ancestor L sits
    relative to K:

    * K ⊇ L ⊋ I: full atom, coefficient ``|I| h_L(I)``;
    * L = parent(K) ⊋ I: ``|I| h_L(I) ε(K) / sqrt2`` on h_K;
    * L ⊋ parent(K), L ⊋ I: constant ``|I| h_L(I) Ш h_L(K)``;
    * anything else misses K.
    """
    if (I.index >= 0) != (K.index >= 0):
        return RestrictedShiftForm(K)
    size_i = I.size
    Khat = K.parent()
    constant = Sqrt2Scalar(size_i * _ancestor_sum(I, K, Khat))
    haar = ZERO
    if Khat.strictly_contains(I):
        haar = haar_value(Khat, I) * INV_SQRT2 * (child_sign(K) * size_i)
    inner = {}
    if K.strictly_contains(I):
        for m in range(I.scale + 1, K.scale + 1):
            L = I.ancestor(m)
            inner[L] = haar_value(L, I) * size_i
    return RestrictedShiftForm(K, constant, haar, inner)


def indicator_constant(I: DyadicInterval, K: DyadicInterval) -> Fraction:
    """The coefficient of 1_K in ``1_K Ш 1_I`` (rational)."""
    if (I.index >= 0) != (K.index >= 0):
        return Fraction(0)
    return I.size * _ancestor_sum(I, K, K.parent())


def indicator_norm2_ratio(I: DyadicInterval, K: DyadicInterval) -> Fraction:
    """``||1_K Ш 1_I||^2 / |I|``, the sharp constant of the restricted problem."""
    if (I.index >= 0) != (K.index >= 0):
        return Fraction(0)
    c = indicator_constant(I, K)
    total = c * c * K.size / I.size
    Khat = K.parent()
    if Khat.strictly_contains(I):
        # (|I| / sqrt(2|Khat|))^2 / |I|
        total += I.size / (2 * Khat.size)
    if K.strictly_contains(I):
        # |I| sum_{I ⊊ L ⊆ K} 1/|L|
        total += 1 - I.size / K.size
    return total


# applying Ш to general functions ---------------------------------------


def shift_zero_mean(f: DyadicFunction) -> DyadicFunction:
    """Ш f for a mean-zero f on its root: h_J -> (h_{J+} - h_{J-})/sqrt2, depth + 1."""
    if f.mean:
        raise ValueError("shift_zero_mean needs a mean-zero function; use restricted_shift")
    half = INV_SQRT2 if f.exact else 2 ** -0.5
    coeffs: dict = {}
    for J, c in f.coefficients.items():
        lo, hi = J.children()
        for C, v in ((hi, c * half), (lo, -(c * half))):
            coeffs[C] = coeffs[C] + v if C in coeffs else v
    return DyadicFunction(f.root, f.depth + 1, f.mean, coeffs, exact=f.exact)


class RestrictedShift(NamedTuple):
    form: RestrictedShiftForm
    norm2: object


def restricted_shift(f: DyadicFunction, K: DyadicInterval) -> RestrictedShift:
    """Exact ``1_K Ш f`` for f supported in its root, with ``||1_K Ш f||^2``."""
    I = f.root
    base = restricted_indicator_shift(I, K)
    if not f.exact:
        base = base.to_float()
    if f.mean:
        base = base.scaled(f.mean)
        constant, haar, inner = base.constant, base.haar, dict(base.inner)
    else:
        zero = ZERO if f.exact else 0.0
        constant, haar, inner = zero, zero, {}
    Khat = K.parent()
    for J, c in f.coefficients.items():
        if K.contains(J):
            inner[J] = inner[J] + c if J in inner else c
        elif J.strictly_contains(K):
            if J == Khat:
                amp = INV_SQRT2 if f.exact else 2 ** -0.5
                haar = haar + c * amp * child_sign(K)
            else:
                v = shift_haar_value(J, K)
                constant = constant + c * (v if f.exact else float(v))
    form = RestrictedShiftForm(K, constant, haar, inner)
    return RestrictedShift(form, form.norm2())


def interior_norm2(f: DyadicFunction, K: DyadicInterval):
    """``||1_K Ш f||^2`` for K ⊊ root(f) from the three-term identity

        [<f> C(I,K) + sum_{K̂ ⊊ J ⊆ I} f̂(J) Ш h_J(K)]^2 |K|
            + |f̂(K̂)|^2 / 2 + sum_{J ⊆ K} |f̂(J)|^2,

    where C(I,K) = ε(K,I)/2 + c_I is the interior constant of 1_K Ш 1_I
    (radical-inverse closed form, independent of the ancestor walk).
    """
    I = f.root
    if not I.strictly_contains(K):
        raise ValueError(f"{K} is not strictly inside {I}")
    exact = f.exact
    cast = (lambda v: v) if exact else float
    bracket = f.mean * cast(Sqrt2Scalar(interior_constant(I, K)))
    Khat = K.parent()
    tail = ZERO if exact else 0.0
    for J, c in f.coefficients.items():
        if J.strictly_contains(Khat):
            # Ш h_J on K: sign of (child, grandchild) of J containing K, over sqrt|J|
            d = J.scale - K.scale
            same = ((K.index >> (d - 1)) ^ (K.index >> (d - 2))) & 1 == 0
            bracket = bracket + c * amplitude(-J.scale, exact) * (1 if same else -1)
        elif K.contains(J):
            tail = tail + c * c
    size = K.size if exact else float(K.size)
    hk = f.coefficients.get(Khat)
    half = Fraction(1, 2) if exact else 0.5
    middle = hk * hk * half if hk else (ZERO if exact else 0.0)
    return bracket * bracket * size + middle + tail


def printed_interior_norm2(f: DyadicFunction, K: DyadicInterval):
    """The interior identity as printed in the source analysis.

    The mean coefficient of 1_K Ш 1_I is taken to be the child sign ε(K,I);
    each ε(K,J) in the sum is the sign of Ш h_J on K.  Kept for the claims
    audit: it differs from interior_norm2 only through the mean coefficient.
    """
    I = f.root
    if not I.strictly_contains(K):
        raise ValueError(f"{K} is not strictly inside {I}")
    bracket = f.mean * epsilon_child(K, I)
    Khat = K.parent()
    tail = ZERO
    for J, c in f.coefficients.items():
        if J.strictly_contains(Khat):
            bracket = bracket + c * pow2_half(-J.scale) * shift_sign(J, K)
        elif K.contains(J):
            tail = tail + c * c
    hk = f.coefficients.get(Khat, ZERO)
    return bracket * bracket * K.size + hk * hk * Fraction(1, 2) + tail


def shift_full(f: DyadicFunction, window: DyadicInterval, depth: int | None = None) -> DyadicFunction:
    """``1_W Ш f`` as a function on root W, at a depth resolving every part."""
    if window.scale < f.leaf_scale - 1 and f.root.intersects(window):
        raise ValueError(f"window {window} is finer than the resolution of Ш f")
    form = restricted_shift(f, window).form
    need = form.required_depth()
    if window.contains(f.root):
        need = max(need, window.scale - f.leaf_scale + 1)
    return form.to_function(need if depth is None else depth)
