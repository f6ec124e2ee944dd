"""Functions supported on a dyadic root interval.

A function is kept as its mean over the root plus a sparse Haar spectrum
(absent coefficients are zero).  Leaf vectors are the piecewise constant
view at a fixed depth; ``analyze`` and ``synthesize`` convert between the two
with the usual pairwise cascade.

Two scalar modes exist.  Exact mode uses :class:`Sqrt2Scalar` throughout;
float mode (plain ``float``) is only meant for oracle-side inputs and the
Poincaré-Wirtinger machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dyadic import DyadicInterval, meet
from .scalar import Sqrt2Scalar, format_scalar, parse_scalar, pow2_half

ZERO = Sqrt2Scalar(0)


def amplitude(n: int, exact: bool = True):
    """``2^(n/2)`` as an exact scalar or a float."""
    return pow2_half(n) if exact else 2.0 ** (n / 2)


def _coerce(x, exact: bool):
    if exact:
        if isinstance(x, float):
            raise TypeError("float value in exact mode")
        return Sqrt2Scalar.coerce(x)
    return float(x)


@dataclass(frozen=True)
class LeafVector:
    """2^depth values, the j-th constant on the j-th leaf of ``root``."""

    root: DyadicInterval
    depth: int
    values: tuple

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if len(self.values) != 1 << self.depth:
            raise ValueError(f"expected {1 << self.depth} leaf values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.values)

    @property
    def leaf_scale(self) -> int:
        return self.root.scale - self.depth

    def leaves(self) -> list[DyadicInterval]:
        return list(self.root.subintervals(self.depth))


@dataclass(frozen=True)
class DyadicFunction:
    """``mean * 1_root + sum_J coefficients[J] * h_J`` with J inside root.

    Coefficients live on intervals J ⊆ root with ``scale(J) > leaf_scale``;
    the leaves themselves carry no Haar atom.
    """

    root: DyadicInterval
    depth: int
    mean: object = ZERO
    coefficients: Mapping[DyadicInterval, object] = field(default_factory=dict)
    exact: bool = True

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        lo = self.root.scale - self.depth
        coeffs = {}
        for J, c in self.coefficients.items():
            if not self.root.contains(J):
                raise ValueError(f"coefficient interval {J} is outside root {self.root}")
            if J.scale <= lo:
                raise ValueError(f"coefficient interval {J} is below the leaf scale {lo}")
            c = _coerce(c, self.exact)
            if c:
                coeffs[J] = c
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "mean", _coerce(self.mean, self.exact))

    @property
    def leaf_scale(self) -> int:
        return self.root.scale - self.depth

    def coefficient(self, J: DyadicInterval):
        return self.coefficients.get(J, ZERO if self.exact else 0.0)

    def is_zero_mean(self) -> bool:
        return not self.mean

    def to_float(self) -> "DyadicFunction":
        if not self.exact:
            return self
        return DyadicFunction(
            self.root, self.depth, float(self.mean),
            {J: float(c) for J, c in self.coefficients.items()}, exact=False,
        )

    # linear structure ------------------------------------------------

    def _aligned(self, other: "DyadicFunction"):
        root = meet(self.root, other.root)
        if root is None:
            raise ValueError(f"roots {self.root} and {other.root} have no common dyadic ancestor")
        lo = min(self.leaf_scale, other.leaf_scale)
        depth = root.scale - lo
        return embed(self, root, depth), embed(other, root, depth)

    def __add__(self, other: "DyadicFunction") -> "DyadicFunction":
        f, g = self._aligned(other)
        exact = f.exact and g.exact
        if not exact:
            f, g = f.to_float(), g.to_float()
        coeffs = dict(f.coefficients)
        for J, c in g.coefficients.items():
            coeffs[J] = coeffs[J] + c if J in coeffs else c
        return DyadicFunction(f.root, f.depth, f.mean + g.mean, coeffs, exact=exact)

    def __neg__(self) -> "DyadicFunction":
        return self.scaled(-1)

    def __sub__(self, other: "DyadicFunction") -> "DyadicFunction":
        return self + (-other)

    def scaled(self, s) -> "DyadicFunction":
        if self.exact:
            s = Sqrt2Scalar.coerce(s)
        else:
            s = float(s)
        return DyadicFunction(
            self.root, self.depth, self.mean * s,
            {J: c * s for J, c in self.coefficients.items()}, exact=self.exact,
        )


# constructors ---------------------------------------------------------


def indicator(I: DyadicInterval, depth: int = 0) -> DyadicFunction:
    return DyadicFunction(I, depth, Sqrt2Scalar(1))


def haar_function(I: DyadicInterval, depth: int = 1) -> DyadicFunction:
    """h_I on its own root."""
    return DyadicFunction(I, max(depth, 1), ZERO, {I: Sqrt2Scalar(1)})


def shifted_haar(J: DyadicInterval) -> DyadicFunction:
    """Ш h_J = (h_{J+} - h_{J-}) / sqrt2, supported on J at depth 2."""
    lo, hi = J.children()
    c = Sqrt2Scalar(0, Fraction(1, 2))
    return DyadicFunction(J, 2, ZERO, {hi: c, lo: -c})


def leaf_vector(root: DyadicInterval, depth: int, values: Iterable) -> LeafVector:
    return LeafVector(root, depth, tuple(values))


# cascades -------------------------------------------------------------


def analyze(v: LeafVector) -> DyadicFunction:
    """Leaf values to (mean, Haar spectrum) in ``O(2^depth)`` field operations.

    Bottom-up: node sums are pairwise sums of child sums, and
    f̂(J) = (S(J_+) - S(J_-)) * |leaf| / sqrt|J|.
    """
    exact = v.exact
    sums = [_coerce(x, exact) for x in v.values]
    k0 = v.leaf_scale
    coeffs = {}
    m = k0
    index_base = v.root.index << v.depth
    while len(sums) > 1:
        m += 1
        factor = amplitude(2 * k0 - m, exact)
        index_base >>= 1
        nxt = []
        for i in range(0, len(sums), 2):
            lo, hi = sums[i], sums[i + 1]
            c = (hi - lo) * factor
            if c:
                coeffs[DyadicInterval(m, index_base + i // 2)] = c
            nxt.append(lo + hi)
        sums = nxt
    scale = Fraction(1, 1 << v.depth)
    mean = sums[0] * (scale if exact else float(scale))
    return DyadicFunction(v.root, v.depth, mean, coeffs, exact=exact)


def synthesize(f: DyadicFunction) -> LeafVector:
    """Inverse of :func:`analyze`; top-down, each node splits its value by ∓ f̂(J)/sqrt|J|."""
    vals = [f.mean]
    nodes = [f.root]
    for _ in range(f.depth):
        nv, nn = [], []
        for u, J in zip(vals, nodes):
            lo, hi = J.children()
            c = f.coefficients.get(J)
            if c:
                step = c * amplitude(-J.scale, f.exact)
                nv += [u - step, u + step]
            else:
                nv += [u, u]
            nn += [lo, hi]
        vals, nodes = nv, nn
    return LeafVector(f.root, f.depth, tuple(vals))


# norms and products ----------------------------------------------------


def norm2(f: DyadicFunction):
    """``mean^2 |root| + sum |f̂(J)|^2``."""
    size = f.root.size if f.exact else float(f.root.size)
    total = f.mean * f.mean * size
    for c in f.coefficients.values():
        total = total + c * c
    return total


def leaf_norm2(v: LeafVector):
    size = v.root.size / (1 << v.depth)
    if not v.exact:
        size = float(size)
    total = ZERO if v.exact else 0.0
    for x in v.values:
        total = total + x * x
    return total * size


def embed(f: DyadicFunction, new_root: DyadicInterval, new_depth: int) -> DyadicFunction:
    """The same function viewed inside a larger tree (zero outside the old root)."""
    if not new_root.contains(f.root):
        raise ValueError(f"{new_root} does not contain {f.root}")
    if new_root.scale - new_depth > f.leaf_scale:
        raise ValueError("new depth is too shallow to represent the leaves")
    if new_root == f.root and new_depth == f.depth:
        return f
    coeffs = dict(f.coefficients)
    mass = f.mean * (f.root.size if f.exact else float(f.root.size))
    if mass:
        for m in range(f.root.scale + 1, new_root.scale + 1):
            L = f.root.ancestor(m)
            below = f.root.ancestor(m - 1)
            sign = 1 if below.index & 1 else -1
            coeffs[L] = mass * amplitude(-m, f.exact) * sign
    new_mean = mass / (new_root.size if f.exact else float(new_root.size))
    return DyadicFunction(new_root, new_depth, new_mean, coeffs, exact=f.exact)


def restrict(f: DyadicFunction, K: DyadicInterval) -> DyadicFunction:
    """``1_K f`` re-expressed on root K (K must be a union of leaves)."""
    if not f.root.contains(K):
        raise ValueError(f"{K} is not inside root {f.root}")
    if K.scale < f.leaf_scale:
        raise ValueError(f"{K} is finer than the leaves of {f.root} at depth {f.depth}")
    mean = f.mean
    for m in range(K.scale + 1, f.root.scale + 1):
        J = K.ancestor(m)
        c = f.coefficients.get(J)
        if c:
            sign = 1 if K.ancestor(m - 1).index & 1 else -1
            mean = mean + c * amplitude(-m, f.exact) * sign
    coeffs = {J: c for J, c in f.coefficients.items() if K.contains(J)}
    return DyadicFunction(K, K.scale - f.leaf_scale, mean, coeffs, exact=f.exact)


def inner_product(f: DyadicFunction, g: DyadicFunction):
    """Parseval in coefficient space after embedding both in a common tree."""
    if meet(f.root, g.root) is None:
        raise ValueError(f"roots {f.root} and {g.root} have no common dyadic embedding")
    f, g = f._aligned(g)
    if not (f.exact and g.exact):
        f, g = f.to_float(), g.to_float()
    size = f.root.size if f.exact else float(f.root.size)
    total = f.mean * g.mean * size
    small, large = sorted((f.coefficients, g.coefficients), key=len)
    for J, c in small.items():
        d = large.get(J)
        if d:
            total = total + c * d
    return total


def mean_over(f: DyadicFunction, I: DyadicInterval | None = None):
    """Average of f over I (default: its root), via the inner product with 1_I."""
    I = I or f.root
    ip = inner_product(f, indicator(I))
    return ip / (I.size if f.exact else float(I.size))


def value_at(f: DyadicFunction, x) -> object:
    """Pointwise value at a rational or float point (0 outside the root)."""
    lo, hi = f.root.left, f.root.right
    if not (lo <= x < hi):
        return ZERO if f.exact else 0.0
    v = f.mean
    for J, c in f.coefficients.items():
        if J.left <= x < J.right:
            sign = 1 if x >= J.center else -1
            v = v + c * amplitude(-J.scale, f.exact) * sign
    return v


# JSON --------------------------------------------------------------------


def function_to_json(f: DyadicFunction) -> dict:
    leaves = synthesize(f).values
    if f.exact:
        out = [format_scalar(x) for x in leaves]
        mode = "exact"
    else:
        out = [float(x) for x in leaves]
        mode = "float"
    return {"root": str(f.root), "depth": f.depth, "mode": mode, "leaves": out}


def function_from_json(data: Mapping) -> DyadicFunction:
    try:
        root = DyadicInterval.parse(data["root"])
        depth = int(data["depth"])
        mode = data.get("mode", "exact")
        raw: Sequence = data["leaves"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed function document: {exc}") from None
    if mode == "exact":
        values = [parse_scalar(str(x)) if not isinstance(x, int) else Sqrt2Scalar(x) for x in raw]
    elif mode == "float":
        values = [float(x) for x in raw]
        if not all(math.isfinite(x) for x in values):
            raise ValueError("non-finite leaf value")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return analyze(LeafVector(root, depth, tuple(values)))


def load_function(path) -> DyadicFunction:
    with open(path, encoding="utf-8") as fh:
        return function_from_json(json.load(fh))


def dump_function(f: DyadicFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_json(f), fh, ensure_ascii=False, indent=1)
        fh.write("\n")
