"""Lower-bound constants, extremal functions and the Poincaré–Wirtinger demo."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .dyadic import DyadicInterval, apex_scale, epsilon_child, meet, reflect, shift_haar_value
from .haar import DyadicFunction, LeafVector, analyze, haar_function, indicator, norm2
from .scalar import Sqrt2Scalar, pow2, pow2_half
from .shift import CaseClass, classify, indicator_norm2_ratio, interior_constant, restricted_shift


@dataclass(frozen=True)
class BoundReport:
    I: DyadicInterval
    K: DyadicInterval
    case: CaseClass
    exact_constant: Fraction
    paper_bound: Fraction | None
    rule: str

    def to_json(self) -> dict:
        return {
            "I": str(self.I),
            "K": str(self.K),
            "case": self.case.value,
            "exact_constant": _q(self.exact_constant),
            "paper_bound": None if self.paper_bound is None else _q(self.paper_bound),
            "rule": self.rule,
        }


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def gap_rule(I: DyadicInterval, K: DyadicInterval) -> tuple[str, Fraction | None]:
    """Which item of the gap theorem covers the pair, and its printed constant.

    Both intervals are first moved to the right half-line.  M0 is the
    smallest integer with I ⊆ [0, 2^M0).
    """
    if (I.index >= 0) != (K.index >= 0):
        return "gap-opposite", Fraction(0)
    if I.index < 0:
        I, K = reflect(I), reflect(K)
    M0 = apex_scale(I)
    mK = apex_scale(K)
    size = I.size * K.size
    # K inside one block [2^(M0+k), 2^(M0+k+1)) with k >= 0
    if K.index != 0 and mK >= M0 + 1:
        return "gap-far", size / pow2(2 * (mK - 1))
    if I.index != 0:
        if mK <= M0 - 2:
            return "gap-anchored-zero", Fraction(0)
        if mK == M0 - 1 and K.index != 0:
            return "gap-anchored-near", size / pow2(2 * (M0 - 1))
        if mK == M0 and K.index != 0:
            L = meet(I, K)
            return "gap-same-block", size * L.size * L.size / pow2(4 * M0)
    return "gap-uncovered", None


def bound_constant(I: DyadicInterval, K: DyadicInterval) -> BoundReport:
    """Sharp constant ``||1_K Ш 1_I||^2 / |I|`` with the claimed bound for the case."""
    case = classify(I, K)
    exact = indicator_norm2_ratio(I, K)
    if case in (CaseClass.EQUAL, CaseClass.COVERING):
        return BoundReport(I, K, case, exact, 1 - Fraction(3, 4) * I.size / K.size, "covering")
    if case is CaseClass.INTERIOR:
        return BoundReport(I, K, case, exact, None, "interior")
    rule, bound = gap_rule(I, K)
    return BoundReport(I, K, case, exact, bound, rule)


# interior extremals --------------------------------------------------------


def _check_deep_interior(I: DyadicInterval, K: DyadicInterval) -> None:
    if not I.strictly_contains(K):
        raise ValueError(f"{K} is not strictly inside {I}")
    if K.parent() == I:
        raise ValueError(f"the parent of {K} is {I}; the construction needs I ⊋ parent(K)")


def extremal_interior(I: DyadicInterval, K: DyadicInterval) -> DyadicFunction:
    """``f = -ε(K,I) |I|^(-1/2) 1_I + h_I``, the function proposed as annihilated by 1_K Ш.

    It is annihilated only when the true constant of 1_K Ш 1_I equals
    ε(K,I) times the value of Ш h_I on K; annihilating_witness always works.
    """
    _check_deep_interior(I, K)
    mean = pow2_half(-I.scale) * (-epsilon_child(K, I))
    return DyadicFunction(I, 1, mean, {I: Sqrt2Scalar(1)})


def annihilating_witness(I: DyadicInterval, K: DyadicInterval) -> DyadicFunction:
    """Nonzero f = x 1_I + y h_I on I with ``1_K Ш f = 0`` exactly (I ⊋ parent(K)).

    With C the constant of 1_K Ш 1_I and σ/sqrt|I| the value of Ш h_I on K,
    x = -σ/sqrt|I| and y = C cancel; ``||f||^2 = 1 + C^2``.
    """
    _check_deep_interior(I, K)
    C = interior_constant(I, K)
    sigma = shift_haar_value(I, K) * pow2_half(I.scale)
    mean = -(sigma * pow2_half(-I.scale))
    return DyadicFunction(I, 1, mean, {I: Sqrt2Scalar(C)})


def zero_mean_gap_witness(I: DyadicInterval) -> DyadicFunction:
    """h_I: mean zero, so 1_K Ш h_I = 0 for every K disjoint from I."""
    return haar_function(I)


# Poincaré–Wirtinger --------------------------------------------------------


@dataclass(frozen=True)
class TrigPolynomial:
    """``f(t) = sum_k a_k exp(2iπk (t - left(I)) / |I|)`` on I, real-valued.

    Coefficients must be Hermitian (a_{-k} = conj a_k) so that f is real.
    """

    interval: DyadicInterval
    coefficients: Mapping[int, complex]

    def __post_init__(self):
        coeffs = {int(k): complex(v) for k, v in self.coefficients.items()}
        for k, v in coeffs.items():
            partner = coeffs.get(-k, 0j)
            if abs(partner - v.conjugate()) > 1e-12 * max(1.0, abs(v)):
                raise ValueError(f"coefficients must satisfy a_(-k) = conj(a_k); fails at k={k}")
        if not any(abs(v) for v in coeffs.values()):
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def length(self) -> float:
        return float(self.interval.size)

    def __call__(self, t: float) -> float:
        left = float(self.interval.left)
        z = sum(a * cmath.exp(2j * math.pi * k * (t - left) / self.length) for k, a in self.coefficients.items())
        return z.real

    def norm2(self) -> float:
        return self.length * sum(abs(a) ** 2 for a in self.coefficients.values())

    def derivative_norm2(self) -> float:
        n = self.length
        return n * sum((2 * math.pi * k / n) ** 2 * abs(a) ** 2 for k, a in self.coefficients.items())

    def mean(self) -> float:
        return self.coefficients.get(0, 0j).real

    def eta(self) -> float:
        """``|I| ||f'|| / (2π ||f||)``, from the coefficients."""
        return self.length * math.sqrt(self.derivative_norm2()) / (2 * math.pi * math.sqrt(self.norm2()))

    def max_mode(self) -> int:
        return max(abs(k) for k in self.coefficients)


def pw_build(I: DyadicInterval, coefficients: Mapping[int, complex], depth: int) -> tuple[DyadicFunction, float]:
    """Sample the trig polynomial at leaf midpoints; return (float-mode f, eta).

    Midpoint sampling integrates every mode |k| < 2^depth exactly, so the
    sampled mean and squared norm equal the spectral ones up to rounding.
    """
    if depth < 4:
        raise ValueError("depth must be at least 4")
    p = TrigPolynomial(I, coefficients)
    if 2 * p.max_mode() >= 1 << depth:
        raise ValueError(f"mode {p.max_mode()} is not resolved at depth {depth}")
    values = [p(float(leaf.center)) for leaf in I.subintervals(depth)]
    f = analyze(LeafVector(I, depth, values))
    return f, p.eta()


def trig_with_eta(I: DyadicInterval, eta: float, modes: int = 3, seed: int = 0) -> dict[int, complex]:
    """Hermitian coefficients with random modes 1..m and a_0 = α/η.

    The resulting polynomial has spectral eta at most the requested one.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    rng = random.Random(seed)
    coeffs: dict[int, complex] = {}
    for k in range(1, modes + 1):
        a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / k
        coeffs[k] = a
        coeffs[-k] = a.conjugate()
    alpha = math.sqrt(sum(k * k * abs(a) ** 2 for k, a in coeffs.items()))
    coeffs[0] = complex(alpha / eta)
    return coeffs


@dataclass(frozen=True)
class MeanBound:
    mean_mass: float     # <f>^2 |I|
    required: float      # (1 - eta)^2 ||f||^2
    holds: bool


def pw_mean_bound(f: DyadicFunction, eta: float, rel_tol: float = 1e-9) -> MeanBound:
    """Check ``<f>^2 |I| >= (1 - eta)^2 ||f||^2`` up to a relative tolerance."""
    g = f if not f.exact else f.to_float()
    mass = float(g.mean) ** 2 * float(g.root.size)
    required = (1 - eta) ** 2 * float(norm2(g))
    return MeanBound(mass, required, mass >= required * (1 - rel_tol))


@dataclass(frozen=True)
class GapCheck:
    lhs: float
    exact_rhs: float
    printed_rhs: float | None
    holds: bool
    slack: float
    rule: str

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "exact_rhs": self.exact_rhs, "printed_rhs": self.printed_rhs,
                "holds": self.holds, "slack": self.slack, "rule": self.rule}


def gap_lower_bound_check(f: DyadicFunction, I: DyadicInterval, K: DyadicInterval, eta: float,
                          rel_tol: float = 1e-9) -> GapCheck:
    """``||1_K Ш f||^2`` against ``(1-eta)^2 C(I,K) ||f||^2`` with the exact C,
    the printed constant recorded alongside."""
    if f.root != I:
        raise ValueError(f"f must live on {I}")
    if classify(I, K) not in (CaseClass.GAP, CaseClass.OPPOSITE):
        raise ValueError(f"{I} and {K} are not disjoint")
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    report = bound_constant(I, K)
    lhs = float(restricted_shift(f, K).norm2)
    fn = float(norm2(f))
    factor = (1 - eta) ** 2
    rhs = factor * float(report.exact_constant) * fn
    printed = None if report.paper_bound is None else factor * float(report.paper_bound) * fn
    holds = lhs >= rhs - rel_tol * max(1.0, abs(rhs))
    return GapCheck(lhs, rhs, printed, holds, lhs - rhs, report.rule)
