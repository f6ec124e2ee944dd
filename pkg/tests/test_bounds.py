import math
import random
from fractions import Fraction

import pytest

from haarshift.bounds import (
    TrigPolynomial,
    annihilating_witness,
    bound_constant,
    extremal_interior,
    gap_lower_bound_check,
    gap_rule,
    pw_build,
    pw_mean_bound,
    trig_with_eta,
    zero_mean_gap_witness,
)
from haarshift.dyadic import DyadicInterval as DI
from haarshift.haar import haar_function, indicator, norm2
from haarshift.shift import CaseClass, interior_constant, restricted_shift

from conftest import random_function


def iv(text):
    return DI.parse(text)


@pytest.mark.parametrize("I,K,case,exact,bound,rule", [
    ("0:0", "1:0", "covering", "3/4", "5/8", "covering"),
    ("0:0", "2:0", "covering", "7/8", "13/16", "covering"),
    ("0:0", "0:0", "equal", "1/2", "1/4", "covering"),
    ("1:1", "0:0", "gap", "0", "0", "gap-anchored-zero"),
    ("0:0", "0:1", "gap", "1/4", "1", "gap-far"),
    ("0:0", "0:3", "gap", "1/16", "1/4", "gap-far"),
    ("0:0", "0:-1", "opposite", "0", "0", "gap-opposite"),
])
def test_bound_constant(I, K, case, exact, bound, rule):
    r = bound_constant(iv(I), iv(K))
    assert r.case.value == case
    assert r.exact_constant == Fraction(exact)
    assert r.paper_bound == Fraction(bound)
    assert r.rule == rule
    assert r.to_json()["exact_constant"] == exact


def test_interior_has_no_bound():
    r = bound_constant(iv("2:0"), iv("0:1"))
    assert r.case is CaseClass.INTERIOR and r.paper_bound is None


def test_gap_rules_mirror():
    for I, K in [("0:0", "0:1"), ("1:1", "0:0"), ("0:5", "0:4"), ("0:6", "1:2")]:
        a = gap_rule(iv(I), iv(K))
        b = gap_rule(DI(iv(I).scale, -iv(I).index - 1), DI(iv(K).scale, -iv(K).index - 1))
        assert a == b


def test_covering_bound_holds_everywhere():
    ivs = [DI(k, l) for k in range(-3, 4) for l in range(-8, 8)]
    for I in ivs:
        for K in ivs:
            if K.contains(I):
                r = bound_constant(I, K)
                assert r.exact_constant >= r.paper_bound


def test_extremal_interior():
    f = extremal_interior(iv("2:0"), iv("0:0"))
    assert norm2(f) == 2
    assert restricted_shift(f, iv("0:0")).norm2 == 0
    g = extremal_interior(iv("2:0"), iv("0:3"))
    assert norm2(g) == 2
    assert restricted_shift(g, iv("0:3")).norm2 == Fraction(1, 4)
    for K in ["1:0", "2:0", "0:4"]:
        with pytest.raises(ValueError):
            extremal_interior(iv("2:0"), iv(K))


def test_annihilating_witness_everywhere():
    for I in [DI(k, l) for k in range(0, 4) for l in range(-5, 5)]:
        for d in range(2, 4):
            for K in I.subintervals(d):
                f = annihilating_witness(I, K)
                assert restricted_shift(f, K).norm2 == 0
                C = interior_constant(I, K)
                assert norm2(f) == 1 + C * C


def test_zero_mean_gap_witness():
    f = zero_mean_gap_witness(iv("0:0"))
    assert norm2(f) == 1
    for K in ["0:1", "3:1", "-2:9", "0:-1"]:
        assert restricted_shift(f, iv(K)).norm2 == 0


def test_trig_polynomial_validation():
    with pytest.raises(ValueError):
        TrigPolynomial(iv("0:0"), {1: 1j})
    with pytest.raises(ValueError):
        TrigPolynomial(iv("0:0"), {0: 0})
    p = TrigPolynomial(iv("0:0"), {0: 2, 1: 0.5, -1: 0.5})
    assert p.eta() == pytest.approx(1 / 3)
    assert p(0.0) == pytest.approx(3.0)


def test_pw_build_samples_exactly():
    f, eta = pw_build(iv("1:0"), {0: 2, 1: 0.5 + 0.25j, -1: 0.5 - 0.25j, 3: 0.1, -3: 0.1}, 6)
    assert f.mean == pytest.approx(2, abs=1e-12)
    p = TrigPolynomial(iv("1:0"), {0: 2, 1: 0.5 + 0.25j, -1: 0.5 - 0.25j, 3: 0.1, -3: 0.1})
    assert norm2(f) == pytest.approx(p.norm2(), rel=1e-12)
    with pytest.raises(ValueError):
        pw_build(iv("0:0"), {0: 1}, 3)
    with pytest.raises(ValueError):
        pw_build(iv("0:0"), {0: 1, 8: 1, -8: 1}, 4)


@pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
def test_pw_mean_bound(eta):
    for seed in range(3):
        f, got = pw_build(iv("0:0"), trig_with_eta(iv("0:0"), eta, seed=seed), 10)
        assert got <= eta + 1e-12
        assert pw_mean_bound(f, got).holds


def test_trig_with_eta_rejects():
    for bad in (0, 1, -0.2):
        with pytest.raises(ValueError):
            trig_with_eta(iv("0:0"), bad)


def test_gap_lower_bound_check(rng):
    I, K = iv("0:0"), iv("0:3")
    f, eta = pw_build(I, trig_with_eta(I, 0.3, seed=1), 8)
    r = gap_lower_bound_check(f, I, K, eta)
    assert r.holds and r.rule == "gap-far"
    assert r.printed_rhs > r.lhs  # the printed far-block constant is four times too large
    with pytest.raises(ValueError):
        gap_lower_bound_check(f, I, iv("1:0"), eta)
    with pytest.raises(ValueError):
        gap_lower_bound_check(f, iv("0:1"), K, eta)


def test_gap_check_constant_function_is_tight():
    I, K = iv("0:0"), iv("0:2")
    f, eta = pw_build(I, {0: 1.5}, 4)
    assert eta == 0
    r = gap_lower_bound_check(f, I, K, eta)
    assert r.lhs == pytest.approx(r.exact_rhs, rel=1e-12)


def test_gap_check_half_eta():
    I, K = iv("0:0"), iv("0:2")
    f, eta = pw_build(I, trig_with_eta(I, 0.5, seed=4), 10)
    r = gap_lower_bound_check(f, I, K, eta)
    assert r.holds and r.slack > 0


def test_gap_check_zero_cases():
    f, eta = pw_build(iv("1:1"), trig_with_eta(iv("1:1"), 0.4), 6)
    for K in ["0:0", "0:-1"]:
        r = gap_lower_bound_check(f, iv("1:1"), iv(K), eta)
        assert r.lhs == 0 and r.exact_rhs == 0 and r.printed_rhs == 0
