"""Exact engine against the oracle and against hand-computed anchors."""

import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from haarshift.dyadic import DyadicInterval as DI, reflect
from haarshift.haar import (
    DyadicFunction,
    LeafVector,
    embed,
    haar_function,
    indicator,
    inner_product,
    norm2,
    restrict,
    shifted_haar,
    synthesize,
)
from haarshift.oracle import engine_matrix, oracle_restricted_norm, pair_matrix
from haarshift.scalar import Sqrt2Scalar as S, pow2_half
from haarshift.shift import (
    CaseClass,
    RestrictedShiftForm,
    ancestor_partial_sum,
    ancestor_sum,
    classify,
    form_from_json,
    indicator_constant,
    indicator_norm2_ratio,
    interior_constant,
    interior_norm2,
    printed_interior_norm2,
    radical_inverse,
    restricted_indicator_shift,
    restricted_shift,
    self_constant,
    shift_full,
    shift_zero_mean,
)

from conftest import random_function

R2 = S(0, 1)


def iv(text):
    return DI.parse(text)


def small_pairs(scales=range(-2, 3), indices=range(-6, 6)):
    ivs = [DI(k, l) for k in scales for l in indices]
    return [(I, K) for I in ivs for K in ivs]


# anchors -------------------------------------------------------------------


def test_classify():
    assert classify(iv("0:0"), iv("0:0")) is CaseClass.EQUAL
    assert classify(iv("2:0"), iv("0:1")) is CaseClass.INTERIOR
    assert classify(iv("0:1"), iv("2:0")) is CaseClass.COVERING
    assert classify(iv("0:0"), iv("0:3")) is CaseClass.GAP
    assert classify(iv("0:0"), iv("0:-1")) is CaseClass.OPPOSITE


def test_ancestor_sum_anchors():
    assert ancestor_sum(iv("0:0"), iv("0:3"), iv("1:1")) == Fraction(-1, 4)
    assert ancestor_sum(iv("0:2"), iv("0:1"), iv("1:0")) == Fraction(-1, 2)
    with pytest.raises(ValueError):
        ancestor_sum(iv("0:0"), iv("0:-1"), iv("2:0"))
    with pytest.raises(ValueError):
        ancestor_sum(iv("0:0"), iv("0:3"), iv("0:3"))


def test_ancestor_sum_is_limit_of_partial_sums():
    rng = random.Random(7)
    for _ in range(300):
        kI, kK = rng.randint(-3, 3), rng.randint(-3, 3)
        sign = rng.choice([1, -1])
        lI, lK = rng.randint(0, 20), rng.randint(0, 20)
        if sign < 0:
            lI, lK = -lI - 1, -lK - 1
        I, K = DI(kI, lI), DI(kK, lK)
        base = K.ancestor(K.scale + rng.randint(1, 4))
        exact = ancestor_sum(I, K, base).to_fraction()
        top = max(base.scale, I.scale) + 30
        partial = ancestor_partial_sum(I, K, base, top)
        # the tail beyond top is a geometric remainder of size at most 2^-top
        assert abs(exact - partial) <= Fraction(1, 2 ** (top - 1))


def test_covering_form_anchor():
    form = restricted_indicator_shift(iv("0:0"), iv("1:0"))
    assert form.constant == Fraction(-1, 4)
    assert form.haar == R2 * Fraction(1, 4)
    assert form.inner == {iv("1:0"): -R2 / 2}
    assert form.norm2() == Fraction(3, 4)


def test_gap_anchor():
    form = restricted_indicator_shift(iv("0:0"), iv("0:3"))
    assert form.constant == Fraction(-1, 4) and not form.haar and not form.inner
    assert restricted_indicator_shift(iv("1:1"), iv("0:0")).is_zero()
    assert restricted_indicator_shift(iv("0:0"), iv("0:-1")).is_zero()


@pytest.mark.parametrize("I,c", [("0:0", "-1/2"), ("0:3", "1/4"), ("1:1", "0"), ("-1:5", "1/8"),
                                 ("0:-1", "1/2"), ("2:-3", "1/4")])
def test_self_constant(I, c):
    I = iv(I)
    assert self_constant(I) == Fraction(c)
    form = restricted_indicator_shift(I, I)
    assert form.constant == Fraction(c)
    assert form.haar == pow2_half(I.scale) / 2
    assert not form.inner


def test_radical_inverse():
    assert [radical_inverse(n) for n in range(6)] == [0, Fraction(1, 2), Fraction(1, 4), Fraction(3, 4),
                                                      Fraction(1, 8), Fraction(5, 8)]


def test_interior_constant_two_paths():
    rng = random.Random(3)
    for _ in range(300):
        I = DI(rng.randint(-2, 4), rng.randint(-30, 30))
        d = rng.randint(2, 4)
        K = DI(I.scale - d, (I.index << d) + rng.randrange(1 << d))
        assert interior_constant(I, K) == indicator_constant(I, K)


# oddness and structure -----------------------------------------------------


def test_oddness():
    for I, K in small_pairs(range(-1, 2), range(0, 6)):
        form = restricted_indicator_shift(I, K)
        mirrored = restricted_indicator_shift(reflect(I), reflect(K))
        lv = synthesize(form.to_function(max(2, form.required_depth()))).values
        mv = synthesize(mirrored.to_function(max(2, form.required_depth()))).values
        # -I reverses the leaf order
        assert tuple(-x for x in lv) == tuple(reversed(mv))


def test_norm_ratio_matches_form():
    for I, K in small_pairs():
        form = restricted_indicator_shift(I, K)
        assert indicator_norm2_ratio(I, K) == form.norm2() / I.size
        assert norm2(form.to_function()) == form.norm2()


def test_form_value_at_and_json():
    form = restricted_indicator_shift(iv("-1:1"), iv("1:0"))
    f = form.to_function(4)
    for leaf in iv("1:0").subintervals(4):
        assert form.value_at(leaf.center) == synthesize(restrict(f, leaf)).values[0]
    doc = json.loads(json.dumps(form.to_json()))
    assert list(doc) == ["K", "constant", "haar", "inner", "norm2"]
    assert form_from_json(doc) == form
    with pytest.raises(ValueError):
        RestrictedShiftForm(iv("0:0"), inner={iv("1:0"): S(1)})
    with pytest.raises(ValueError):
        form.to_function(1)


# engine vs oracle ----------------------------------------------------------


@pytest.mark.parametrize("D", [0, 2, 3])
def test_engine_matches_oracle_matrices(D):
    worst = 0.0
    for I, K in small_pairs(range(-1, 2), range(-4, 4)):
        diff = np.max(np.abs(pair_matrix(I, K, D, 40).matrix - engine_matrix(I, K, D)))
        worst = max(worst, diff)
    assert worst < 1e-10


def test_restricted_shift_matches_oracle(rng):
    for _ in range(40):
        I = DI(rng.randint(-1, 2), rng.randint(-4, 3))
        K = DI(rng.randint(-2, 3), rng.randint(-4, 3))
        f = random_function(I, 3, rng)
        exact = float(restricted_shift(f, K).norm2)
        leaves = LeafVector(I, 3, tuple(float(x) for x in synthesize(f).values))
        assert math.sqrt(exact) == pytest.approx(oracle_restricted_norm(I, K, 3, 40, leaves), abs=1e-9)


def test_float_mode_matches_exact(rng):
    f = random_function(iv("1:0"), 3, rng)
    K = iv("0:1")
    assert float(restricted_shift(f, K).norm2) == pytest.approx(restricted_shift(f.to_float(), K).norm2, rel=1e-12)


# identities ----------------------------------------------------------------


def test_linearity(rng):
    I, K = iv("1:0"), iv("2:1")
    f, g = random_function(I, 2, rng), random_function(I, 2, rng)
    lhs = restricted_shift(f + g, K).form
    a, b = restricted_shift(f, K).form, restricted_shift(g, K).form
    assert lhs.to_function(3) == a.to_function(3) + b.to_function(3)


@pytest.mark.parametrize("I,K", [("0:0", "0:3"), ("1:1", "0:0"), ("-1:3", "2:1"), ("0:-1", "0:-5")])
def test_gap_rank_one(I, K, rng):
    I, K = iv(I), iv(K)
    for _ in range(20):
        f = random_function(I, 3, rng)
        got = restricted_shift(f, K).form
        assert got == restricted_indicator_shift(I, K).scaled(f.mean)
    assert restricted_shift(haar_function(I), K).form.is_zero()


def test_unitarity_depth_four():
    atoms = [J for d in range(4) for J in iv("2:0").subintervals(d)]
    images = {J: shift_zero_mean(haar_function(J)) for J in atoms}
    for J in atoms:
        for L in atoms:
            assert inner_product(images[J], images[L]) == (1 if J == L else 0)
    assert images[iv("2:0")] == embed(shifted_haar(iv("2:0")), iv("2:0"), 2)


def test_shift_zero_mean_rejects_mean():
    with pytest.raises(ValueError):
        shift_zero_mean(indicator(iv("0:0")))


def test_interior_identity(rng):
    for _ in range(200):
        I = DI(rng.randint(-1, 3), rng.randint(-8, 7))
        d = rng.randint(1, 4)
        K = DI(I.scale - d, (I.index << d) + rng.randrange(1 << d))
        f = random_function(I, rng.randint(d, d + 2), rng)
        assert interior_norm2(f, K) == restricted_shift(f, K).norm2
    with pytest.raises(ValueError):
        interior_norm2(random_function(iv("0:0"), 1, rng), iv("0:0"))


def test_printed_identity_differs_only_by_mean(rng):
    I, K = iv("2:0"), iv("0:3")
    f = random_function(I, 3, rng, mean=False)
    assert printed_interior_norm2(f, K) == interior_norm2(f, K)
    g = indicator(I, 3)
    assert interior_norm2(g, K) == 0
    assert printed_interior_norm2(g, K) == Fraction(1, 1)


def test_shift_full_matches_oracle(rng):
    f = random_function(iv("0:1"), 2, rng)
    W = iv("2:0")
    g = shift_full(f, W)
    assert g.root == W
    op = pair_matrix(iv("0:1"), W, 2, 40)
    vals = synthesize(f).values
    coords = np.array([float(v) for v in vals]) * math.sqrt(0.25)
    cells = op.matrix @ coords / math.sqrt(float(op.rows[0].size))
    got = [float(x) for x in synthesize(embed(g, W, W.scale - op.rows[0].scale)).values]
    assert np.allclose(cells, got, atol=1e-9)
    with pytest.raises(ValueError):
        shift_full(f, iv("-4:16"))
