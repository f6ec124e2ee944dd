"""Machine-readable audit of the published claims about the Haar shift.

Every claim is checked exactly against the engine over a finite universe of
dyadic intervals, and the engine itself is checked against the brute-force
oracle.  A ``discrepancy`` is a finding about a printed statement, never a
failure of the audit; only engine/oracle disagreement is.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bounds import annihilating_witness, extremal_interior, gap_rule
from .dyadic import (
    DyadicInterval,
    apex_scale,
    epsilon_child,
    meet,
    shift_sign,
)
from .haar import DyadicFunction, LeafVector, analyze, norm2
from .oracle import agreement_sweep, universe
from .scalar import format_scalar, pow2, pow2_half
from .shift import (
    indicator_constant,
    indicator_norm2_ratio,
    interior_constant,
    printed_interior_norm2,
    restricted_indicator_shift,
    restricted_shift,
)

VERIFIED = "verified"
SLACK = "verified-with-slack"
DISCREPANCY = "discrepancy"

# claim id -> short description of the statement under test
CATALOGUE = {
    "L1": "self-restriction lemma: 1_I Ш 1_I = sqrt|I| h_I",
    "FC1": "geometric sum over all strict ancestors",
    "FC2": "geometric sum over a finite ancestor chain",
    "T3": "covering theorem: constant >= 1 - (3/4)|I|/|K|",
    "Lsign": "sign lemma for the ancestor walk above K∧I",
    "L4.1a": "zero-anchored gap lemma, K in the far-left grandchild: zero",
    "L4.1b": "zero-anchored gap lemma, K in the inner-left grandchild: -2|I|/|L|",
    "L4.2": "zero-anchored gap lemma, I left and K right: ±|I|/|L|",
    "L4-anchored": "gap table when K∧I is the right child of the apex",
    "T4(i)": "gap theorem: opposite half-lines give zero",
    "T4(ii)": "gap theorem: K in a block beyond the apex of I",
    "T4(iii)": "gap theorem: I in the right half of its apex",
    "T5(i)": "interior theorem: ||1_K Ш f||^2 >= ||1_K f||^2 and >= (1/2)||1_parent(K) f||^2",
    "T5(ii)": "interior theorem: no uniform lower bound when I ⊋ parent(K)",
    "PF": "interior norm identity with mean coefficient ε(K,I)",
    "R4": "gap remark: constant <= |I||K|/|K∧I|^2 <= 1/4, or <= 1/2 when K∧I = parent(K)",
    "T5-extremal": "proposed extremal f = -ε(K,I)|I|^(-1/2) 1_I + h_I is annihilated",
    "ORACLE": "exact engine agrees with the truncated brute-force oracle",
}


def q(x) -> str:
    return format_scalar(x)


@dataclass
class ClaimReport:
    claim_id: str
    paper_ref: str
    status: str
    pairs_checked: int
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "claim": self.claim_id,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "pairs_checked": self.pairs_checked,
            "details": self.details,
        }


def _example_key(item):
    I, K, info = item[0], item[1], item[4]
    return (info.get("rank", 0), abs(I.scale) + abs(K.scale) + abs(I.index) + abs(K.index), I, K)


class _Tracker:
    """Collects failures and tightness for one claim."""

    def __init__(self, claim_id: str, inequality: bool = False):
        self.claim_id = claim_id
        self.inequality = inequality
        self.checked = 0
        self.failures: list = []
        self.tight = 0
        self.min_slack = None
        self.tightest = None
        self.extra: dict = {}

    def check(self, I, K, ok: bool, computed, printed, slack=None, **info):
        self.checked += 1
        if not ok:
            self.failures.append((I, K, computed, printed, info))
        elif slack is not None:
            if slack == 0:
                self.tight += 1
            if self.min_slack is None or slack < self.min_slack:
                self.min_slack = slack
                self.tightest = (I, K)

    def report(self) -> ClaimReport:
        details = dict(self.extra)
        if self.failures:
            I, K, computed, printed, info = min(self.failures, key=_example_key)
            info = dict(info)
            info.pop("rank", None)
            expect = info.pop("reproduce", None)
            example = {"I": str(I), "K": str(K), "computed": computed, "printed": printed, **info}
            if expect:
                example["reproduce"] = {"command": f"haarshift constant --i {I} --k {K} --json", "expect": expect}
            details["failures"] = len(self.failures)
            details["example"] = example
            status = DISCREPANCY
        elif self.inequality and self.checked and self.tight == 0:
            status = SLACK
        else:
            status = VERIFIED
        if not self.checked:
            details["note"] = "no applicable pairs in this universe"
        if self.inequality and self.min_slack is not None:
            details["min_slack"] = q(self.min_slack)
            details["tight_pairs"] = self.tight
            details["tightest"] = {"I": str(self.tightest[0]), "K": str(self.tightest[1])}
        return ClaimReport(self.claim_id, CATALOGUE[self.claim_id], status, self.checked, details)


def _pm(x: Fraction) -> str:
    return ("+" if x > 0 else "") + q(x)


def _pseudorandom_function(I: DyadicInterval, depth: int, rng: random.Random) -> DyadicFunction:
    vals = [Fraction(rng.randint(-4, 4), rng.choice((1, 2))) for _ in range(1 << depth)]
    return analyze(LeafVector(I, depth, vals))


# claim checks -------------------------------------------------------------


def _check_equal(I, trackers):
    form = restricted_indicator_shift(I, I)
    # sqrt|I| h_I has no constant part and haar coefficient sqrt|I|
    ok = (not form.constant) and form.haar == pow2_half(I.scale) and not form.inner
    trackers["L1"].check(
        I, I, ok,
        f"constant={q(form.constant)}; haar={q(form.haar)}",
        f"constant=0; haar={q(pow2_half(I.scale))}",
        reproduce={"form.constant": q(form.constant), "form.haar": q(form.haar)},
    )


def _check_fc(intervals, trackers):
    fc1 = trackers["FC1"]
    for L in intervals:
        # partial sums telescope: sum_{m=1}^{N} 2^-m / |L| = (1 - 2^-N) / |L|
        total = Fraction(0)
        ok = True
        for m in range(L.scale + 1, L.scale + 41):
            total += 1 / pow2(m)
            if total != (1 - pow2(L.scale - m)) / L.size:
                ok = False
                break
        fc1.check(L, L, ok, q(total), q(1 / L.size))


def _check_nested(I, K, trackers):
    """I ⊊ K: FC2 on the chain, T3 bound."""
    total = Fraction(0)
    for m in range(I.scale + 1, K.scale + 1):
        total += 1 / pow2(m)
    expected = (1 - I.size / K.size) / I.size
    trackers["FC2"].check(I, K, total == expected, q(total), q(expected))


def _check_t3(I, K, trackers):
    exact = indicator_norm2_ratio(I, K)
    bound = 1 - Fraction(3, 4) * I.size / K.size
    ok = bound <= exact <= 1
    trackers["T3"].check(I, K, ok, q(exact), ">=" + q(bound), exact - bound)


def _check_lsign(I, K, L, trackers):
    """Signs of h_{L^(k)}(I) Ш h_{L^(k)}(K) against the printed tables.

    Every term has magnitude 1/|L^(k)|, so only signs are compared.
    """
    top = max(apex_scale(I), apex_scale(K)) + 3
    bad = None
    if K.parent() != L:
        sign = epsilon_child(I, L) * shift_sign(L, K)
        g = (K.index >> (L.scale - K.scale - 2)) & 1
        # (L+)+ -> -1, (L+)- -> +1, (L-)+ -> -1, (L-)- -> +1
        printed = -1 if g else 1
        if sign != printed:
            bad = ("(i)", L, sign, printed)
    eps_k = epsilon_child(K, L)
    below, mid = None, L
    for m in range(L.scale + 1, top + 1):
        Lk = L.ancestor(m)
        sign = epsilon_child(I, Lk) * shift_sign(Lk, K)
        if below is None:
            printed = eps_k
        else:
            printed = 1 if below.index & 1 else -1
        if bad is None and sign != printed:
            bad = ("(ii)" if below is None else "(iii)", Lk, sign, printed)
        below, mid = mid, Lk
    if bad is None:
        trackers["Lsign"].check(I, K, True, "", "")
    else:
        item, Lk, sign, printed = bad
        trackers["Lsign"].check(
            I, K, False, q(sign / Lk.size), q(printed / Lk.size), item=item, L=str(Lk),
        )


def _check_gap_right(I, K, L, c, exact, trackers):
    """Gap pairs on the right half-line: zero-anchored lemma, table, theorem items."""
    lo, hi = L.children()
    if L.index == 0:
        if hi.contains(I) and lo.strictly_contains(K):
            ll, lr = lo.children()
            if ll.contains(K):
                trackers["L4.1a"].check(I, K, c == 0, q(c), "0", reproduce={"form.constant": q(c)})
            elif lr.contains(K):
                printed = -2 * I.size / L.size
                trackers["L4.1b"].check(I, K, c == printed, q(c), q(printed), reproduce={"form.constant": q(c)})
        if lo.contains(I) and hi.strictly_contains(K):
            rl, rr = hi.children()
            sign = 1 if rr.contains(K) else -1
            printed = sign * I.size / L.size
            trackers["L4.2"].check(
                I, K, c == printed, _pm(c), _pm(printed),
                magnitude_equal=abs(c) == abs(printed), reproduce={"form.constant": q(c)},
            )
    elif L.index == 1 and K.parent() != L:
        # L is the right child of the apex: the four-case table
        unit = I.size / (2 * L.size)
        if lo.contains(I):
            rl, rr = hi.children()
            printed = -unit if rr.contains(K) else 3 * unit
        else:
            ll, lr = lo.children()
            # the last row is read with I in the right child
            printed = -3 * unit if lr.contains(K) else unit
        trackers["L4-anchored"].check(I, K, c == printed, q(c), q(printed), reproduce={"form.constant": q(c)})

    rule, bound = gap_rule(I, K)
    if rule == "gap-far":
        trackers["T4(ii)"].check(
            I, K, exact >= bound, q(exact), ">=" + q(bound), exact - bound, reproduce={"exact_constant": q(exact)},
        )
    elif rule in ("gap-anchored-zero", "gap-anchored-near", "gap-same-block"):
        t = trackers["T4(iii)"]
        sub = {"gap-anchored-zero": "a", "gap-anchored-near": "b", "gap-same-block": "c"}[rule]
        counts = t.extra.setdefault("subcases", {"a": 0, "b": 0, "c": 0})
        counts[sub] += 1
        t.check(I, K, exact >= bound, q(exact), ">=" + q(bound), exact - bound, item=sub,
                reproduce={"exact_constant": q(exact)})


def _check_gap(I, K, trackers):
    L = meet(I, K)
    c = indicator_constant(I, K)
    exact = c * c * K.size / I.size
    if K.parent() == L:
        exact += I.size / (2 * L.size)
        bound = Fraction(1, 2)
    else:
        bound = I.size * K.size / (L.size * L.size)
    trackers["R4"].check(
        I, K, exact <= bound <= Fraction(1, 2), q(exact), "<=" + q(bound), bound - exact,
        reproduce={"exact_constant": q(exact)},
    )
    _check_lsign(I, K, L, trackers)
    if I.index >= 0:
        _check_gap_right(I, K, L, c, exact, trackers)


def _check_opposite(I, K, trackers):
    form = restricted_indicator_shift(I, K)
    trackers["T4(i)"].check(I, K, form.is_zero(), q(form.norm2()), "0")


def _check_interior(I, K, trackers, rng, extra_functions: int):
    C = interior_constant(I, K)
    eps = epsilon_child(K, I)
    # f = 1_I: ||1_K Ш f||^2 = C^2 |K|, ||1_K f||^2 = |K|, ||1_parent(K) f||^2 / 2 = |K|
    lhs = C * C * K.size
    expect = {"form.constant": q(C), "form.norm2": q(lhs)}
    trackers["T5(i)"].check(I, K, lhs >= K.size, q(lhs), ">=" + q(K.size), f="1_I", reproduce=expect)
    trackers["PF"].check(
        I, K, C * C == 1, q(lhs), q(K.size), f="1_I", printed_constant=q(eps), reproduce=expect,
    )
    pf = trackers["PF"].extra
    for _ in range(extra_functions):
        f = _pseudorandom_function(I, min(3, I.scale - K.scale), rng)
        pf["pseudorandom_checked"] = pf.get("pseudorandom_checked", 0) + 1
        if restricted_shift(f, K).norm2 != printed_interior_norm2(f, K):
            pf["pseudorandom_mismatches"] = pf.get("pseudorandom_mismatches", 0) + 1
    if K.parent() != I:
        w = annihilating_witness(I, K)
        zero = restricted_shift(w, K).norm2
        trackers["T5(ii)"].check(I, K, not zero and bool(norm2(w)), q(zero), "0")
        f = extremal_interior(I, K)
        val = restricted_shift(f, K).norm2
        nf = norm2(f)
        trackers["T5-extremal"].check(
            I, K, (not val) and nf == 2, q(val), "0", f="extremal", norm2_f=q(nf),
            printed_constant=q(eps), rank=0 if C != eps else 1, reproduce={"form.constant": q(C)},
        )


# driver -------------------------------------------------------------------


@dataclass(frozen=True)
class Universe:
    scales: tuple
    indices: tuple
    mirrored: bool = True

    def intervals(self) -> list[DyadicInterval]:
        return universe(self.scales, self.indices, self.mirrored)

    def describe(self) -> dict:
        return {"scales": [self.scales[0], self.scales[-1]], "indices": [self.indices[0], self.indices[-1]],
                "mirrored": self.mirrored}


DEFAULT_UNIVERSE = Universe(tuple(range(-6, 7)), tuple(range(64)))
ORACLE_UNIVERSE = Universe(tuple(range(-3, 4)), tuple(range(8)))


def audit_claims(
    claims_universe: Universe = DEFAULT_UNIVERSE,
    oracle_universe: Universe | None = ORACLE_UNIVERSE,
    depth: int = 4,
    A: int = 24,
    seed: int = 0,
    extra_functions: int = 1,
    interior_sample: int = 2000,
) -> list[ClaimReport]:
    """Run every claim over the universe; returns reports in catalogue order.

    ``interior_sample`` caps how many interior pairs also get pseudorandom
    test functions (the indicator test runs on all of them).
    """
    trackers = {cid: _Tracker(cid, inequality=cid in ("T3", "T4(ii)", "T4(iii)", "R4")) for cid in CATALOGUE}
    rng = random.Random(seed)
    intervals = claims_universe.intervals()
    _check_fc(intervals, trackers)
    by_side = {True: [I for I in intervals if I.index >= 0], False: [I for I in intervals if I.index < 0]}
    interior_seen = 0
    for I in intervals:
        _check_equal(I, trackers)
        right = I.index >= 0
        for K in by_side[not right]:
            _check_opposite(I, K, trackers)
        for K in by_side[right]:
            if K == I:
                _check_t3(I, K, trackers)
            elif K.strictly_contains(I):
                _check_nested(I, K, trackers)
                _check_t3(I, K, trackers)
            elif I.strictly_contains(K):
                n = extra_functions if interior_seen < interior_sample else 0
                interior_seen += 1
                _check_interior(I, K, trackers, rng, n)
            else:
                _check_gap(I, K, trackers)
    reports = [trackers[cid].report() for cid in CATALOGUE if cid != "ORACLE"]
    for r in reports:
        r.details["universe"] = claims_universe.describe()
    if oracle_universe is not None:
        sweep = agreement_sweep(oracle_universe.intervals(), max_depth=depth, A=A)
        details = {
            "universe": oracle_universe.describe(),
            "leaf_depth_max": depth,
            "A": A,
            "points": sweep.points,
            "max_deviation": float(f"{sweep.max_deviation:.6e}"),
            "bound": sweep.bound,
            "ratio_range": None if sweep.min_ratio is None else [round(sweep.min_ratio, 6), round(sweep.max_ratio, 6)],
        }
        if sweep.failures:
            I, K, v = sweep.failures[0]
            details["failures"] = len(sweep.failures)
            details["example"] = {"I": I, "K": K, "computed": str(v), "printed": "agreement"}
        status = VERIFIED if sweep.ok else DISCREPANCY
        reports.append(ClaimReport("ORACLE", CATALOGUE["ORACLE"], status, sweep.pairs, details))
    return reports


def engine_oracle_ok(reports: Sequence[ClaimReport]) -> bool:
    return all(r.status != DISCREPANCY for r in reports if r.claim_id == "ORACLE")


def reports_to_json(reports: Iterable[ClaimReport]) -> str:
    return json.dumps([r.to_json() for r in reports], ensure_ascii=False, indent=1, sort_keys=False) + "\n"
