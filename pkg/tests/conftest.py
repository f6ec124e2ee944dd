import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from haarshift.dyadic import DyadicInterval
from haarshift.haar import DyadicFunction, LeafVector, analyze
from haarshift.scalar import Sqrt2Scalar

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)
scalars = st.builds(Sqrt2Scalar, rationals, rationals)
intervals = st.builds(DyadicInterval, st.integers(-6, 6), st.integers(-40, 40))


def random_function(I: DyadicInterval, depth: int, rng: random.Random, mean=True) -> DyadicFunction:
    """Exact step function on I with small rational leaves (plus a √2 part)."""
    vals = [Sqrt2Scalar(Fraction(rng.randint(-6, 6), rng.randint(1, 4)), Fraction(rng.randint(-2, 2), 2))
            for _ in range(1 << depth)]
    f = analyze(LeafVector(I, depth, tuple(vals)))
    if not mean:
        f = DyadicFunction(I, depth, 0, f.coefficients)
    return f


@pytest.fixture
def rng():
    return random.Random(1234)


# acceptance lines ------------------------------------------------------------

_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
