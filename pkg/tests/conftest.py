from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import HealthCheck, settings, strategies as st

from hardy_rellich.sequences import FiniteSequence, PositiveSequence

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion id -> "PASS"/"FAIL", filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"{status} criterion {key}: {text}")


@pytest.fixture(autouse=True)
def mpfr_256():
    # oracles built inside tests get the library's default working precision
    with gmpy2.context(precision=256):
        yield


def seq(name, fn):
    return PositiveSequence(fn, 1, name)


ONES = seq("ones", lambda n: 1)
LINEAR = seq("linear", lambda n: n)
SHIFTED = seq("shifted", lambda n: Fraction(n + 2, n + 1))


def power(r):
    r = Fraction(r)
    return seq(f"pow:{r}", lambda n: mpfr(n) ** mpfr(r))


@pytest.fixture
def ones():
    return ONES


@pytest.fixture
def shifted():
    return SHIFTED


small_complex = st.builds(lambda a, b: mpc(a, b), st.integers(-9, 9), st.integers(-9, 9))


def finite_sequences(zeros_below=0, max_support=16, min_size=0):
    return st.lists(small_complex, min_size=min_size, max_size=max_support - zeros_below + 1).map(
        lambda vals: FiniteSequence([0] * zeros_below + vals))


positive_sequences = st.lists(st.fractions(min_value=Fraction(1, 4), max_value=4),
                              min_size=24, max_size=24).map(
    lambda vals: PositiveSequence(lambda n, v=tuple(vals): v[(n - 1) % 24], 1, "random"))
