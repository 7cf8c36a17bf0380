from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr
from hypothesis import given, strategies as st

from hardy_rellich import factorization as F
from hardy_rellich.operators import hardy_energy, matvec, rellich_energy
from hardy_rellich.precision import abs_sq, real_sum
from hardy_rellich.sequences import FiniteSequence, PositiveSequence
from hardy_rellich.weights import eta_weight, sigma2_weight

from conftest import LINEAR, ONES, SHIFTED, finite_sequences, positive_sequences, power, seq

MU = power("3/2")


def test_gamma_one_matches_closed_form():
    g1 = F.gamma_coefficients(SHIFTED, MU, 1).gamma_sq_at(1)
    with mpmath.workprec(300):
        oracle = 2 * mpmath.sqrt(2) * (2 * mpmath.mpf(16) / 15 + mpmath.mpf(12) / 10 + 1) - 3 * mpmath.sqrt(3)
        assert abs(mpmath.mpf(str(g1)) - oracle) < mpmath.mpf(10) ** -70
    assert abs(float(g1) - 7.06036) < 1e-4


def test_gamma_one_bracketed():
    rep = F.gamma_bounds_check(SHIFTED, MU, 5)
    n, lo, g, hi = rep.details["rows"][0]
    assert n == 1
    assert abs(float(lo) - 5.19616) < 1e-5 and abs(hi - 8) < mpfr(2) ** -200
    assert lo < g < hi


def test_gamma_bounds_hold():
    rep = F.gamma_bounds_check(SHIFTED, MU, 2000)
    assert rep.passed and not rep.witnesses
    assert rep.details["min_rel_gap_lower"] > 0 and rep.details["min_rel_gap_upper"] > 0


def test_gamma_bounds_unit_delta_exploration():
    rep = F.gamma_bounds_check(ONES, MU, 1000)
    assert rep.passed


def test_beta_closed_form_unit_delta():
    c = F.remainder_coefficients(ONES, MU, 4)
    g = gmpy2.sqrt(c.gamma_sq_at(1))
    expect = (g + mpfr(3) ** mpfr(1.5) / g) / mpfr(2) ** mpfr(1.5)
    assert abs(c.beta_at(1) - expect) < mpfr(2) ** -240
    assert all(b > 0 for b in c.beta)


@pytest.mark.parametrize("delta", [SHIFTED, ONES])
def test_r2_vanishes_on_mu(delta):
    c = F.remainder_coefficients(delta, MU, 300)
    vals = F.remainder2_on_mu(delta, MU, c)
    for n, v in enumerate(vals, 1):
        assert abs(v) <= mpfr(2) ** -230 * MU(n + 2)


def test_r2_vanishes_on_mu_window():
    W = 30
    c = F.remainder_coefficients(SHIFTED, MU, W)
    out = F.remainder2_apply(SHIFTED, c, FiniteSequence([0] + [MU(n) for n in range(1, W + 1)]))
    for n in range(1, W - 1):
        assert abs(out(n)) <= mpfr(2) ** -230 * MU(n + 2)
    assert out(W) != 0


def test_r1_vanishes_on_mu():
    for lam, c, mu in [(ONES, 2, LINEAR), (LINEAR, Fraction(3, 2), power("1/2")),
                       (seq("sq", lambda n: n * n), Fraction(7, 4), power("3/4"))]:
        spec = F.Remainder1Spec(lam, c, mu)
        W = 40
        out = F.remainder1_apply(spec, FiniteSequence([0] + [mu(n) for n in range(1, W + 1)]))
        for n in range(1, W):
            assert abs(out(n)) <= mpfr(2) ** -240 * (1 + abs(mu(n + 1)))


def test_r1_on_unit_vector():
    spec = F.Remainder1Spec(ONES, 2, power("1/2"))
    out = F.remainder1_apply(spec, FiniteSequence.unit(1))
    assert abs(out(1) - mpfr(2) ** mpfr(0.25)) < mpfr(2) ** -250
    assert out(0) == 0
    assert F.remainder1_apply(spec, FiniteSequence()).is_zero()


def test_zero_input():
    c = F.remainder_coefficients(SHIFTED, MU, 10)
    assert F.remainder2_apply(SHIFTED, c, FiniteSequence()).is_zero()


@given(finite_sequences(zeros_below=1, max_support=14), positive_sequences, positive_sequences,
       st.sampled_from([Fraction(3, 2), 2, Fraction(5, 4)]))
def test_r1_matrix_matches_apply(A, lam, mu, c):
    spec = F.Remainder1Spec(lam, c, mu)
    size = A.support_end + 2
    M = F.remainder1_matrix(spec, size)
    got = matvec(M, [A(k) for k in range(size)])
    want = F.remainder1_apply(spec, A)
    for n in range(1, size):
        assert abs(got[n - 1] - want(n)) <= mpfr(2) ** -240 * (1 + abs(want(n)))


@given(finite_sequences(zeros_below=2, max_support=14))
def test_r2_matrix_matches_apply(A):
    size = max(A.support_end, 2) + 3
    c = F.remainder_coefficients(SHIFTED, MU, size)
    M = F.remainder2_matrix(SHIFTED, c, size)
    got = matvec(M, [A(k) for k in range(size)])
    want = F.remainder2_apply(SHIFTED, c, A)
    for n in range(1, A.support_end + 1):
        assert abs(got[n - 1] - want(n)) <= mpfr(2) ** -230 * (1 + abs(want(n)))


@given(finite_sequences(zeros_below=1, max_support=20, min_size=1), positive_sequences,
       positive_sequences, st.sampled_from([Fraction(3, 2), 2, Fraction(6, 5)]))
def test_hardy_factorization_exact(A, lam, mu, c):
    lhs = hardy_energy(A, lam, c)
    weighted = real_sum([eta_weight(lam, c, mu, n) * abs_sq(A(n)) for n in range(1, A.support_end + 1)])
    rem = real_sum([abs_sq(v) for v in F.remainder1_apply(F.Remainder1Spec(lam, c, mu), A).values])
    assert rem >= 0
    assert abs(lhs - weighted - rem) <= 1e-25 * max(abs(lhs), abs(weighted), rem, mpfr(1e-300))


@given(finite_sequences(zeros_below=2, max_support=20, min_size=1),
       st.sampled_from([(SHIFTED, MU), (ONES, MU), (SHIFTED, power("5/4"))]))
def test_rellich_factorization_exact(A, pair):
    delta, mu = pair
    c = F.remainder_coefficients(delta, mu, A.support_end + 2)
    lhs = rellich_energy(delta, A)
    weighted = real_sum([sigma2_weight(delta, mu, n) * abs_sq(A(n)) for n in range(2, A.support_end + 1)])
    rem = real_sum([abs_sq(v) for v in F.remainder2_apply(delta, c, A).values])
    assert abs(lhs - weighted - rem) <= 1e-25 * max(abs(lhs), abs(weighted), rem, mpfr(1e-300))


@pytest.mark.parametrize("base,index", [(3, 1), (2, 3)])
def test_breakdown(base, index):
    delta = seq(f"{base}^n", lambda n: base ** n)
    with pytest.raises(F.FactorizationBreakdown) as exc:
        F.gamma_coefficients(delta, MU, 50)
    assert exc.value.index == index and exc.value.value <= 0
    res = F.try_gamma_coefficients(delta, MU, 50)
    assert isinstance(res, F.FactorizationBreakdown) and res.index == index


def test_breakdown_quadratic_delta():
    res = F.try_gamma_coefficients(seq("n^2", lambda n: n * n), MU, 50)
    assert isinstance(res, F.FactorizationBreakdown) and res.index == 2


def test_halving_delta_survives():
    # the decaying example does not break down in this range
    res = F.try_gamma_coefficients(seq("2^-n", lambda n: Fraction(1, 2 ** n)), MU, 50)
    assert isinstance(res, F.RemainderCoefficients)


def test_breakdown_propagates_through_bounds_check():
    with pytest.raises(F.FactorizationBreakdown):
        F.gamma_bounds_check(seq("3^n", lambda n: 3 ** n), MU, 10)


def test_coverage_errors():
    c = F.gamma_coefficients(SHIFTED, MU, 5)
    with pytest.raises(F.CoverageError):
        c.gamma_sq_at(6)
    with pytest.raises(F.CoverageError):
        c.beta_at(1)
    full = F.beta_coefficients(SHIFTED, MU, c)
    with pytest.raises(F.CoverageError):
        F.remainder2_apply(SHIFTED, full, FiniteSequence.unit(6))
    with pytest.raises(F.CoverageError):
        F.remainder2_matrix(SHIFTED, full, 8)
    with pytest.raises(ValueError):
        F.gamma_coefficients(SHIFTED, MU, 0)


def test_coefficients_immutable():
    c = F.remainder_coefficients(SHIFTED, MU, 4)
    with pytest.raises(Exception):
        c.n_max = 9
    assert c.provenance == {"delta": "shifted", "mu": "pow:3/2"}
