from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, strategies as st

from hardy_rellich.operators import (BILAPLACIAN_DELTA, DIRICHLET, GENERALIZED, WEIGHTED_DELTA,
                                     NonHermitianResidueError, OperatorSpec,
                                     apply_bilaplacian_delta, apply_dirichlet_laplacian,
                                     apply_generalized_laplacian, apply_laplacian_power,
                                     apply_weighted_laplacian_delta, backward_difference,
                                     hardy_energy, matvec, operator_matrix, quadratic_form,
                                     rellich_energy)
from hardy_rellich.precision import complex_sum, conj
from hardy_rellich.sequences import FiniteSequence, PositiveSequence
from hardy_rellich.weights import copson_tilde_lambda

from conftest import LINEAR, ONES, SHIFTED, finite_sequences, positive_sequences

E = FiniteSequence.unit
TOL = mpfr("1e-70")


def close(a, b, tol=TOL):
    with gmpy2.context(precision=512):
        a, b = (gmpy2.mpq(x) if isinstance(x, (int, Fraction)) else x for x in (a, b))
        return abs(a - b) <= tol * max(1, abs(a), abs(b))


def vals(S, length):
    return [S(n) for n in range(length)]


def test_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec("nope")
    with pytest.raises(ValueError):
        OperatorSpec(GENERALIZED, ONES, c=1)
    with pytest.raises(ValueError):
        OperatorSpec(GENERALIZED, ONES, c="5/2")
    with pytest.raises(ValueError):
        OperatorSpec(WEIGHTED_DELTA)
    assert OperatorSpec(GENERALIZED, ONES, c="3/2").c == Fraction(3, 2)
    assert OperatorSpec(GENERALIZED, ONES, boundary0=3).weight(0) == 3


def test_dirichlet_examples():
    assert vals(apply_dirichlet_laplacian(E(2)), 5) == [0, -1, 2, -1, 0]
    assert vals(apply_dirichlet_laplacian(E(1)), 4) == [-1, 2, -1, 0]
    lin = apply_dirichlet_laplacian(FiniteSequence(range(10)))
    assert all(lin(n) == 0 for n in range(1, 9))


def test_laplacian_power_examples():
    r = apply_laplacian_power(E(3), 2)
    assert [r(n) for n in range(1, 6)] == [1, -4, 6, -4, 1]
    A = FiniteSequence([1, 2, 3, 4])
    assert apply_laplacian_power(A, 1).values == apply_dirichlet_laplacian(A).values
    lin = apply_laplacian_power(FiniteSequence(range(12)), 2)
    assert all(lin(n) == 0 for n in range(2, 10))


def test_bilaplacian_boundary_rows_of_power():
    # rows 0 and 1 of (-Delta)^2 are 5,-4,1 and -4,6,-4,1
    M = operator_matrix(OperatorSpec(DIRICHLET), 5, alpha=2)
    assert M[0][:3] == [5, -4, 1]
    assert M[1][:4] == [-4, 6, -4, 1]


def test_generalized_examples():
    spec = OperatorSpec(GENERALIZED, LINEAR, 2)
    r = apply_generalized_laplacian(spec, E(2))
    assert close(r(1), Fraction(-1, 2))
    assert close(r(2), Fraction(5, 6))
    assert close(r(3), Fraction(-1, 3))
    assert apply_generalized_laplacian(spec, FiniteSequence()).is_zero()
    A = FiniteSequence([0, 1, -2, 5, 3])
    g = apply_generalized_laplacian(OperatorSpec(GENERALIZED, ONES, 2), A)
    d = apply_dirichlet_laplacian(A)
    assert all(close(g(n), d(n)) for n in range(1, 7))


def test_weighted_delta_examples():
    r = apply_weighted_laplacian_delta(SHIFTED, E(2))
    assert close(r(1), Fraction(-4, 3))
    assert close(r(2), Fraction(31, 12))
    assert close(r(3), Fraction(-5, 4))
    A = FiniteSequence([0, 2, 1, -1])
    w = apply_weighted_laplacian_delta(ONES, A)
    d = apply_dirichlet_laplacian(A)
    assert all(close(w(n), d(n)) for n in range(1, 6))


@given(finite_sequences(max_support=12))
def test_bilaplacian_unit_delta_is_square(A):
    b = apply_bilaplacian_delta(ONES, A)
    p = apply_laplacian_power(A, 2)
    assert all(close(b(n), p(n)) for n in range(A.support_end + 4))


@given(finite_sequences(max_support=12), positive_sequences)
def test_bilaplacian_is_twice_weighted(A, delta):
    once = apply_weighted_laplacian_delta(delta, A)
    # first application keeps its n = 0 row
    twice = apply_weighted_laplacian_delta(delta, once)
    b = apply_bilaplacian_delta(delta, A)
    assert all(close(b(n), twice(n)) for n in range(A.support_end + 4))


def test_backward_difference_examples():
    assert vals(backward_difference(E(2), 1), 5) == [0, 0, 1, -1, 0]
    d2 = backward_difference(E(2), 2)
    assert (d2(2), d2(3), d2(4)) == (1, -2, 1)
    d3 = backward_difference(E(3), 3)
    assert [d3(n) for n in range(3, 7)] == [1, -3, 3, -1]


def test_quadratic_form_examples():
    lap = lambda A: apply_dirichlet_laplacian(A)
    assert quadratic_form(lap, E(2)) == 2
    bil = lambda A: apply_bilaplacian_delta(ONES, A)
    assert quadratic_form(bil, E(3), 2) == 6
    A = FiniteSequence([0, 1, 1])
    assert quadratic_form(lap, A) == 2 == hardy_energy(A, ONES, 2)


def test_quadratic_form_rejects_non_hermitian():
    # multiplication by i is not self-adjoint
    with pytest.raises(NonHermitianResidueError):
        quadratic_form(lambda A: A.map(lambda v: mpc(0, 1) * v), FiniteSequence([0, 1]))


def test_energy_examples():
    assert hardy_energy(E(1), ONES, 2) == 2
    lam = PositiveSequence(copson_tilde_lambda)
    with gmpy2.context(precision=256):
        expected = 1 + gmpy2.sqrt(mpfr(5)) / 4
    assert close(hardy_energy(E(1), lam, 2), expected)
    assert hardy_energy(FiniteSequence(), ONES) == 0
    assert rellich_energy(ONES, E(2)) == 6
    assert rellich_energy(ONES, FiniteSequence()) == 0


def _kinds(delta, lam, c):
    return [OperatorSpec(DIRICHLET), OperatorSpec(GENERALIZED, lam, c),
            OperatorSpec(WEIGHTED_DELTA, delta), OperatorSpec(BILAPLACIAN_DELTA, delta)]


exponents = st.sampled_from([2, Fraction(3, 2), Fraction(5, 4), Fraction(19, 10)])


@given(finite_sequences(max_support=16, min_size=1), positive_sequences, positive_sequences, exponents)
def test_matrix_oracle(A, delta, lam, c):
    size = A.support_end + 4
    for spec in _kinds(delta, lam, c):
        M = operator_matrix(spec, size)
        got = spec.apply(A)
        want = matvec(M, A.padded(size))
        # the last row of the truncation is missing its right neighbour
        assert all(close(got(n), want[n]) for n in range(size - 1)), spec.kind


@given(finite_sequences(max_support=16, min_size=1), st.integers(1, 5))
def test_matrix_oracle_powers(A, alpha):
    size = A.support_end + 2 * alpha + 2
    M = operator_matrix(OperatorSpec(DIRICHLET), size, alpha=alpha)
    got = apply_laplacian_power(A, alpha)
    want = matvec(M, A.padded(size))
    assert all(close(got(n), want[n]) for n in range(A.support_end + alpha + 1))


@given(finite_sequences(zeros_below=2, max_support=16), finite_sequences(zeros_below=2, max_support=16),
       positive_sequences, positive_sequences, exponents)
def test_symmetry(A, B, delta, lam, c):
    end = max(A.support_end, B.support_end) + 3
    for spec in _kinds(delta, lam, c):
        LA, LB = spec.apply(A), spec.apply(B)
        lhs = complex_sum(LA(n) * conj(B(n)) for n in range(end))
        rhs = complex_sum(A(n) * conj(LB(n)) for n in range(end))
        assert close(lhs, rhs), spec.kind
        quadratic_form(spec.apply, A, 0)  # real, or it raises


@given(finite_sequences(zeros_below=2, max_support=16), positive_sequences)
def test_rellich_energy_matches_form(A, delta):
    form = quadratic_form(lambda B: apply_bilaplacian_delta(delta, B), A, 2)
    assert close(form, rellich_energy(delta, A))


@given(finite_sequences(zeros_below=1, max_support=16))
def test_hardy_energy_matches_dirichlet_form(A):
    assert close(hardy_energy(A, ONES, 2), quadratic_form(apply_dirichlet_laplacian, A, 1))


@given(finite_sequences(zeros_below=1, max_support=16), positive_sequences, exponents)
def test_hardy_energy_matches_generalized_form(A, lam, c):
    spec = OperatorSpec(GENERALIZED, lam, c)
    assert close(hardy_energy(A, lam, c), quadratic_form(spec.apply, A, 1))
