from fractions import Fraction

import pytest
from gmpy2 import mpfr
from hypothesis import given

from hardy_rellich.sequences import (BoundaryConditionError, FiniteSequence, InvalidHorizonError,
                                     InvalidOrderError, PositiveSequence, constant_sequence,
                                     knopp_transform, partial_sums, weighted_partial_sum_transform,
                                     weighted_norm_sq)

from conftest import finite_sequences


def test_finite_sequence_basics():
    A = FiniteSequence([0, 1, 2, 0, 0])
    assert A.support_end == 2
    assert A(-1) == 0 and A(5) == 0 and A[1] == 1
    assert FiniteSequence().support_end == -1
    assert FiniteSequence.unit(3).values == (0, 0, 0, 1)
    assert FiniteSequence.from_mapping({2: 5}).values == (0, 0, 5)


def test_boundary_constructors():
    with pytest.raises(BoundaryConditionError):
        FiniteSequence.dirichlet([1, 2])
    with pytest.raises(BoundaryConditionError):
        FiniteSequence.rellich([0, 1, 2])
    assert FiniteSequence.rellich([0, 0, 3]).support_end == 2


def test_positive_sequence_rejects_nonpositive():
    with pytest.raises(ValueError):
        PositiveSequence(lambda n: 1, zero_value=0)
    bad = PositiveSequence(lambda n: 1 - n)
    with pytest.raises(ValueError):
        bad(2)


def test_partial_sums_examples():
    Q = partial_sums(PositiveSequence(lambda n: n), 4)
    assert [Q(n) for n in range(1, 5)] == [1, 3, 6, 10]
    S = partial_sums(PositiveSequence(lambda n: n * n), 3)
    assert [S(n) for n in range(1, 4)] == [n * (n + 1) * (2 * n + 1) // 6 for n in range(1, 4)]
    U = partial_sums(constant_sequence(), 5)
    assert [U(n) for n in range(1, 6)] == [1, 2, 3, 4, 5]
    with pytest.raises(IndexError):
        U(6)


def test_partial_sum_differences_exact():
    q = PositiveSequence(lambda n: Fraction(1, n))
    Q = partial_sums(q, 50)
    assert all(Q(n) - Q(n - 1) == q(n) for n in range(2, 51))


def test_weighted_partial_sum_transform():
    A = weighted_partial_sum_transform(FiniteSequence.unit(1), PositiveSequence(lambda n: n ** 3), 6)
    assert [A(n) for n in range(1, 7)] == [1] * 6
    a = FiniteSequence([0, 1, 1])
    A = weighted_partial_sum_transform(a, PositiveSequence(lambda n: n * n), 5)
    assert A.values == (0, 1, 5, 5, 5, 5)
    assert weighted_partial_sum_transform(FiniteSequence(), constant_sequence(), 3).is_zero()
    with pytest.raises(InvalidHorizonError):
        weighted_partial_sum_transform(a, constant_sequence(), 1)


def test_knopp_transform_examples():
    A = knopp_transform(FiniteSequence.unit(1), 2, 8)
    assert [A(n) for n in range(1, 9)] == list(range(1, 9))
    B = knopp_transform(FiniteSequence.unit(2), 2, 8)
    assert [B(n) for n in range(9)] == [0, 0] + [n - 1 for n in range(2, 9)]
    with pytest.raises(InvalidOrderError):
        knopp_transform(FiniteSequence.unit(1), 0)


@given(finite_sequences(zeros_below=1))
def test_knopp_order_one_is_partial_sum_of_moduli(a):
    h = max(a.support_end, 0) + 3
    lhs = knopp_transform(a, 1, h)
    rhs = weighted_partial_sum_transform(a.map(abs), constant_sequence(), h)
    assert lhs.values == rhs.values


def test_weighted_norm_examples():
    w = lambda n: mpfr(1) / (4 * n * n)
    assert weighted_norm_sq(FiniteSequence.unit(2), w) == mpfr(1) / 16
    assert weighted_norm_sq(FiniteSequence(), w) == 0
    v = weighted_norm_sq(FiniteSequence([0, 1, 1]), lambda n: Fraction(1, n * (n + 1) ** 2))
    assert abs(v - mpfr(Fraction(11, 36), 256)) < mpfr(10) ** -75


@given(finite_sequences())
def test_weighted_norm_unit_weight_is_l2(A):
    # entries are small Gaussian integers, so the naive loop is exact
    naive = sum(int(v.real) ** 2 + int(v.imag) ** 2 for v in A.values[1:])
    got = weighted_norm_sq(A, lambda n: 1)
    assert abs(got - naive) <= 1e-30 * max(1, abs(naive))
