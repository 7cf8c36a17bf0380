"""Difference operators on the half-line and their quadratic forms.

Every operator returns a sequence two indices wider than the support of its
input and computes the n = 0 row, even though the forms used downstream start
their sums at n = 1 or n = 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .precision import (abs_sq, complex_sum, complex_type, conj, precise, real_sum,
                        resolve, to_real)
from .sequences import FiniteSequence, InvalidOrderError, PositiveSequence

DIRICHLET = "dirichlet"
GENERALIZED = "generalized_lambda_c"
WEIGHTED_DELTA = "weighted_delta"
BILAPLACIAN_DELTA = "bilaplacian_delta"
KINDS = (DIRICHLET, GENERALIZED, WEIGHTED_DELTA, BILAPLACIAN_DELTA)


class NonHermitianResidueError(ArithmeticError):
    """A quadratic form of a self-adjoint operator came out with an imaginary part."""


def as_exponent(c):
    """Exact representation of a real parameter given as str/float/int/Fraction."""
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    return c


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    weight: PositiveSequence | None = None
    c: object = 2
    boundary0: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind != DIRICHLET and self.weight is None:
            raise ValueError(f"{self.kind} needs a weight sequence")
        object.__setattr__(self, "c", as_exponent(self.c))
        if self.kind == GENERALIZED and not (1 < self.c <= 2):
            raise ValueError(f"c must lie in (1, 2], got {self.c}")
        if self.boundary0 is not None:
            if not self.boundary0 > 0:
                raise ValueError("boundary0 must be positive")
            object.__setattr__(self, "weight", self.weight.with_zero_value(self.boundary0))

    def apply(self, A: FiniteSequence, *, prec=None) -> FiniteSequence:
        if self.kind == DIRICHLET:
            return apply_dirichlet_laplacian(A, prec=prec)
        if self.kind == GENERALIZED:
            return apply_generalized_laplacian(self, A, prec=prec)
        if self.kind == WEIGHTED_DELTA:
            return apply_weighted_laplacian_delta(self.weight, A, prec=prec)
        return apply_bilaplacian_delta(self.weight, A, prec=prec)


def hardy_coefficients(lam: PositiveSequence, c, n_max: int) -> list:
    """omega_n = Lambda_n^(2-c) / lambda_n for 0 <= n <= n_max (Lambda_0 = lambda_0)."""
    c = as_exponent(c)
    if c == 2:
        return [1 / to_real(lam(n)) for n in range(n_max + 1)]
    expo = to_real(2 - c)
    out = [to_real(lam(0)) ** expo / to_real(lam(0))]
    big = 0
    for n in range(1, n_max + 1):
        ln = to_real(lam(n))
        big = big + ln
        out.append(big ** expo / ln)
    return out


@precise
def apply_dirichlet_laplacian(A: FiniteSequence, *, prec=None) -> FiniteSequence:
    m = A.support_end + 3
    out = [2 * A(0) - A(1)]
    out += [2 * A(n) - A(n - 1) - A(n + 1) for n in range(1, m)]
    return FiniteSequence(out)


@precise
def apply_laplacian_power(A: FiniteSequence, alpha: int, *, prec=None) -> FiniteSequence:
    """alpha-fold composition of the Dirichlet Laplacian."""
    if alpha < 1:
        raise InvalidOrderError(f"alpha must be >= 1, got {alpha}")
    out = A
    for _ in range(alpha):
        out = apply_dirichlet_laplacian(out, prec=prec)
    return out


def _tridiagonal(omega: list, A: FiniteSequence) -> FiniteSequence:
    m = A.support_end + 3
    out = [(omega[0] + omega[1]) * A(0) - omega[1] * A(1)]
    for n in range(1, m):
        out.append((omega[n] + omega[n + 1]) * A(n) - omega[n] * A(n - 1) - omega[n + 1] * A(n + 1))
    return FiniteSequence(out)


@precise
def apply_generalized_laplacian(spec: OperatorSpec, A: FiniteSequence, *, prec=None) -> FiniteSequence:
    if spec.kind != GENERALIZED:
        raise ValueError("apply_generalized_laplacian needs a generalized_lambda_c spec")
    omega = hardy_coefficients(spec.weight, spec.c, A.support_end + 4)
    return _tridiagonal(omega, A)


@precise
def apply_weighted_laplacian_delta(delta: PositiveSequence, A: FiniteSequence, *, prec=None) -> FiniteSequence:
    d = [to_real(delta(n)) for n in range(A.support_end + 5)]
    return _tridiagonal(d, A)


@precise
def apply_bilaplacian_delta(delta: PositiveSequence, A: FiniteSequence, *, prec=None) -> FiniteSequence:
    """Five-diagonal square of the delta-weighted Laplacian, row by row.

    The A_1 coefficient of row 0 is -(2 d1^2 + d0 d1 + d1 d2), the value that
    makes the matrix symmetric and reduces to the (5, -4, 1) row at d = 1.
    """
    m = A.support_end + 3
    d = [to_real(delta(n)) for n in range(m + 3)]
    out = [
        ((d[0] + d[1]) ** 2 + d[1] ** 2) * A(0)
        - (2 * d[1] ** 2 + d[0] * d[1] + d[1] * d[2]) * A(1)
        + d[1] * d[2] * A(2),
        -(2 * d[1] ** 2 + d[0] * d[1] + d[1] * d[2]) * A(0)
        + ((d[1] + d[2]) ** 2 + d[1] ** 2 + d[2] ** 2) * A(1)
        - (2 * d[2] ** 2 + d[1] * d[2] + d[2] * d[3]) * A(2)
        + d[2] * d[3] * A(3),
    ]
    for n in range(2, m):
        out.append(
            ((d[n] + d[n + 1]) ** 2 + d[n] ** 2 + d[n + 1] ** 2) * A(n)
            - (2 * d[n] ** 2 + d[n] * d[n - 1] + d[n] * d[n + 1]) * A(n - 1)
            - (2 * d[n + 1] ** 2 + d[n] * d[n + 1] + d[n + 1] * d[n + 2]) * A(n + 1)
            + d[n] * d[n - 1] * A(n - 2)
            + d[n + 1] * d[n + 2] * A(n + 2)
        )
    return FiniteSequence(out)


def backward_difference(A: FiniteSequence, alpha: int) -> FiniteSequence:
    """(nabla^alpha A)_n = sum_{k=1}^{n} (-1)^(k+1) C(alpha, k-1) A_{n-k+1}."""
    if alpha < 1:
        raise InvalidOrderError(f"alpha must be >= 1, got {alpha}")
    out = []
    for n in range(A.support_end + alpha + 1):
        acc = 0
        for k in range(1, min(n, alpha + 1) + 1):
            v = A(n - k + 1)
            if v != 0:
                acc = acc + (-1) ** (k + 1) * comb(alpha, k - 1) * v
        out.append(acc)
    return FiniteSequence(out)


@precise
def quadratic_form_parts(op_apply: Callable, A: FiniteSequence, n_start: int = 1, *, prec=None):
    """Return (real part, imaginary part) of sum_{n >= n_start} (op A)_n conj(A_n)."""
    opA = op_apply(A)
    total = complex_sum(opA(n) * conj(A(n)) for n in range(n_start, A.support_end + 1))
    return total.real, total.imag


def quadratic_form(op_apply: Callable, A: FiniteSequence, n_start: int = 1, *, prec=None):
    p = resolve(prec)
    re, im = quadratic_form_parts(op_apply, A, n_start, prec=p)
    if abs(im) > p.tolerance_abs + p.tolerance_rel * abs(re):
        raise NonHermitianResidueError(f"imaginary residue {float(im):.3e} in quadratic form")
    return re


@precise
def hardy_energy(A: FiniteSequence, lam: PositiveSequence, c=2, *, prec=None):
    """sum_{n >= 1} |A_{n-1} - A_n|^2 Lambda_n^(2-c) / lambda_n."""
    end = A.support_end
    if end < 0:
        return to_real(0)
    omega = hardy_coefficients(lam, c, end + 1)
    return real_sum(omega[n] * abs_sq(A(n - 1) - A(n)) for n in range(1, end + 2))


@precise
def rellich_energy(delta: PositiveSequence, A: FiniteSequence, *, prec=None):
    """sum_{n >= 1} |(-Delta_delta A)_n|^2."""
    lap = apply_weighted_laplacian_delta(delta, A, prec=prec)
    return real_sum(abs_sq(lap(n)) for n in range(1, lap.support_end + 1))


@precise
def operator_matrix(spec: OperatorSpec, size: int, alpha: int = 1, *, prec=None) -> list:
    """Dense size x size truncation assembled entry by entry from the matrix displays.

    ``alpha`` > 1 (Dirichlet only) multiplies the tridiagonal matrix with a
    margin of ``alpha`` extra rows, so the cropped power is exact.
    """
    if alpha > 1:
        if spec.kind != DIRICHLET:
            raise ValueError("matrix powers are only defined for the Dirichlet kind")
        big = operator_matrix(spec, size + alpha, prec=prec)
        acc = big
        for _ in range(alpha - 1):
            acc = matmul(acc, big)
        return [row[:size] for row in acc[:size]]
    M = [[0] * size for _ in range(size)]
    if spec.kind in (DIRICHLET, GENERALIZED, WEIGHTED_DELTA):
        if spec.kind == DIRICHLET:
            w = [1] * (size + 1)
        elif spec.kind == GENERALIZED:
            w = hardy_coefficients(spec.weight, spec.c, size)
        else:
            w = [to_real(spec.weight(n)) for n in range(size + 1)]
        for i in range(size):
            M[i][i] = w[i] + w[i + 1] if spec.kind != DIRICHLET else 2
            if i + 1 < size:
                M[i][i + 1] = M[i + 1][i] = -w[i + 1]
        return M
    d = [to_real(spec.weight(n)) for n in range(size + 3)]
    for i in range(size):
        if i == 0:
            M[0][0] = (d[0] + d[1]) ** 2 + d[1] ** 2
        else:
            M[i][i] = (d[i] + d[i + 1]) ** 2 + d[i] ** 2 + d[i + 1] ** 2
        if i + 1 < size:
            M[i][i + 1] = M[i + 1][i] = -(2 * d[i + 1] ** 2 + d[i] * d[i + 1] + d[i + 1] * d[i + 2])
        if i + 2 < size:
            M[i][i + 2] = M[i + 2][i] = d[i + 1] * d[i + 2]
    return M


@precise
def matmul(X: list, Y: list, *, prec=None) -> list:
    n, k, m = len(X), len(Y), len(Y[0])
    return [[real_or_complex_dot([X[i][t] for t in range(k)], [Y[t][j] for t in range(k)])
             for j in range(m)] for i in range(n)]


@precise
def matvec(M: list, v: list, *, prec=None) -> list:
    return [real_or_complex_dot(row, v) for row in M]


def real_or_complex_dot(xs, ys):
    terms = [x * y for x, y in zip(xs, ys) if x != 0 and y != 0]
    if not terms:
        return 0
    return complex_sum(terms) if any(isinstance(t, (complex_type, complex)) for t in terms) else real_sum(terms)
