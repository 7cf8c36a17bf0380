"""Remainder operators R1 (Hardy) and R2 (Rellich) and their coefficients.

R2 needs gamma_n^2 from a scalar recurrence.  When the recurrence produces a
non-positive value the remainder form does not exist for that (delta, mu);
:func:`gamma_coefficients` raises :class:`FactorizationBreakdown` with the
index, and :func:`try_gamma_coefficients` returns it as a value instead so
scans over many parameter pairs can keep going.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import gmpy2
from gmpy2 import mpfr

from .operators import OperatorSpec, as_exponent, hardy_coefficients
from .precision import precise, resolve, to_real
from .report import VerificationReport, Witness
from .sequences import FiniteSequence, PositiveSequence


class FactorizationBreakdown(ArithmeticError):
    def __init__(self, index: int, value):
        super().__init__(f"gamma^2 is not positive at n = {index} (value {float(value):.6g})")
        self.index = index
        self.value = value


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class Remainder1Spec:
    lam: PositiveSequence
    c: object
    mu: PositiveSequence

    def __post_init__(self):
        object.__setattr__(self, "c", as_exponent(self.c))
        # reuse the operator validation for c
        OperatorSpec("generalized_lambda_c", self.lam, self.c)


@precise
def remainder1_apply(spec: Remainder1Spec, A: FiniteSequence, *, prec=None) -> FiniteSequence:
    """(R1 A)_n = (sqrt(mu_{n+1}/(mu_n lam_{n+1})) A_n - sqrt(mu_n/(mu_{n+1} lam_{n+1})) A_{n+1})
    * sqrt(Lambda_{n+1}^{2-c}) for n >= 1.  Row 0 is left at zero."""
    end = A.support_end
    if end < 1:
        return FiniteSequence()
    omega = hardy_coefficients(spec.lam, spec.c, end + 1)
    out = [0]
    for n in range(1, end + 1):
        m0, m1 = to_real(spec.mu(n)), to_real(spec.mu(n + 1))
        out.append(gmpy2.sqrt(m1 / m0 * omega[n + 1]) * A(n) - gmpy2.sqrt(m0 / m1 * omega[n + 1]) * A(n + 1))
    return FiniteSequence(out)


@precise
def remainder1_matrix(spec: Remainder1Spec, size: int, *, prec=None) -> list:
    """Rows n = 1..size-1, columns 0..size-1 (column 0 identically zero)."""
    omega = hardy_coefficients(spec.lam, spec.c, size)
    R = []
    for n in range(1, size):
        row = [0] * size
        m0, m1 = to_real(spec.mu(n)), to_real(spec.mu(n + 1))
        row[n] = gmpy2.sqrt(m1 / m0 * omega[n + 1])
        if n + 1 < size:
            row[n + 1] = -gmpy2.sqrt(m0 / m1 * omega[n + 1])
        R.append(row)
    return R


@dataclass(frozen=True)
class RemainderCoefficients:
    """gamma_n^2 and beta_n for n = 1..n_max (stored 0-based: entry k is n = k+1)."""

    gamma_sq: tuple
    beta: tuple
    n_max: int
    provenance: dict = field(default_factory=dict)

    def gamma_sq_at(self, n: int):
        if not 1 <= n <= self.n_max:
            raise CoverageError(f"gamma^2 known only for 1 <= n <= {self.n_max}, asked {n}")
        return self.gamma_sq[n - 1]

    def beta_at(self, n: int):
        if not self.beta:
            raise CoverageError("beta coefficients have not been computed")
        if not 1 <= n <= self.n_max:
            raise CoverageError(f"beta known only for 1 <= n <= {self.n_max}, asked {n}")
        return self.beta[n - 1]


def _provenance(delta, mu):
    return {"delta": delta.name, "mu": mu.name}


@precise
def gamma_coefficients(delta: PositiveSequence, mu: PositiveSequence, n_max: int,
                       *, prec=None) -> RemainderCoefficients:
    """gamma_1^2 from the initial condition, then the recurrence for n >= 2."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = [None] + [to_real(delta(k)) for k in range(1, n_max + 3)]
    m = [None] + [to_real(mu(k)) for k in range(1, n_max + 3)]
    g1 = m[2] / m[1] * (2 * d[2] / d[3] + d[1] / d[3] + 1) - m[3] / m[1]
    if not g1 > 0:
        raise FactorizationBreakdown(1, g1)
    out = [g1]
    prev = g1
    for n in range(2, n_max + 1):
        bracket = (2 * d[n + 1] ** 2 + d[n] * d[n + 1] + d[n + 1] * d[n + 2]
                   - m[n + 2] / m[n + 1] * d[n + 1] * d[n + 2]
                   - m[n - 1] / m[n] * d[n] * d[n + 1]
                   - m[n + 1] / (m[n] * prev) * d[n] * d[n + 1])
        g = m[n + 1] / m[n] * bracket / (d[n + 1] * d[n + 2])
        if not g > 0:
            raise FactorizationBreakdown(n, g)
        out.append(g)
        prev = g
    return RemainderCoefficients(tuple(out), (), n_max, _provenance(delta, mu))


def try_gamma_coefficients(delta, mu, n_max, *, prec=None):
    """Like :func:`gamma_coefficients` but returns the breakdown instead of raising."""
    try:
        return gamma_coefficients(delta, mu, n_max, prec=prec)
    except FactorizationBreakdown as exc:
        return exc


@precise
def beta_coefficients(delta: PositiveSequence, mu: PositiveSequence, coeffs: RemainderCoefficients,
                      *, prec=None) -> RemainderCoefficients:
    """beta_n = sqrt(delta_{n+2}) (gamma_n mu_n + mu_{n+2}/gamma_n) / mu_{n+1}."""
    beta = []
    for n in range(1, coeffs.n_max + 1):
        g = gmpy2.sqrt(coeffs.gamma_sq_at(n))
        beta.append(gmpy2.sqrt(to_real(delta(n + 2)))
                    * (g * to_real(mu(n)) + to_real(mu(n + 2)) / g) / to_real(mu(n + 1)))
    return replace(coeffs, beta=tuple(beta))


def remainder_coefficients(delta, mu, n_max, *, prec=None) -> RemainderCoefficients:
    return beta_coefficients(delta, mu, gamma_coefficients(delta, mu, n_max, prec=prec), prec=prec)


def _r2_row(delta, coeffs, n):
    g = gmpy2.sqrt(coeffs.gamma_sq_at(n))
    d1, d2 = to_real(delta(n + 1)), to_real(delta(n + 2))
    s = gmpy2.sqrt(d1 * d2)
    return g * s, -coeffs.beta_at(n) * gmpy2.sqrt(d1), s / g


@precise
def remainder2_apply(delta: PositiveSequence, coeffs: RemainderCoefficients, A: FiniteSequence,
                     *, prec=None) -> FiniteSequence:
    """(R2 A)_n = gamma_n sqrt(d_{n+1} d_{n+2}) A_n - beta_n sqrt(d_{n+1}) A_{n+1}
    + sqrt(d_{n+1} d_{n+2}) / gamma_n A_{n+2} for n >= 1."""
    end = A.support_end
    if end < 1:
        return FiniteSequence()
    if coeffs.n_max < end or not coeffs.beta:
        raise CoverageError(f"coefficients cover n <= {coeffs.n_max}, need {end}")
    out = [0]
    for n in range(1, end + 1):
        a, b, c = _r2_row(delta, coeffs, n)
        out.append(a * A(n) + b * A(n + 1) + c * A(n + 2))
    return FiniteSequence(out)


@precise
def remainder2_matrix(delta: PositiveSequence, coeffs: RemainderCoefficients, size: int,
                      *, prec=None) -> list:
    """Rows n = 1..size-1, columns 0..size-1, truncated at the last column."""
    if coeffs.n_max < size - 1:
        raise CoverageError(f"coefficients cover n <= {coeffs.n_max}, need {size - 1}")
    R = []
    for n in range(1, size):
        row = [0] * size
        for off, v in enumerate(_r2_row(delta, coeffs, n)):
            if n + off < size:
                row[n + off] = v
        R.append(row)
    return R


@precise
def remainder2_on_mu(delta, mu, coeffs: RemainderCoefficients, *, prec=None) -> list:
    """(R2 mu)_n for n = 1..n_max, using mu itself (not a truncation)."""
    out = []
    for n in range(1, coeffs.n_max + 1):
        a, b, c = _r2_row(delta, coeffs, n)
        out.append(a * to_real(mu(n)) + b * to_real(mu(n + 1)) + c * to_real(mu(n + 2)))
    return out


@precise
def gamma_bounds_check(delta: PositiveSequence, mu: PositiveSequence, n_max: int,
                       *, prec=None) -> VerificationReport:
    """p_n p_{n+1} < gamma_n^2 < p_n p_{n+1} p_{n+2} with p_n = mu_{n+1}/mu_n, for n <= n_max."""
    p = resolve(prec)
    coeffs = gamma_coefficients(delta, mu, n_max, prec=p)
    m = [None] + [to_real(mu(k)) for k in range(1, n_max + 4)]
    rows, witnesses = [], []
    worst = mpfr(0)
    lo_gap = hi_gap = None
    for n in range(1, n_max + 1):
        pn, pn1, pn2 = m[n + 1] / m[n], m[n + 2] / m[n + 1], m[n + 3] / m[n + 2]
        lower, upper = pn * pn1, pn * pn1 * pn2
        g = coeffs.gamma_sq_at(n)
        rows.append((n, lower, g, upper))
        gl, gu = (g - lower) / lower, (upper - g) / upper
        if not (gl > 0 and gu > 0):
            witnesses.append(Witness(n, g, (lower, upper)))
            worst = max(worst, -min(gl, gu))
        lo_gap = gl if lo_gap is None else min(lo_gap, gl)
        hi_gap = gu if hi_gap is None else min(hi_gap, gu)
    return VerificationReport(
        name="gamma-bounds",
        range=(1, n_max),
        max_residual=float(worst),
        tolerance=0.0,
        precision_used=p.mantissa_bits,
        witnesses=tuple(witnesses),
        details={"rows": rows, "min_rel_gap_lower": lo_gap, "min_rel_gap_upper": hi_gap,
                 "coefficients": coeffs},
    )
