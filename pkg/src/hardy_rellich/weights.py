"""Hardy, Copson, Rellich and Knopp weight sequences and their classical bounds.

Weights that come out of an O(1) cancellation are evaluated either through an
algebraically rearranged form or with extra guard bits, then rounded to the
working precision.  Every such weight also has a ``*_naive`` twin that follows
the textbook expression literally; tests compare the two at doubled precision.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import gmpy2
from gmpy2 import mpfr

from .operators import as_exponent
from .precision import PrecisionContext, guard_bits, precise, resolve, to_real
from .sequences import PositiveSequence


class WeightDomainWarning(UserWarning):
    pass


class WeightRangeError(ValueError):
    pass


def guarded(extra: Callable[[int], int] = guard_bits):
    """Evaluate at working bits + extra(n), then round back to working bits.

    The wrapped function must take the index ``n`` as its last positional
    argument.
    """

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, prec=None, guard=True):
            p = resolve(prec)
            n = args[-1]
            bits = p.mantissa_bits + (extra(n) if guard else 0)
            with gmpy2.context(precision=bits):
                v = fn(*args)
            with p.activate():
                return mpfr(v)

        return wrapper

    return deco


def s_tilde(n: int) -> int:
    return n * (n + 1) * (2 * n + 1) // 6


def s_hat(n: int) -> int:
    return (n * (n + 1) // 2) ** 2


def sqrt_s_hat(n: int) -> int:
    return n * (n + 1) // 2


# -- Hardy ------------------------------------------------------------------

@precise
def hardy_weight_classical(n: int, *, prec=None):
    """2 - sqrt(1 - 1/n) - sqrt(1 + 1/n), rearranged so nothing cancels."""
    if n < 1:
        raise WeightRangeError("hardy weight needs n >= 1")
    x = mpfr(1) / n
    s = gmpy2.sqrt
    return 2 * x * x / ((1 + s(1 - x * x)) * (2 + s(1 - x) + s(1 + x)))


@precise
def hardy_weight_classical_naive(n: int, *, prec=None):
    x = mpfr(1) / n
    return 2 - gmpy2.sqrt(1 - x) - gmpy2.sqrt(1 + x)


@precise
def hardy_bound(n: int, *, prec=None):
    return mpfr(1) / (4 * n * n)


def _mu_below(mu: PositiveSequence, m: int):
    # the weight formulas use mu_0 = 0, whatever mu.zero_value says
    return 0 if m <= 0 else to_real(mu(m))


@guarded()
def hardy_weight_mu(mu: PositiveSequence, n: int):
    """w_n(mu) = 2 - mu_{n-1}/mu_n - mu_{n+1}/mu_n with mu_0 = 0."""
    m = to_real(mu(n))
    return (2 * m - _mu_below(mu, n - 1) - to_real(mu(n + 1))) / m


def _omega(lam: PositiveSequence, expo, n: int, big=None):
    """Lambda_n^(2-c) / lambda_n for n >= 1; ``big`` is Lambda_n if already known."""
    ln = to_real(lam(n))
    if expo == 0:
        return 1 / ln
    if big is None:
        big = gmpy2.fsum([to_real(lam(k)) for k in range(1, n + 1)])
    return to_real(big) ** to_real(expo) / ln


@guarded()
def eta_weight(lam: PositiveSequence, c, mu: PositiveSequence, n: int):
    """((-Delta_Lambda) mu)_n / mu_n with mu_0 = 0."""
    if n < 1:
        raise WeightRangeError("eta needs n >= 1")
    expo = 2 - as_exponent(c)
    w0 = _omega(lam, expo, n)
    big1 = None
    if expo != 0:
        big1 = gmpy2.fsum([to_real(lam(k)) for k in range(1, n + 2)])
    w1 = _omega(lam, expo, n + 1, big1)
    m = to_real(mu(n))
    return w0 + w1 - _mu_below(mu, n - 1) * w0 / m - to_real(mu(n + 1)) * w1 / m


@guarded()
def sigma_weight(lam: PositiveSequence, mu: PositiveSequence, n: int):
    """1/lambda_n + 1/lambda_{n+1} - mu_{n-1}/(lambda_n mu_n) - mu_{n+1}/(lambda_{n+1} mu_n)."""
    if n < 1:
        raise WeightRangeError("sigma needs n >= 1")
    l0, l1 = to_real(lam(n)), to_real(lam(n + 1))
    m = to_real(mu(n))
    return 1 / l0 + 1 / l1 - _mu_below(mu, n - 1) / (l0 * m) - to_real(mu(n + 1)) / (l1 * m)


@precise
def eta_linear_bound(n: int, *, prec=None):
    return mpfr(1) / (n * (n + 1) ** 2)


def eta_linear_exact(n: int) -> Fraction:
    return Fraction(1, n * n * (n + 1))


@guarded()
def gupta_weight(alpha, n: int):
    """w_n(alpha, beta) with beta = (1 - alpha)/2; warns outside {0} u [1/3, 1)."""
    a = as_exponent(alpha)
    if not (a == 0 or Fraction(1, 3) <= a < 1):
        warnings.warn(f"alpha={a} is outside the range where the Gupta weight is proven",
                      WeightDomainWarning, stacklevel=3)
    b = (1 - a) / 2
    ra, rb = to_real(a), to_real(b)
    if n == 1:
        return 1 + mpfr(2) ** ra - mpfr(2) ** (ra + rb)
    x = mpfr(1) / n
    return mpfr(n) ** ra * (1 + (1 + x) ** ra - (1 - x) ** rb - (1 + x) ** (ra + rb))


@precise
def gupta_bound(alpha, n: int, *, prec=None):
    a = to_real(as_exponent(alpha))
    return (a - 1) ** 2 / 4 * mpfr(n) ** (a - 2)


@precise
def generalized_hardy_bound(q: PositiveSequence, n: int, *, prec=None):
    """q_n Q_n^(-2)."""
    big = gmpy2.fsum([to_real(q(k)) for k in range(1, n + 1)])
    return to_real(q(n)) / (big * big)


# -- Copson -----------------------------------------------------------------

def copson_tilde_lambda(n: int):
    return to_real(n * n) / gmpy2.sqrt(mpfr(s_tilde(n)))


def copson_hat_lambda(n: int) -> Fraction:
    # n^3 / sqrt(S^_n) and sqrt(S^_n) = n(n+1)/2 is an integer
    return Fraction(n ** 3, sqrt_s_hat(n))


def _tilde_display(n: int):
    a = gmpy2.sqrt(mpfr(s_tilde(n))) / (n * n)
    b = gmpy2.sqrt(mpfr(s_tilde(n + 1))) / ((n + 1) * (n + 1))
    q = mpfr(3) / 4
    return a + b - a * (1 - mpfr(1) / n) ** q - b * (1 + mpfr(1) / n) ** q


@guarded()
def copson_tilde_weight(n: int):
    if n < 1:
        raise WeightRangeError("copson weight needs n >= 1")
    return _tilde_display(n)


@precise
def copson_tilde_weight_naive(n: int, *, prec=None):
    return _tilde_display(n)


@precise
def copson_tilde_bound(n: int, *, prec=None):
    s = mpfr(s_tilde(n))
    return mpfr(n * n) / (16 * s * gmpy2.sqrt(s))


def copson_hat_exact(n: int) -> Fraction:
    """The four-term display in rationals (sqrt(S^_n) = n(n+1)/2)."""
    a = Fraction(sqrt_s_hat(n), n ** 3)
    b = Fraction(sqrt_s_hat(n + 1), (n + 1) ** 3)
    return a + b - a * (1 - Fraction(1, n)) - b * (1 + Fraction(1, n))


def copson_hat_bound_exact(n: int) -> Fraction:
    return Fraction(n ** 3, 16 * sqrt_s_hat(n) ** 3)


def copson_hat_excess_closed(n: int) -> Fraction:
    """h(n) = (4n^2 + 4n + 1) / (2 (n+1)^3 n^3)."""
    return Fraction(4 * n * n + 4 * n + 1, 2 * (n + 1) ** 3 * n ** 3)


@precise
def copson_hat_weight(n: int, *, prec=None):
    if n < 1:
        raise WeightRangeError("copson weight needs n >= 1")
    return to_real(copson_hat_exact(n))


@precise
def copson_hat_weight_naive(n: int, *, prec=None):
    a = gmpy2.sqrt(mpfr(s_hat(n))) / n ** 3
    b = gmpy2.sqrt(mpfr(s_hat(n + 1))) / (n + 1) ** 3
    x = mpfr(1) / n
    return a + b - a * (1 - x) - b * (1 + x)


@precise
def copson_hat_bound(n: int, *, prec=None):
    return to_real(copson_hat_bound_exact(n))


# -- Rellich ----------------------------------------------------------------

def _g(x):
    # (1+x)^{3/2} - (1 + 3x/2 + 3x^2/8) without cancellation
    p = 1 + 3 * x / 2 + 3 * x * x / 8
    return -(x ** 3 / 8 + 9 * x ** 4 / 64) / ((1 + x) * gmpy2.sqrt(1 + x) + p)


@precise
def rellich_rho2(n: int, *, prec=None):
    """6 - 4(1+1/n)^{3/2} - 4(1-1/n)^{3/2} + (1+2/n)^{3/2} + (1-2/n)^{3/2}.

    The quadratic Taylor parts cancel exactly, leaving only the remainders g.
    """
    if n < 2:
        raise WeightRangeError("rho^(2) is defined for n >= 2")
    h = mpfr(1) / n
    return -4 * (_g(h) + _g(-h)) + (_g(2 * h) + _g(-2 * h))


@precise
def rellich_rho2_naive(n: int, *, prec=None):
    if n < 2:
        raise WeightRangeError("rho^(2) is defined for n >= 2")
    h = mpfr(1) / n
    q = mpfr(3) / 2
    return 6 - 4 * (1 + h) ** q - 4 * (1 - h) ** q + (1 + 2 * h) ** q + (1 - 2 * h) ** q


def classical_rellich_coefficient(alpha: int) -> Fraction:
    """((2a)!)^2 / (16^a (a!)^2)."""
    return Fraction(math.factorial(2 * alpha) ** 2, 16 ** alpha * math.factorial(alpha) ** 2)


@precise
def rellich_bound(n: int, alpha: int = 2, *, prec=None):
    return to_real(classical_rellich_coefficient(alpha)) / mpfr(n) ** (2 * alpha)


def laplacian_power_stencil(alpha: int) -> list:
    """Coefficients of (-Delta)^alpha at offsets -alpha..alpha on the full line."""
    return [(-1) ** abs(k) * math.comb(2 * alpha, alpha + k) for k in range(-alpha, alpha + 1)]


def _rho_guard(alpha):
    return lambda n: 2 * alpha * max(int(n), 1).bit_length() + 16


def rellich_rho_alpha(alpha: int, n: int, *, prec=None, guard=True):
    """((-Delta)^alpha mu)_n / mu_n for mu_m = m^(alpha - 1/2), zero for m <= 0."""
    if alpha < 1:
        raise WeightRangeError("alpha must be >= 1")
    if n < alpha:
        raise WeightRangeError(f"rho^({alpha}) needs n >= {alpha}")
    p = resolve(prec)
    bits = p.mantissa_bits + (_rho_guard(alpha)(n) if guard else 0)
    with gmpy2.context(precision=bits):
        expo = mpfr(2 * alpha - 1) / 2
        terms = []
        for k, coef in zip(range(-alpha, alpha + 1), laplacian_power_stencil(alpha)):
            m = n + k
            if m > 0:
                terms.append(coef * mpfr(m) ** expo)
        v = gmpy2.fsum(terms) / mpfr(n) ** expo
    with p.activate():
        return mpfr(v)


@guarded()
def sigma2_weight(delta: PositiveSequence, mu: PositiveSequence, n: int):
    """((-Delta_delta)^2 mu)_n / mu_n for n >= 2 with mu_0 = 0."""
    if n < 2:
        raise WeightRangeError("sigma^(2) is defined for n >= 2")
    d = {k: to_real(delta(k)) for k in range(n - 1, n + 3)}
    m = to_real(mu(n))
    r = lambda k: _mu_below(mu, k)
    num = gmpy2.fsum([
        ((d[n] + d[n + 1]) ** 2 + d[n] ** 2 + d[n + 1] ** 2) * m,
        -r(n - 1) * (2 * d[n] ** 2 + d[n] * d[n - 1] + d[n] * d[n + 1]),
        -r(n + 1) * (2 * d[n + 1] ** 2 + d[n] * d[n + 1] + d[n + 1] * d[n + 2]),
        r(n - 2) * d[n] * d[n - 1],
        r(n + 2) * d[n + 1] * d[n + 2],
    ])
    return num / m


# -- Knopp ------------------------------------------------------------------

def knopp_constant(alpha: int) -> Fraction:
    """(Gamma(a+1) Gamma(1/2) / Gamma(a+1/2))^2 = (4^a (a!)^2 / (2a)!)^2."""
    if alpha < 1:
        raise WeightRangeError("Knopp order must be >= 1")
    return Fraction(4 ** alpha * math.factorial(alpha) ** 2, math.factorial(2 * alpha)) ** 2


def knopp_row_weight(alpha: int, n: int) -> Fraction:
    return Fraction(1, math.comb(n - 1 + alpha, n - 1) ** 2)


# Order-2 mean normalised by 1/(n(n+1)) instead of 1/C(n+1, n-1):
# constant 16/9 against weight 1/(n^2 (n+1)^2); the factor 4 links the two.
ORDER2_MEAN_CONSTANT = Fraction(16, 9)


def order2_mean_weight(n: int) -> Fraction:
    return Fraction(1, n * n * (n + 1) ** 2)


# -- families ---------------------------------------------------------------

@dataclass(frozen=True)
class WeightFamily:
    """A named weight n -> value with the parameters that fixed it."""

    name: str
    evaluator: Callable
    params: dict = field(default_factory=dict)
    n_min: int = 1
    kernel_id: int | None = None

    def __call__(self, n: int, *, prec=None):
        if n < self.n_min:
            raise WeightRangeError(f"{self.name} starts at n = {self.n_min}")
        return self.evaluator(n, prec=prec)


def _simple(name, fn, kernel_id=None, n_min=1):
    return WeightFamily(name, lambda n, prec=None: fn(n, prec=prec), {}, n_min, kernel_id)


def build_family(name: str, **params) -> WeightFamily:
    """Registry lookup; raises KeyError for unknown names."""
    if name in _FIXED:
        return _FIXED[name]
    if name not in _PARAMETRIC:
        raise KeyError(name)
    return _PARAMETRIC[name](**params)


def _eta_family(lam, mu, c=2):
    return WeightFamily("eta", lambda n, prec=None: eta_weight(lam, c, mu, n, prec=prec),
                        {"lambda": lam.name, "mu": mu.name, "c": str(c)})


def _sigma_family(lam, mu):
    return WeightFamily("sigma", lambda n, prec=None: sigma_weight(lam, mu, n, prec=prec),
                        {"lambda": lam.name, "mu": mu.name})


def _hardy_mu_family(mu):
    return WeightFamily("hardy-mu", lambda n, prec=None: hardy_weight_mu(mu, n, prec=prec),
                        {"mu": mu.name})


def _sigma2_family(delta, mu):
    return WeightFamily("sigma2", lambda n, prec=None: sigma2_weight(delta, mu, n, prec=prec),
                        {"delta": delta.name, "mu": mu.name}, n_min=2)


def _gupta_family(alpha):
    return WeightFamily("gupta", lambda n, prec=None: gupta_weight(alpha, n, prec=prec),
                        {"alpha": str(alpha)})


def _gupta_bound_family(alpha):
    return WeightFamily("gupta-bound", lambda n, prec=None: gupta_bound(alpha, n, prec=prec),
                        {"alpha": str(alpha)})


def _rho_alpha_family(alpha=2):
    alpha = int(alpha)
    return WeightFamily("rho-alpha", lambda n, prec=None: rellich_rho_alpha(alpha, n, prec=prec),
                        {"alpha": alpha}, n_min=alpha)


def _rho_alpha_bound_family(alpha=2):
    alpha = int(alpha)
    return WeightFamily("rho-alpha-bound", lambda n, prec=None: rellich_bound(n, alpha, prec=prec),
                        {"alpha": alpha}, n_min=alpha)


_FIXED = {
    "hardy-classical": _simple("hardy-classical", hardy_weight_classical, 0),
    "hardy-bound": _simple("hardy-bound", hardy_bound, 1),
    "rho2": _simple("rho2", rellich_rho2, 2, n_min=2),
    "rho2-bound": _simple("rho2-bound", rellich_bound, 3, n_min=2),
    "copson-tilde": _simple("copson-tilde", copson_tilde_weight, 4),
    "copson-tilde-bound": _simple("copson-tilde-bound", copson_tilde_bound, 5),
    "copson-hat": _simple("copson-hat", copson_hat_weight, 6),
    "copson-hat-bound": _simple("copson-hat-bound", copson_hat_bound, 7),
    "eta-linear": WeightFamily(
        "eta-linear",
        lambda n, prec=None: eta_weight(PositiveSequence(lambda k: k, 1, "linear"), 2,
                                        PositiveSequence(lambda k: k, 1, "linear"), n, prec=prec),
        {"lambda": "linear", "mu": "linear", "c": "2"}, 1, 8),
    "eta-linear-bound": _simple("eta-linear-bound", eta_linear_bound, 9),
}

_PARAMETRIC = {
    "eta": _eta_family,
    "sigma": _sigma_family,
    "hardy-mu": _hardy_mu_family,
    "sigma2": _sigma2_family,
    "gupta": _gupta_family,
    "gupta-bound": _gupta_bound_family,
    "rho-alpha": _rho_alpha_family,
    "rho-alpha-bound": _rho_alpha_bound_family,
}

# family -> the classical weight it improves
BOUND_OF = {
    "hardy-classical": "hardy-bound",
    "rho2": "rho2-bound",
    "copson-tilde": "copson-tilde-bound",
    "copson-hat": "copson-hat-bound",
    "eta-linear": "eta-linear-bound",
    "gupta": "gupta-bound",
    "rho-alpha": "rho-alpha-bound",
}

FAMILY_NAMES = tuple(_FIXED) + tuple(_PARAMETRIC)
