"""Working-precision control and correctly rounded summation.

Every real computation in the package runs under an MPFR context whose
mantissa width comes from a :class:`PrecisionContext`.  Public functions take
an optional ``prec`` keyword; ``None`` means :data:`DEFAULT_PRECISION`.
"""
from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

ENV_PREFIX = "HARDY_RELLICH_"


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa width plus the tolerances used to judge residuals."""

    mantissa_bits: int = 256
    tolerance_rel: float = 1e-30
    tolerance_abs: float = 1e-60

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ValueError(f"mantissa_bits must be >= 64, got {self.mantissa_bits}")
        if not (self.tolerance_rel > 0 and self.tolerance_abs > 0):
            raise ValueError("tolerances must be positive")

    def activate(self):
        return gmpy2.context(precision=self.mantissa_bits)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.mantissa_bits, self.tolerance_rel, self.tolerance_abs)

    @property
    def decimal_digits(self) -> int:
        return math.ceil(self.mantissa_bits * 0.30103)


DEFAULT_PRECISION = PrecisionContext()


def resolve(prec: PrecisionContext | int | None) -> PrecisionContext:
    if prec is None:
        return DEFAULT_PRECISION
    if isinstance(prec, int):
        return PrecisionContext(mantissa_bits=prec)
    return prec


def from_env(bits: int | None = None, tolerance: float | None = None) -> PrecisionContext:
    """Build a context, letting ``HARDY_RELLICH_PRECISION_BITS`` / ``_TOLERANCE`` fill gaps."""
    if bits is None:
        bits = int(os.environ.get(ENV_PREFIX + "PRECISION_BITS", DEFAULT_PRECISION.mantissa_bits))
    if tolerance is None:
        tolerance = float(os.environ.get(ENV_PREFIX + "TOLERANCE", DEFAULT_PRECISION.tolerance_rel))
    return PrecisionContext(mantissa_bits=bits, tolerance_rel=tolerance)


def precise(func):
    """Run ``func`` under the MPFR context named by its ``prec`` keyword."""

    @functools.wraps(func)
    def wrapper(*args, prec=None, **kwargs):
        p = resolve(prec)
        with p.activate():
            return func(*args, prec=p, **kwargs)

    return wrapper


def to_real(x):
    """Convert ints, Fractions, strings and gmpy2 numbers to an mpfr at the active precision."""
    if isinstance(x, Fraction):
        return mpfr(x.numerator) / x.denominator
    return mpfr(x)


def to_scalar(x):
    """Like :func:`to_real` but keeps complex values complex."""
    if isinstance(x, (complex, type(mpc(0)))):
        return mpc(x)
    return to_real(x)


def abs_sq(z):
    if isinstance(z, type(mpc(0))):
        return gmpy2.norm(z)
    if isinstance(z, complex):
        return to_real(z.real) ** 2 + to_real(z.imag) ** 2
    r = to_real(z) if isinstance(z, Fraction) else z
    return r * r


def conj(z):
    if isinstance(z, type(mpc(0))):
        return z.conjugate()
    if isinstance(z, complex):
        return z.conjugate()
    return z


def real_sum(terms) -> mpfr:
    """Correctly rounded sum (MPFR ``mpfr_sum``) of real terms."""
    return gmpy2.fsum([to_real(t) for t in terms])


def complex_sum(terms):
    """Correctly rounded sum of complex terms, real and imaginary parts separately."""
    re, im = [], []
    for t in terms:
        if isinstance(t, type(mpc(0))):
            re.append(t.real)
            im.append(t.imag)
        elif isinstance(t, complex):
            re.append(mpfr(t.real))
            im.append(mpfr(t.imag))
        else:
            re.append(to_real(t))
    return mpc(gmpy2.fsum(re), gmpy2.fsum(im) if im else 0)


def guard_bits(n: int) -> int:
    """Extra bits for evaluating an O(n^-4)-relative cancellation at index n."""
    return 4 * max(int(n), 1).bit_length() + 16


def to_hex(x) -> str:
    return format(mpfr(x), "a")


def from_hex(text: str, bits: int) -> mpfr:
    return mpfr(text, bits, 16)


def to_decimal(x, digits: int) -> str:
    return format(mpfr(x), f".{digits}g")


real_type = type(mpfr(0))
complex_type = type(mpc(0))

__all__ = [
    "PrecisionContext",
    "DEFAULT_PRECISION",
    "resolve",
    "from_env",
    "precise",
    "to_real",
    "to_scalar",
    "abs_sq",
    "conj",
    "real_sum",
    "complex_sum",
    "guard_bits",
    "to_hex",
    "from_hex",
    "to_decimal",
]
