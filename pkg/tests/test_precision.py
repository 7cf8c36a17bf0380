from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from hardy_rellich.precision import (PrecisionContext, abs_sq, complex_sum, from_env, from_hex,
                                     guard_bits, precise, real_sum, resolve, to_decimal, to_hex,
                                     to_real)


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(32)
    with pytest.raises(ValueError):
        PrecisionContext(128, tolerance_rel=0)
    assert PrecisionContext(256).decimal_digits == 78


def test_resolve_and_doubled():
    assert resolve(None).mantissa_bits == 256
    assert resolve(100).mantissa_bits == 100
    assert PrecisionContext(100).doubled().mantissa_bits == 200


def test_env_override(monkeypatch):
    monkeypatch.setenv("HARDY_RELLICH_PRECISION_BITS", "320")
    monkeypatch.setenv("HARDY_RELLICH_TOLERANCE", "1e-40")
    p = from_env()
    assert p.mantissa_bits == 320 and p.tolerance_rel == 1e-40
    assert from_env(128).mantissa_bits == 128


def test_precise_sets_context():
    @precise
    def f(*, prec=None):
        return gmpy2.get_context().precision, prec.mantissa_bits

    assert f(prec=200) == (200, 200)


def test_to_real_fraction_is_correctly_rounded():
    with gmpy2.context(precision=300):
        x = to_real(Fraction(1, 3))
        assert x == mpfr(1) / 3


def test_sums():
    with gmpy2.context(precision=128):
        # fsum keeps the tiny term that naive addition loses
        assert real_sum([mpfr("1e40"), 1, mpfr("-1e40")]) == 1
        z = complex_sum([mpc(1, 2), 3, mpc(0, -1)])
        assert z == mpc(4, 1)
        assert abs_sq(mpc(3, 4)) == 25


def test_hex_roundtrip():
    with gmpy2.context(precision=256):
        x = gmpy2.sqrt(mpfr(2))
        assert from_hex(to_hex(x), 256) == x
        assert to_decimal(x, 10) == "1.414213562"


def test_guard_bits_grow_with_n():
    assert guard_bits(1) < guard_bits(10 ** 6)
