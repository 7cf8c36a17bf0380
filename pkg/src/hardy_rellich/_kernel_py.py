"""Pure-Python (gmpy2) twin of the compiled scan kernel.

Same family ids, same operation order, same return shapes as ``_ckernel``.
"""
from __future__ import annotations

import gmpy2
from gmpy2 import mpfr

from . import weights as W
from .precision import PrecisionContext

FAMILY_COUNT = 10

_EVAL = (
    W.hardy_weight_classical,
    W.hardy_bound,
    W.rellich_rho2,
    lambda n, prec: W.rellich_bound(n, 2, prec=prec),
    W.copson_tilde_weight,
    W.copson_tilde_bound,
    W.copson_hat_weight,
    W.copson_hat_bound,
    lambda n, prec: W.build_family("eta-linear")(n, prec=prec),
    W.eta_linear_bound,
)

_N_MIN = (1, 1, 2, 2, 1, 1, 1, 1, 1, 1)
N_LIMIT = 2 ** 31  # same index ceiling as the compiled kernel


def evaluate(fid: int, n: int, bits: int):
    if not 0 <= fid < FAMILY_COUNT:
        raise ValueError(f"unknown family id {fid}")
    if n < _N_MIN[fid] or n >= N_LIMIT:
        raise ValueError(f"family {fid} is undefined at n = {n}")
    return _EVAL[fid](n, prec=PrecisionContext(bits))


def _compare_at(fa, fb, n, bits):
    a = evaluate(fa, n, bits)
    b = evaluate(fb, n, bits)
    with gmpy2.context(precision=bits):
        diff = a - b
        rel = float(diff) / float(b)
        if abs(diff) < abs(a) * mpfr(2) ** -(bits // 2):
            return 2, rel
        return gmpy2.sign(diff), rel


def scan_pair(fa: int, fb: int, lo: int, hi: int, bits: int, max_witnesses: int = 64):
    """See ``_ckernel.scan_pair``."""
    max_witnesses = min(max_witnesses, 256)
    wit, fails, esc = [], 0, 0
    min_rel, argmin = 1e308, lo
    for n in range(lo, hi + 1):
        s, rel = _compare_at(fa, fb, n, bits)
        if s == 2:
            esc += 1
            s, rel = _compare_at(fa, fb, n, 2 * bits)
            if s == 2:
                s = 0
        if rel < min_rel:
            min_rel, argmin = rel, n
        if s <= 0:
            fails += 1
            if len(wit) < max_witnesses:
                wit.append(n)
    return wit, fails, esc, min_rel, argmin
