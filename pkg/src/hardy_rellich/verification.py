"""Executable checks: factorization identities, pointwise scans, lemma
inequalities, criticality decay and the Knopp/Rellich bridge.

Every check returns a :class:`VerificationReport`.  Identity residuals are
relative: |lhs - (weighted + remainder)| / lhs (absolute when lhs is zero).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from . import kernels
from . import weights as W
from .factorization import (FactorizationBreakdown, Remainder1Spec, remainder1_apply,
                            remainder2_apply, remainder_coefficients)
from .operators import (apply_laplacian_power, backward_difference, hardy_energy,
                        quadratic_form, rellich_energy)
from .precision import abs_sq, guard_bits, precise, real_sum, resolve, to_real
from .report import VerificationReport, Witness, merge_all
from .sequences import BoundaryConditionError, FiniteSequence, PositiveSequence

DEFAULT_SEED = 20240607
IDENTITY_TOLERANCE = 1e-25


# -- random data ------------------------------------------------------------

def random_sequence(rng: random.Random, support_end: int, zeros_below: int = 1,
                    magnitude: float = 10.0) -> FiniteSequence:
    """Complex entries with |z| <= magnitude on [zeros_below, support_end]."""
    vals = [0] * zeros_below
    for _ in range(zeros_below, support_end + 1):
        r = magnitude * math.sqrt(rng.random())
        t = 2 * math.pi * rng.random()
        vals.append(mpc(r * math.cos(t), r * math.sin(t)))
    if len(vals) > zeros_below and vals[-1] == 0:
        vals[-1] = mpc(1, 0)
    return FiniteSequence(vals)


def random_sequences(count: int, max_support: int = 25, zeros_below: int = 1,
                     seed: int = DEFAULT_SEED, min_support: int | None = None):
    rng = random.Random(seed)
    lo = zeros_below if min_support is None else min_support
    return [random_sequence(rng, rng.randint(lo, max_support), zeros_below) for _ in range(count)]


# -- identities -------------------------------------------------------------

def _identity_report(name, A, lhs, weighted, remainder, p, tol, extra=None):
    rhs = weighted + remainder
    diff = abs(lhs - rhs)
    resid = diff / abs(lhs) if lhs != 0 else diff
    witnesses = []
    if float(resid) > tol:
        witnesses.append(Witness(A.support_end, lhs, rhs))
    # the inequality itself: remainder >= 0 so lhs >= weighted
    if remainder < 0 or lhs - weighted < -tol * abs(lhs):
        witnesses.append(Witness("inequality", lhs, weighted))
    details = {"lhs": lhs, "weighted": weighted, "remainder": remainder}
    details.update(extra or {})
    return VerificationReport(name, f"support_end={A.support_end}", float(resid), tol,
                              p.mantissa_bits, tuple(witnesses), details)


@precise
def verify_hardy_identity(lam: PositiveSequence, c, mu: PositiveSequence, A: FiniteSequence,
                          tolerance: float = IDENTITY_TOLERANCE, *, prec=None) -> VerificationReport:
    """sum |A_{n-1}-A_n|^2 Lambda_n^{2-c}/lam_n = sum eta_n |A_n|^2 + sum |(R1 A)_n|^2."""
    if A(0) != 0:
        raise BoundaryConditionError("Hardy identity needs A(0) = 0")
    lhs = hardy_energy(A, lam, c, prec=prec)
    weighted = real_sum(W.eta_weight(lam, c, mu, n, prec=prec) * abs_sq(A(n))
                        for n in range(1, A.support_end + 1))
    R = remainder1_apply(Remainder1Spec(lam, c, mu), A, prec=prec)
    remainder = real_sum(abs_sq(v) for v in R)
    return _identity_report("hardy-identity", A, lhs, weighted, remainder, prec, tolerance)


@precise
def verify_copson_identity(variant: str, A: FiniteSequence, tolerance: float = IDENTITY_TOLERANCE,
                           *, prec=None) -> VerificationReport:
    """The two Copson identities with their explicit remainders.

    tilde: remainder terms |(n/(n+1))^{3/8} A_{n+1} - ((n+1)/n)^{3/8} A_n|^2 sqrt(S~_{n+1})/(n+1)^2
    hat:   remainder terms |sqrt(n/(n+1)) A_{n+1} - sqrt((n+1)/n) A_n|^2 sqrt(S^_{n+1})/(n+1)^3
    """
    if A(0) != 0:
        raise BoundaryConditionError("Copson identity needs A(0) = 0")
    end = A.support_end
    if variant == "tilde":
        expo, power = mpfr(3) / 8, 2
        root_s = lambda n: gmpy2.sqrt(mpfr(W.s_tilde(n)))
        weight = lambda n: W.copson_tilde_weight(n, prec=prec)
    elif variant == "hat":
        expo, power = mpfr(1) / 2, 3
        root_s = lambda n: mpfr(W.sqrt_s_hat(n))
        weight = lambda n: W.copson_hat_weight(n, prec=prec)
    else:
        raise ValueError(f"unknown Copson variant {variant!r}")
    lhs = real_sum(abs_sq(A(n) - A(n - 1)) * root_s(n) / n ** power for n in range(1, end + 2))
    weighted = real_sum(weight(n) * abs_sq(A(n)) for n in range(1, end + 1))
    terms = []
    for n in range(1, end + 1):
        r = mpfr(n) / (n + 1)
        v = r ** expo * A(n + 1) - (1 / r) ** expo * A(n)
        terms.append(abs_sq(v) * root_s(n + 1) / (n + 1) ** power)
    remainder = real_sum(terms)
    return _identity_report(f"copson-{variant}-identity", A, lhs, weighted, remainder, prec, tolerance)


@precise
def verify_rellich_identity(delta: PositiveSequence, mu: PositiveSequence, A: FiniteSequence,
                            tolerance: float = IDENTITY_TOLERANCE, *, prec=None) -> VerificationReport:
    """sum |(-Delta_delta A)_n|^2 = sum sigma2_n |A_n|^2 + sum |(R2 A)_n|^2 for A_0 = A_1 = 0."""
    if A(0) != 0 or A(1) != 0:
        raise BoundaryConditionError("Rellich identity needs A(0) = A(1) = 0")
    end = A.support_end
    if end < 2:
        z = mpfr(0)
        return _identity_report("rellich-identity", A, z, z, z, prec, tolerance)
    coeffs = remainder_coefficients(delta, mu, end, prec=prec)
    lhs = rellich_energy(delta, A, prec=prec)
    weighted = real_sum(W.sigma2_weight(delta, mu, n, prec=prec) * abs_sq(A(n))
                        for n in range(2, end + 1))
    remainder = real_sum(abs_sq(v) for v in remainder2_apply(delta, coeffs, A, prec=prec))
    return _identity_report("rellich-identity", A, lhs, weighted, remainder, prec, tolerance)


def verify_batch(check, sequences, name: str, **params) -> VerificationReport:
    """Run ``check(A)`` over sequences and merge; breakdowns become witnesses."""
    reports = []
    for A in sequences:
        try:
            reports.append(check(A))
        except FactorizationBreakdown as exc:
            reports.append(VerificationReport(name, f"support_end={A.support_end}", math.inf, 0.0,
                                              0, (Witness(exc.index, exc.value, 0),),
                                              {"breakdown": exc.index}))
    merged = merge_all(reports)
    details = {"count": len(reports), "params": params,
               "failures": sum(not r.passed for r in reports)}
    return VerificationReport(name, f"{len(reports)} sequences", merged.max_residual,
                              merged.tolerance, merged.precision_used, merged.witnesses, details)


# -- pointwise scans --------------------------------------------------------

def pointwise_scan(family_a: W.WeightFamily, family_b: W.WeightFamily, lo: int, hi: int,
                   *, prec=None, backend=None, workers=None) -> VerificationReport:
    """family_a(n) > family_b(n) strictly for lo <= n <= hi.

    Both families with a kernel id go through the compiled/twin kernel.  Close
    calls (|a-b| < 2^(-bits/2) |a|) are re-decided at doubled precision.
    """
    p = resolve(prec)
    lo = max(lo, family_a.n_min, family_b.n_min)
    if family_a.kernel_id is not None and family_b.kernel_id is not None:
        r = kernels.scan_pair(family_a.kernel_id, family_b.kernel_id, lo, hi, p.mantissa_bits,
                              backend=backend, workers=workers)
    else:
        r = _python_scan(family_a, family_b, lo, hi, p)
    worst = max(0.0, -r["min_rel_gap"]) if r["fail_count"] else 0.0
    return VerificationReport(
        name=f"{family_a.name} > {family_b.name}",
        range=(lo, hi),
        max_residual=worst,
        tolerance=0.0,
        precision_used=p.mantissa_bits,
        witnesses=tuple(Witness(n, family_a.name, family_b.name) for n in r["witnesses"]),
        details=r,
    )


def _python_scan(fa, fb, lo, hi, p):
    wit, fails, esc = [], 0, 0
    min_rel, argmin = math.inf, lo
    for n in range(lo, hi + 1):
        bits = p.mantissa_bits
        while True:
            q = resolve(bits)
            a, b = fa(n, prec=q), fb(n, prec=q)
            with q.activate():
                diff = a - b
                close = abs(diff) < abs(a) * mpfr(2) ** -(bits // 2)
            if not close or bits > p.mantissa_bits:
                break
            esc += 1
            bits *= 2
        rel = float(diff / b)
        if rel < min_rel:
            min_rel, argmin = rel, n
        if close or diff <= 0:
            fails += 1
            if len(wit) < 64:
                wit.append(n)
    return {"witnesses": wit, "fail_count": fails, "escalations": esc, "min_rel_gap": min_rel,
            "argmin": argmin, "backend": "python-generic"}


# -- lemma suite -------------------------------------------------------------

def _q(x):
    return mpfr(x)


def lemma_F(n):
    n = _q(n)
    t = mpfr(3) / 4
    return (gmpy2.sqrt(n) * (2 * n + 3) ** 2 * (n ** t - (n - 1) ** t)
            + (2 * n + 1) ** (mpfr(3) / 2) * gmpy2.sqrt((n + 2) * (2 * n + 3)) * (n ** t - (n + 1) ** t))


def lemma_G(n):
    n = _q(n)
    a = 3 / (4 * n ** (mpfr(1) / 4))
    b = 3 / (32 * n ** (mpfr(5) / 4))
    return (gmpy2.sqrt(n) * (2 * n + 3) ** 2 * (a + b)
            + (2 * n + 1) ** (mpfr(3) / 2) * gmpy2.sqrt((n + 2) * (2 * n + 3)) * (b - a))


def lemma_G_floor(n):
    return mpfr(36) / 16 * _q(n) ** (mpfr(5) / 4)


def lemma_H(n):
    n = _q(n)
    return (gmpy2.sqrt(n) * (32 * n ** 3 + 76 * n ** 2 + 84 * n + 9)
            - (2 * n + 1) * (8 * n - 1) * gmpy2.sqrt((n + 2) * (2 * n + 1) * (2 * n + 3)))


def lemma_T(n):
    n = _q(n)
    r = (n + 3) * (n + 2) / ((n + 4) * (n + 1))
    k = mpfr(3) / 2
    return (1 + 2 * (n + 3) ** 2 / ((n + 2) * (n + 4)) + r
            - 2 * r * ((n - 1) / n) ** k - 2 * ((n + 2) / (n + 1)) ** k)


def lemma_T_simplified(n):
    n = _q(n)
    s = gmpy2.sqrt
    return ((s(n * n + n) * (4 * n ** 4 + 28 * n ** 3 + 60 * n ** 2 + 38 * n)
             - 2 * s(n * n - 1) * (n ** 4 + 6 * n ** 3 + 9 * n ** 2 - 4 * n - 12)
             - 2 * n * s(n * n + 2 * n) * (n ** 3 + 8 * n ** 2 + 20 * n + 16))
            / ((n + 4) * (n + 2) * (n * n + n) ** (mpfr(3) / 2)))


def lemma_U(n):
    n = _q(n)
    r = (n + 3) * (n + 2) / ((n + 4) * (n + 1))
    k = mpfr(3) / 2
    return (1 + 2 * (n + 3) ** 2 / ((n + 2) * (n + 4)) + r
            - r * ((n - 1) / n) ** k * ((n + 1) / (n + 2)) ** k
            - r * ((n - 1) / n) ** k - ((n + 2) / (n + 1)) ** k)


def lemma_U_ceiling(n):
    # p_{n+1} p_{n+2} for mu_n = n^{3/2}
    n = _q(n)
    return ((n + 3) / (n + 1)) ** (mpfr(3) / 2)


def lemma_S(n):
    return lemma_U(n) - lemma_U_ceiling(n)


def lemma_f(n):
    """Numerator of S(n), in its expanded five-term form."""
    n = _q(n)
    s = gmpy2.sqrt
    return (s(n * (n + 1) * (n + 2)) * (4 * n ** 4 + 28 * n ** 3 + 60 * n ** 2 + 38 * n)
            - s(n * (n + 2) * (n + 3)) * (n ** 4 + 9 * n ** 3 + 26 * n ** 2 + 24 * n)
            - s((n - 1) * (n + 1) * (n + 2)) * (n ** 4 + 6 * n ** 3 + 9 * n ** 2 - 4 * n - 12)
            - s(n) * (n ** 5 + 10 * n ** 4 + 36 * n ** 3 + 56 * n ** 2 + 32 * n)
            - s(n - 1) * (n ** 5 + 6 * n ** 4 + 10 * n ** 3 - 11 * n - 6))


def lemma_f_grouped(n):
    """Same numerator, in the seven-term form before collecting."""
    n = _q(n)
    s = gmpy2.sqrt
    q = s(n * (n + 1) * (n + 2))
    return (2 * (n + 3) ** 2 * n * (n + 1) * q + n * (n + 3) * (n + 2) ** 2 * q
            + n * (n + 1) * (n + 2) * (n + 4) * q - n * (n + 2) ** 3 * (n + 4) * s(n)
            - (n + 3) * (n + 2) * (n * n - 1) * (n + 1) * s(n - 1)
            - n * (n + 2) * (n + 3) * (n + 4) * s(n * (n + 2) * (n + 3))
            - (n + 3) * (n + 2) ** 2 * (n - 1) * s((n + 1) * (n + 2) * (n - 1)))


@dataclass(frozen=True)
class _Lemma:
    name: str
    value: object          # n -> quantity that must be > 0
    n_min: int = 1
    companion: object = None  # n -> relative residual of an identity that must vanish


def _rel(x, y):
    return abs(x - y) / max(abs(x), abs(y))


def _lemma_table():
    return [
        _Lemma("G(n) > 36/16 n^{5/4}", lambda n: lemma_G(n) - lemma_G_floor(n), 1,
               lambda n: _rel(lemma_G(n) - lemma_G_floor(n), 3 * lemma_H(n) / (32 * _q(n) ** (mpfr(5) / 4)))),
        _Lemma("F(n) > G(n)", lambda n: lemma_F(n) - lemma_G(n), 1),
        _Lemma("H(n) > 0", lemma_H, 1),
        _Lemma("V~_n excess > 0", lambda n: W.copson_tilde_weight(n) - W.copson_tilde_bound(n), 1),
        _Lemma("h(n) > 0", lambda n: to_real(W.copson_hat_excess_closed(n)), 1,
               lambda n: abs(to_real(W.copson_hat_exact(n) - W.copson_hat_bound_exact(n)
                                     - W.copson_hat_excess_closed(n)))),
        _Lemma("T(n) > 0", lemma_T, 2, lambda n: _rel(lemma_T(n), lemma_T_simplified(n))),
        _Lemma("S(n) < 0", lambda n: -lemma_S(n), 2),
        _Lemma("U(n) < p_{n+1} p_{n+2}", lambda n: lemma_U_ceiling(n) - lemma_U(n), 2),
        _Lemma("f(n) < 0", lambda n: -lemma_f(n), 2, lambda n: _rel(lemma_f(n), lemma_f_grouped(n))),
    ]


LEMMA_NAMES = tuple(l.name for l in _lemma_table())


def lemma_suite(lo: int = 2, hi: int = 10 ** 4, *, prec=None, names=None) -> list:
    """One report per lemma: strict sign at every n plus any companion identity.

    Each quantity is evaluated with guard bits (4 log2 n + 16) on top of the
    working precision; companion identities must vanish to tolerance_rel.
    """
    p = resolve(prec)
    out = []
    for lem in _lemma_table():
        if names is not None and lem.name not in names:
            continue
        start = max(lo, lem.n_min)
        wit, min_gap, argmin, ident = [], None, start, mpfr(0)
        for n in range(start, hi + 1):
            with gmpy2.context(precision=p.mantissa_bits + guard_bits(n)):
                v = lem.value(n)
                if lem.companion is not None:
                    ident = max(ident, lem.companion(n))
            if not v > 0:
                wit.append(Witness(n, v, 0))
            if min_gap is None or v < min_gap:
                min_gap, argmin = v, n
        with p.activate():
            min_gap = mpfr(min_gap)
        out.append(VerificationReport(
            name=lem.name, range=(start, hi),
            max_residual=float(ident), tolerance=p.tolerance_rel,
            precision_used=p.mantissa_bits, witnesses=tuple(wit[:64]),
            details={"min_gap": min_gap, "argmin": argmin, "fail_count": len(wit)}))
    return out


# -- criticality --------------------------------------------------------------

@dataclass(frozen=True)
class CriticalitySequence:
    """The cut-off test sequence A^N (A_n = gamma^N_n n^{3/4} or psi^N_n n)."""

    variant: str
    N: int
    realized: FiniteSequence

    @classmethod
    def build(cls, variant: str, N: int, *, prec=None) -> "CriticalitySequence":
        if N < 2:
            raise ValueError("N must be >= 2")
        p = resolve(prec)
        with p.activate():
            vals = [mpfr(0)] + [criticality_cutoff(variant, N, n) * _crit_base(variant, n)
                                for n in range(1, N * N + 1)]
        return cls(variant, N, FiniteSequence(vals))


def _crit_base(variant, n):
    return mpfr(n) ** (mpfr(3) / 4) if variant == "tilde" else mpfr(n)


def criticality_cutoff(variant: str, N: int, n: int):
    """gamma^N_n (tilde) or psi^N_n (hat) at the active precision."""
    if n < N:
        return mpfr(1)
    if n > N * N:
        return mpfr(0)
    if variant == "tilde":
        d = N * gmpy2.root(mpfr(W.s_tilde(n)), 4) * gmpy2.sqrt(mpfr(n))
        return (d - n) / d
    if variant == "hat":
        return 1 - mpfr(1) / (N * n)
    raise ValueError(f"unknown variant {variant!r}")


def criticality_bound(variant: str, N: int):
    L = gmpy2.log(mpfr(N))
    if variant == "tilde":
        return L / N ** 2 + mpfr(1) / (2 * N) - mpfr(1) / (2 * N * N)
    return L / N ** 2


def _remainder_term(variant, A, n):
    # the Copson remainder summand at index n, evaluated from the sequence
    if variant == "tilde":
        r = mpfr(n) / (n + 1)
        k = mpfr(3) / 8
        v = r ** k * A(n + 1) - (1 / r) ** k * A(n)
        return abs_sq(v) * gmpy2.sqrt(mpfr(W.s_tilde(n + 1))) / (n + 1) ** 2
    r = mpfr(n) / (n + 1)
    v = gmpy2.sqrt(r) * A(n + 1) - gmpy2.rec_sqrt(r) * A(n)
    return abs_sq(v) * W.sqrt_s_hat(n + 1) / mpfr(n + 1) ** 3


def _displayed_sum(variant, N):
    """(1/N^2) sum_{n=N+1}^{N^2} of the cut-off differences, as written in closed form."""
    terms = []
    for n in range(N + 1, N * N + 1):
        if variant == "tilde":
            u = lambda m: m / (gmpy2.root(mpfr(W.s_tilde(m)), 4) * gmpy2.sqrt(mpfr(m)))
            terms.append((mpfr(n) * (n + 1)) ** (mpfr(3) / 4) * (u(n + 1) - u(n)) ** 2
                         * gmpy2.sqrt(mpfr(W.s_tilde(n + 1))) / (n + 1) ** 2)
        else:
            terms.append(mpfr(n) * (n + 1) * (mpfr(1) / (n + 1) - mpfr(1) / n) ** 2
                         * W.sqrt_s_hat(n + 1) / mpfr(n + 1) ** 3)
    return real_sum(terms) / (N * N)


@precise
def criticality_values(variant: str, N: int, *, prec=None) -> dict:
    """Remainder sums for A^N.

    taper: summands N-1 <= n <= N^2 - 1 (every difference inside the cut-off,
        the entry step at N included, the final drop to zero excluded);
    displayed: the closed-form sum over N+1 <= n <= N^2;
    full: the remainder functional over all n, including the drop at N^2.
    """
    seq = CriticalitySequence.build(variant, N, prec=prec).realized
    terms = [_remainder_term(variant, seq, n) for n in range(1, N * N + 1)]
    return {
        "N": N,
        "taper": real_sum(terms[N - 2:N * N - 1]),
        "displayed": _displayed_sum(variant, N),
        "full": real_sum(terms),
        "bound": criticality_bound(variant, N),
    }


@precise
def criticality_decay(variant: str, N_list=(4, 8, 16, 32, 64, 128), *, prec=None) -> VerificationReport:
    """Taper and displayed sums must sit below the bound and decrease along N_list.

    The full functional is reported but not judged: the drop from ~1 to 0 at
    n = N^2 contributes about N^2/2 on its own, so it grows with N.
    """
    rows = [criticality_values(variant, N, prec=prec) for N in N_list]
    witnesses = []
    worst = 0.0
    for r in rows:
        for key in ("taper", "displayed"):
            if r[key] > r["bound"]:
                witnesses.append(Witness(r["N"], f"{key}={float(r[key]):.6g}", float(r["bound"])))
                worst = max(worst, float((r[key] - r["bound"]) / r["bound"]))
    for prev, cur in zip(rows, rows[1:]):
        for key in ("taper", "displayed"):
            if not cur[key] < prev[key]:
                witnesses.append(Witness(cur["N"], f"{key} not decreasing", float(prev[key])))
    return VerificationReport(f"criticality-{variant}", tuple(N_list), worst, 0.0,
                              prec.mantissa_bits, tuple(witnesses), {"rows": rows})


# -- Knopp / Rellich ---------------------------------------------------------

def _check_knopp_boundary(alpha, A):
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if not A.vanishes_below(alpha):
        raise BoundaryConditionError(f"need A(n) = 0 for 0 <= n <= {alpha - 1}")


@precise
def knopp_rellich_identity(alpha: int, A: FiniteSequence, tolerance: float = IDENTITY_TOLERANCE,
                           *, prec=None) -> VerificationReport:
    """sum_{n>=alpha} |nabla^alpha A|^2 against sum_{n>=alpha} ((-Delta)^alpha A)_n conj(A_n)."""
    _check_knopp_boundary(alpha, A)
    nab = backward_difference(A, alpha)
    lhs = real_sum(abs_sq(nab(n)) for n in range(alpha, nab.support_end + 1))
    rhs = quadratic_form(lambda B: apply_laplacian_power(B, alpha, prec=prec), A, alpha, prec=prec)
    diff = abs(lhs - rhs)
    resid = float(diff / lhs) if lhs != 0 else float(diff)
    wit = (Witness(alpha, lhs, rhs),) if resid > tolerance else ()
    return VerificationReport(f"knopp-rellich-{alpha}", f"support_end={A.support_end}", resid,
                              tolerance, prec.mantissa_bits, wit, {"lhs": lhs, "rhs": rhs})


@precise
def knopp_improvement_chain(alpha: int, A: FiniteSequence, normalization: str = "knopp",
                            tolerance: float = IDENTITY_TOLERANCE, *, prec=None) -> VerificationReport:
    """energy >= sum rho^(a)|A|^2 > sum c_a n^{-2a}|A|^2 >= K_a^{-1} sum |A|^2 / C(n-1+a, n-1)^2.

    ``normalization="order2"`` (alpha = 2 only) ends the chain with
    (9/16) sum |A|^2 / (n^2 (n+1)^2), the 16/9-constant form; it equals the
    64/9 form because the row weights differ by the factor 4.
    For alpha >= 3 the first two links rest on the conjectured higher-order
    Rellich weight, and the report says so.
    """
    _check_knopp_boundary(alpha, A)
    end = A.support_end
    nab = backward_difference(A, alpha)
    energy = real_sum(abs_sq(nab(n)) for n in range(alpha, nab.support_end + 1))
    idx = range(alpha, end + 1)
    rho = real_sum(W.rellich_rho_alpha(alpha, n, prec=prec) * abs_sq(A(n)) for n in idx)
    coef = to_real(W.classical_rellich_coefficient(alpha))
    classical = real_sum(coef / mpfr(n) ** (2 * alpha) * abs_sq(A(n)) for n in idx)
    if normalization == "knopp":
        kc = W.knopp_constant(alpha)
        knopp = real_sum(to_real(W.knopp_row_weight(alpha, n) / kc) * abs_sq(A(n)) for n in idx)
    elif normalization == "order2":
        if alpha != 2:
            raise ValueError("the order2 normalisation exists only for alpha = 2")
        kc = W.ORDER2_MEAN_CONSTANT
        knopp = real_sum(to_real(W.order2_mean_weight(n) / kc) * abs_sq(A(n)) for n in idx)
    else:
        raise ValueError(f"unknown normalisation {normalization!r}")
    slack = tolerance * abs(energy)
    links = {
        "energy >= rho": energy - rho >= -slack,
        "rho > classical": (rho > classical) if not A.is_zero() else True,
        "classical >= knopp": classical - knopp >= -slack,
    }
    wit = tuple(Witness(k, None, None) for k, ok in links.items() if not ok)
    return VerificationReport(
        f"knopp-chain-{alpha}-{normalization}", f"support_end={end}", 0.0, tolerance,
        prec.mantissa_bits, wit,
        {"energy": energy, "rho": rho, "classical": classical, "knopp": knopp,
         "constant": kc, "conjectural": alpha >= 3, "links": links})


def knopp_chain_step(alpha: int, n: int) -> bool:
    """C(n-1+alpha, n-1) >= n^alpha / alpha!, exactly."""
    return math.comb(n - 1 + alpha, n - 1) * math.factorial(alpha) >= n ** alpha


def knopp_test_sequence(alpha: int, seed_index: int = 1, horizon: int = 30) -> FiniteSequence:
    """knopp_transform(e_k, alpha) out to ``horizon`` with A(0..alpha-1) zeroed."""
    from .sequences import knopp_transform
    A = knopp_transform(FiniteSequence.unit(seed_index), alpha, horizon)
    return FiniteSequence([0] * alpha + list(A.values[alpha:]))


# -- Gram-matrix oracles ------------------------------------------------------

def _block_residual(M, G, first, weights):
    """max |M_ij - diag(w)_ij - G_ij| / max |M_ij| over first <= i, j < size."""
    size = len(M)
    scale = max(abs(M[i][j]) for i in range(first, size) for j in range(first, size)) or 1
    worst, where = mpfr(0), None
    for i in range(first, size):
        for j in range(first, size):
            lhs = M[i][j] - (weights[i] if i == j else 0)
            r = abs(lhs - G[i][j]) / scale
            if r > worst:
                worst, where = r, (i, j)
    return worst, where


def _gram(R, size):
    # R^T R for rows given as full-width lists
    return [[real_sum(row[i] * row[j] for row in R if row[i] != 0 and row[j] != 0)
             if any(row[i] != 0 and row[j] != 0 for row in R) else mpfr(0)
             for j in range(size)] for i in range(size)]


@precise
def gram_oracle_rellich(delta: PositiveSequence, mu: PositiveSequence, size: int = 12,
                        tolerance: float = IDENTITY_TOLERANCE, *, prec=None) -> VerificationReport:
    """(-Delta_delta)^2 - diag(sigma2) = R2^T R2 on the block of indices 2..size-1."""
    from .factorization import remainder2_matrix
    from .operators import BILAPLACIAN_DELTA, OperatorSpec, operator_matrix
    if size < 3:
        raise ValueError("size must be >= 3")
    M = operator_matrix(OperatorSpec(BILAPLACIAN_DELTA, delta), size, prec=prec)
    coeffs = remainder_coefficients(delta, mu, size - 1, prec=prec)
    R = remainder2_matrix(delta, coeffs, size, prec=prec)
    sig = [0, 0] + [W.sigma2_weight(delta, mu, n, prec=prec) for n in range(2, size)]
    worst, where = _block_residual(M, _gram(R, size), 2, sig)
    wit = (Witness(where, None, None),) if worst > tolerance else ()
    return VerificationReport("gram-rellich", (2, size - 1), float(worst), tolerance,
                              prec.mantissa_bits, wit, {"argmax": where})


@precise
def gram_oracle_hardy(lam: PositiveSequence, c, mu: PositiveSequence, size: int = 12,
                      tolerance: float = IDENTITY_TOLERANCE, *, prec=None) -> VerificationReport:
    """(-Delta_Lambda) - diag(eta) = R1^T R1 on the block of indices 1..size-1."""
    from .factorization import remainder1_matrix
    from .operators import GENERALIZED, OperatorSpec, operator_matrix
    M = operator_matrix(OperatorSpec(GENERALIZED, lam, c), size, prec=prec)
    R = remainder1_matrix(Remainder1Spec(lam, c, mu), size, prec=prec)
    eta = [0] + [W.eta_weight(lam, c, mu, n, prec=prec) for n in range(1, size)]
    worst, where = _block_residual(M, _gram(R, size), 1, eta)
    wit = (Witness(where, None, None),) if worst > tolerance else ()
    return VerificationReport("gram-hardy", (1, size - 1), float(worst), tolerance,
                              prec.mantissa_bits, wit, {"argmax": where})
