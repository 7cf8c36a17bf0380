"""Command-line front end: weight tables, scans, identity checks, gamma tables,
criticality sums and the Knopp chain.

Exit status: 0 when every verdict passes, 1 on a verification failure (witness
rows go to stderr), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import gmpy2
from gmpy2 import mpfr

from . import verification as V
from . import weights as W
from .factorization import FactorizationBreakdown, gamma_bounds_check
from .precision import PrecisionContext, from_env, to_decimal, to_hex, to_real
from .sequences import BoundaryConditionError, FiniteSequence, PositiveSequence

COMMANDS = ("weights", "scan", "verify", "gamma", "criticality", "knopp")
IDENTITIES = ("hardy", "copson-tilde", "copson-hat", "rellich", "knopp")


class UsageError(ValueError):
    """Bad command-line input; maps to exit status 2."""


class SequenceFileError(ValueError):
    """A sequence file holds a malformed or non-positive value."""


@dataclass
class CliConfig:
    command: str
    n_max: int = 100
    precision_bits: int = 256
    tolerance: float = 1e-30
    format: str = "csv"
    seed: int = V.DEFAULT_SEED
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n_max < 1:
            raise UsageError("--n-max must be >= 1")
        if self.precision_bits < 64:
            raise UsageError("--precision-bits must be >= 64")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    @property
    def precision(self) -> PrecisionContext:
        return PrecisionContext(self.precision_bits, self.tolerance)


# -- sequence specs -----------------------------------------------------------

def _number(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _pow_sequence(r: Fraction, zero):
    if r.denominator == 1:
        gen = lambda n: Fraction(n) ** r.numerator
    else:
        gen = lambda n: mpfr(n) ** to_real(r)
    return PositiveSequence(gen, zero, f"pow:{r}")


def _file_sequence(path: str, zero):
    try:
        lines = Path(path).read_text().split()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    vals = []
    for i, tok in enumerate(lines, 1):
        try:
            v = Fraction(tok)
        except ValueError:
            raise SequenceFileError(f"{path}:{i}: malformed value {tok!r}") from None
        if not v > 0:
            raise SequenceFileError(f"{path}:{i}: value {tok} is not positive")
        vals.append(v)
    if not vals:
        raise SequenceFileError(f"{path}: no values")

    def gen(n, _v=tuple(vals)):
        if n > len(_v):
            raise SequenceFileError(f"{path} defines only n <= {len(_v)}, asked {n}")
        return _v[n - 1]

    return PositiveSequence(gen, zero, f"file:{path}")


def parse_sequence_spec(text: str, zero_value=1) -> PositiveSequence:
    """ones | linear | pow:<r> | shifted | copson-tilde-lambda | copson-hat-lambda | file:<path>"""
    zero = _number(str(zero_value)) if not isinstance(zero_value, (int, Fraction)) else zero_value
    if not zero > 0:
        raise UsageError("index-0 value must be positive")
    text = text.strip()
    if text == "ones":
        return PositiveSequence(lambda n: 1, zero, "ones")
    if text == "linear":
        return PositiveSequence(lambda n: n, zero, "linear")
    if text == "shifted":
        return PositiveSequence(lambda n: Fraction(n + 2, n + 1), zero, "shifted")
    if text == "copson-tilde-lambda":
        return PositiveSequence(W.copson_tilde_lambda, zero, text)
    if text == "copson-hat-lambda":
        return PositiveSequence(W.copson_hat_lambda, zero, text)
    if text.startswith("pow:"):
        return _pow_sequence(_number(text[4:]), zero)
    if text.startswith("file:") and len(text) > 5:
        return _file_sequence(text[5:], zero)
    raise UsageError(f"malformed sequence spec {text!r}")


def read_complex_sequences(path: str) -> list:
    """One sequence per line, whitespace-separated entries from index 0; ``a+bj`` allowed."""
    out = []
    for i, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            vals = [gmpy2.mpc(complex(t)) if "j" in t else mpfr(t) for t in line.split()]
        except ValueError:
            raise UsageError(f"{path}:{i}: malformed entry") from None
        out.append(FiniteSequence(vals))
    return out


# -- output -------------------------------------------------------------------

@dataclass
class Result:
    command: str
    params: dict
    columns: list
    rows: list
    verdict: str = "pass"
    max_residual: float = 0.0
    failures: list = field(default_factory=list)


def _is_mp(v):
    return isinstance(v, (type(mpfr(0)), Fraction))


def _cell(v, digits):
    if _is_mp(v):
        return to_decimal(to_real(v), digits)
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render(res: Result, cfg: CliConfig) -> str:
    digits = cfg.precision.decimal_digits
    with cfg.precision.activate():
        if cfg.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(res.columns)
            for row in res.rows:
                w.writerow([_cell(v, digits) for v in row])
            return buf.getvalue()
        rows = []
        for row in res.rows:
            d = {}
            for col, v in zip(res.columns, row):
                d[col] = _cell(v, digits)
                if _is_mp(v):
                    d[col + "_hex"] = to_hex(to_real(v))
            rows.append(d)
    doc = {"command": res.command, "params": res.params, "rows": rows, "verdict": res.verdict,
           "max_residual": res.max_residual, "precision_bits": cfg.precision_bits, "seed": cfg.seed}
    return json.dumps(doc, indent=1) + "\n"


def _report_result(res: Result, reports):
    for r in reports:
        if not r.passed:
            res.verdict = "fail"
            res.failures.extend(f"{r.name}\t{w.index}\t{w.lhs}\t{w.rhs}" for w in r.witnesses)
            if not r.witnesses:
                res.failures.append(f"{r.name}\tresidual {r.max_residual:.3e} > {r.tolerance:.1e}")
        res.max_residual = max(res.max_residual, r.max_residual)
    return res


# -- commands -----------------------------------------------------------------

def _seq_params(args, cfg, *names):
    out = {}
    for name in names:
        text = getattr(args, name)
        if text is None:
            continue
        cfg.params[name] = text
        out[name] = parse_sequence_spec(text, args.lambda0)
    return out


def _family(name, args, cfg):
    if name in W._FIXED:
        return W.build_family(name)
    if name not in W._PARAMETRIC:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(W.FAMILY_NAMES)}")
    seqs = _seq_params(args, cfg, "lam", "mu", "delta")
    kw = {}
    if name in ("eta", "sigma"):
        kw = {"lam": seqs.get("lam"), "mu": seqs.get("mu")}
        if name == "eta":
            kw["c"] = _c(args, cfg)
    elif name == "hardy-mu":
        kw = {"mu": seqs.get("mu")}
    elif name == "sigma2":
        kw = {"delta": seqs.get("delta"), "mu": seqs.get("mu")}
    elif name in ("gupta", "gupta-bound"):
        kw = {"alpha": _number(args.alpha or "0")}
        cfg.params["alpha"] = str(kw["alpha"])
    else:
        kw = {"alpha": int(args.alpha or 2)}
        cfg.params["alpha"] = kw["alpha"]
    missing = [k for k, v in kw.items() if v is None]
    if missing:
        raise UsageError(f"family {name} needs --{' --'.join(m.replace('lam', 'lambda') for m in missing)}")
    return W.build_family(name, **kw)


def _c(args, cfg):
    c = _number(args.c)
    cfg.params["c"] = str(c)
    return c


def cmd_weights(args, cfg) -> Result:
    fam = _family(args.family, args, cfg)
    cfg.params["family"] = args.family
    bound_name = W.BOUND_OF.get(args.family)
    bound = None
    if bound_name is not None:
        bound = (W.build_family(bound_name) if bound_name in W._FIXED
                 else W.build_family(bound_name, **_bound_params(fam)))
    res = Result("weights", cfg.params, ["n", "value", "classical_bound", "excess"], [])
    p = cfg.precision
    lo = max(fam.n_min, bound.n_min if bound else 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", W.WeightDomainWarning)
        for n in range(lo, cfg.n_max + 1):
            v = fam(n, prec=p)
            if bound is None:
                res.rows.append([n, v, None, None])
                continue
            b = bound(n, prec=p)
            with p.activate():
                ex = to_real(v) - to_real(b)
            res.rows.append([n, v, b, ex])
            if not ex > 0:
                res.verdict = "fail"
                res.failures.append(f"{fam.name}\t{n}\t{to_decimal(v, 20)}\t{to_decimal(b, 20)}")
    return res


def _bound_params(fam):
    # gupta stores alpha as text, rho-alpha as an int
    a = fam.params["alpha"]
    return {"alpha": Fraction(a) if isinstance(a, str) else a}


def cmd_scan(args, cfg) -> Result:
    fa = _family(args.family, args, cfg)
    other = args.versus or W.BOUND_OF.get(args.family)
    if other is None:
        raise UsageError(f"no classical bound registered for {args.family}; pass --versus")
    fb = W.build_family(other) if other in W._FIXED else (
        W.build_family(other, **_bound_params(fa)) if other in ("gupta-bound", "rho-alpha-bound")
        else _family(other, args, cfg))
    cfg.params.update(family=args.family, versus=other, n_min=args.n_min)
    rep = V.pointwise_scan(fa, fb, args.n_min, cfg.n_max, prec=cfg.precision, backend=args.backend)
    d = rep.details
    res = Result("scan", cfg.params,
                 ["n_min", "n_max", "fail_count", "min_rel_gap", "argmin", "escalations", "backend"],
                 [[rep.range[0], rep.range[1], d["fail_count"], d["min_rel_gap"], d["argmin"],
                   d["escalations"], d["backend"]]])
    return _report_result(res, [rep])


def _sequences_for(args, cfg, zeros_below):
    if args.sequence_file:
        cfg.params["sequence_file"] = args.sequence_file
        return read_complex_sequences(args.sequence_file)
    cfg.params.update(count=args.count, support=args.support)
    return V.random_sequences(args.count, args.support, zeros_below, seed=cfg.seed)


def cmd_verify(args, cfg) -> Result:
    ident = args.identity
    if ident not in IDENTITIES:
        raise UsageError(f"unknown identity {ident!r}; choose from {', '.join(IDENTITIES)}")
    cfg.params["identity"] = ident
    p = cfg.precision
    tol = args.residual_tolerance
    if ident == "hardy":
        seqs = _seq_params(args, cfg, "lam", "mu")
        if "lam" not in seqs or "mu" not in seqs:
            raise UsageError("hardy identity needs --lambda and --mu")
        c = _c(args, cfg)
        check = lambda A: V.verify_hardy_identity(seqs["lam"], c, seqs["mu"], A, tol, prec=p)
        zeros = 1
    elif ident in ("copson-tilde", "copson-hat"):
        variant = ident.split("-")[1]
        check = lambda A: V.verify_copson_identity(variant, A, tol, prec=p)
        zeros = 1
    elif ident == "rellich":
        seqs = _seq_params(args, cfg, "delta", "mu")
        if "delta" not in seqs or "mu" not in seqs:
            raise UsageError("rellich identity needs --delta and --mu")
        check = lambda A: V.verify_rellich_identity(seqs["delta"], seqs["mu"], A, tol, prec=p)
        zeros = 2
    else:
        alpha = int(args.alpha or 2)
        cfg.params["alpha"] = alpha
        check = lambda A: V.knopp_rellich_identity(alpha, A, tol, prec=p)
        zeros = alpha
    res = Result("verify", cfg.params, ["sequence", "support_end", "residual", "verdict"], [])
    reports = []
    for i, A in enumerate(_sequences_for(args, cfg, zeros)):
        try:
            r = check(A)
        except BoundaryConditionError as exc:
            raise UsageError(f"sequence {i}: {exc}") from None
        except FactorizationBreakdown as exc:
            r = V.VerificationReport(ident, f"sequence {i}", float("inf"), tol, p.mantissa_bits,
                                     (V.Witness(exc.index, exc.value, 0),), {"breakdown": exc.index})
        reports.append(r)
        res.rows.append([i, A.support_end, r.max_residual, r.verdict])
    return _report_result(res, reports)


def cmd_gamma(args, cfg) -> Result:
    seqs = _seq_params(args, cfg, "delta", "mu")
    if "delta" not in seqs or "mu" not in seqs:
        raise UsageError("gamma needs --delta and --mu")
    res = Result("gamma", cfg.params, ["n", "p_n*p_n+1", "gamma_sq", "p_n*p_n+1*p_n+2"], [])
    try:
        rep = gamma_bounds_check(seqs["delta"], seqs["mu"], cfg.n_max, prec=cfg.precision)
    except FactorizationBreakdown as exc:
        res.verdict = "fail"
        res.max_residual = float("inf")
        res.failures.append(f"breakdown\t{exc.index}\t{float(exc.value):.6g}")
        return res
    res.rows = [list(r) for r in rep.details["rows"]]
    return _report_result(res, [rep])


def cmd_criticality(args, cfg) -> Result:
    try:
        Ns = [int(t) for t in args.N.split(",")]
    except ValueError:
        raise UsageError(f"--N expects comma-separated integers, got {args.N!r}") from None
    if any(N < 2 for N in Ns):
        raise UsageError("every N must be >= 2")
    if args.variant not in ("tilde", "hat"):
        raise UsageError("--variant must be tilde or hat")
    cfg.params.update(variant=args.variant, N=Ns)
    rep = V.criticality_decay(args.variant, tuple(Ns), prec=cfg.precision)
    res = Result("criticality", cfg.params,
                 ["N", "remainder_sum", "paper_bound", "displayed_sum", "full_functional"],
                 [[r["N"], r["taper"], r["bound"], r["displayed"], r["full"]]
                  for r in rep.details["rows"]])
    return _report_result(res, [rep])


def cmd_knopp(args, cfg) -> Result:
    alpha = int(args.alpha or 2)
    cfg.params.update(alpha=alpha, normalization=args.normalization)
    p = cfg.precision
    res = Result("knopp", cfg.params,
                 ["sequence", "energy", "rho_weighted", "classical", "knopp", "identity_residual",
                  "conjectural", "verdict"], [])
    if args.sequence_file or args.random:
        seqs = _sequences_for(args, cfg, alpha)
    else:
        seqs = [V.knopp_test_sequence(alpha, horizon=max(cfg.n_max, alpha + 1))]
        cfg.params["sequence"] = "knopp_transform(e_1)"
    reports = []
    for i, A in enumerate(seqs):
        try:
            chain = V.knopp_improvement_chain(alpha, A, args.normalization, prec=p)
            ident = V.knopp_rellich_identity(alpha, A, args.residual_tolerance, prec=p)
        except BoundaryConditionError as exc:
            raise UsageError(f"sequence {i}: {exc}") from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        d = chain.details
        ok = chain.passed and ident.passed
        res.rows.append([i, d["energy"], d["rho"], d["classical"], d["knopp"], ident.max_residual,
                         d["conjectural"], "pass" if ok else "fail"])
        reports += [chain, ident]
    return _report_result(res, reports)


HANDLERS = {"weights": cmd_weights, "scan": cmd_scan, "verify": cmd_verify, "gamma": cmd_gamma,
            "criticality": cmd_criticality, "knopp": cmd_knopp}


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="MPFR mantissa bits (env HARDY_RELLICH_PRECISION_BITS, default 256)")
    common.add_argument("--tolerance", type=float, default=None,
                        help="relative tolerance (env HARDY_RELLICH_TOLERANCE)")
    common.add_argument("--seed", type=int, default=V.DEFAULT_SEED)
    common.add_argument("--n-max", type=int, default=100)
    common.add_argument("--lambda0", default="1", help="value of every sequence at index 0")
    common.add_argument("--lambda", dest="lam", metavar="SPEC")
    common.add_argument("--mu", metavar="SPEC")
    common.add_argument("--delta", metavar="SPEC")
    common.add_argument("--c", default="2")
    common.add_argument("--alpha", default=None)

    top = argparse.ArgumentParser(
        prog="hardy-rellich",
        description="Discrete Hardy, Copson and Rellich weights: tables and checks.",
        epilog="SPEC: ones | linear | pow:<r> | shifted | copson-tilde-lambda | "
               "copson-hat-lambda | file:<path>")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common],
                       help="table of a weight family; columns n,value,classical_bound,excess")
    p.add_argument("--family", required=True)

    p = sub.add_parser("scan", parents=[common],
                       help="strict pointwise comparison; columns n_min,n_max,fail_count,"
                            "min_rel_gap,argmin,escalations,backend")
    p.add_argument("--family", required=True)
    p.add_argument("--versus", help="family to beat (default: its classical bound)")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "c", "python"), default=None)

    for name, help_ in (("verify", "identity residuals; columns sequence,support_end,residual,verdict"),
                        ("knopp", "Knopp/Rellich chain; columns sequence,energy,rho_weighted,"
                                  "classical,knopp,identity_residual,conjectural,verdict")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--count", type=int, default=20)
        p.add_argument("--support", type=int, default=25)
        p.add_argument("--sequence-file", help="one complex sequence per line, from index 0")
        p.add_argument("--residual-tolerance", type=float, default=V.IDENTITY_TOLERANCE)
    sub.choices["verify"].add_argument("--identity", required=True, help=", ".join(IDENTITIES))
    sub.choices["knopp"].add_argument("--normalization", choices=("knopp", "order2"), default="knopp")
    sub.choices["knopp"].add_argument("--random", action="store_true",
                                      help="use seeded random sequences instead of the Knopp transform")

    sub.add_parser("gamma", parents=[common],
                   help="gamma_n^2 against its bounds; columns n,p_n*p_n+1,gamma_sq,p_n*p_n+1*p_n+2")

    p = sub.add_parser("criticality", parents=[common],
                       help="cut-off remainder sums; columns N,remainder_sum,paper_bound,"
                            "displayed_sum,full_functional")
    p.add_argument("--variant", default="tilde")
    p.add_argument("--N", default="4,8,16,32,64")
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        env = from_env(args.precision_bits, args.tolerance)
        cfg = CliConfig(args.command, args.n_max, env.mantissa_bits, env.tolerance_rel,
                        args.format, args.seed)
        res = HANDLERS[args.command](args, cfg)
    except (UsageError, SequenceFileError) as exc:
        print(f"hardy-rellich: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:  # parameter validation inside the library
        print(f"hardy-rellich: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(res, cfg))
    if res.verdict != "pass":
        for line in res.failures:
            print(line, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
