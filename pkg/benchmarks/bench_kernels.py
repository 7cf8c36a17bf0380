"""Compiled MPFR kernel vs the gmpy2 fallback on the pointwise scans.

    python3 benchmarks/bench_kernels.py [n_max] [bits]

Prints seconds per backend and the speedup; both backends must agree on
fail counts and argmin.
"""
import sys
import time

from hardy_rellich import kernels

PAIRS = [("hardy-classical", "hardy-bound"), ("rho2", "rho2-bound"),
         ("copson-tilde", "copson-tilde-bound"), ("copson-hat", "copson-hat-bound"),
         ("eta-linear", "eta-linear-bound")]


def run(backend, fa, fb, lo, hi, bits):
    t = time.perf_counter()
    r = kernels.scan_pair(kernels.FAMILY_IDS[fa], kernels.FAMILY_IDS[fb], lo, hi, bits, backend=backend)
    return time.perf_counter() - t, r


def main():
    hi = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    bits = int(sys.argv[2]) if len(sys.argv) > 2 else 256
    backends = ["python"] + (["c"] if kernels._ckernel is not None else [])
    print(f"n <= {hi}, {bits} bits")
    print(f"{'pair':<40}" + "".join(f"{b:>10}" for b in backends) + "   speedup")
    for fa, fb in PAIRS:
        lo = 2 if fa == "rho2" else 1
        times, results = [], []
        for b in backends:
            dt, r = run(b, fa, fb, lo, hi, bits)
            times.append(dt)
            results.append((r["fail_count"], r["argmin"]))
        assert len(set(results)) == 1, f"backends disagree on {fa}: {results}"
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) > 1 else "       -"
        print(f"{fa + ' > ' + fb:<40}" + "".join(f"{t:10.3f}" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
