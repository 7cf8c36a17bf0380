"""Backend selection for the pointwise scan kernel.

The compiled MPFR extension is used when it imported cleanly; otherwise (or
with ``HARDY_RELLICH_BACKEND=python``) the gmpy2 twin runs instead.  Both
expose ``evaluate`` and ``scan_pair`` with identical semantics.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from gmpy2 import mpfr

from . import _kernel_py

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

FAMILY_IDS = {
    "hardy-classical": 0,
    "hardy-bound": 1,
    "rho2": 2,
    "rho2-bound": 3,
    "copson-tilde": 4,
    "copson-tilde-bound": 5,
    "copson-hat": 6,
    "copson-hat-bound": 7,
    "eta-linear": 8,
    "eta-linear-bound": 9,
}


def backend_name(requested: str | None = None) -> str:
    want = (requested or os.environ.get("HARDY_RELLICH_BACKEND", "auto")).lower()
    if want not in ("auto", "c", "python"):
        raise ValueError(f"unknown backend {want!r}")
    if want == "python" or _ckernel is None:
        if want == "c":
            raise ImportError("compiled kernel is not available")
        return "python"
    return "c"


def _module(backend=None):
    return _ckernel if backend_name(backend) == "c" else _kernel_py


def evaluate(fid: int, n: int, bits: int, backend=None):
    mod = _module(backend)
    v = mod.evaluate(fid, n, bits)
    return mpfr(v, bits, 16) if isinstance(v, str) else v


def _blocks(lo, hi, nblocks):
    size = max(1, -(-(hi - lo + 1) // nblocks))
    out = []
    start = lo
    while start <= hi:
        out.append((start, min(hi, start + size - 1)))
        start += size
    return out


def scan_pair(fa: int, fb: int, lo: int, hi: int, bits: int, *, backend=None, workers=None,
              max_witnesses: int = 64) -> dict:
    """Blockwise scan of family_a(n) > family_b(n); merged in block order."""
    name = backend_name(backend)
    mod = _ckernel if name == "c" else _kernel_py
    if workers is None:
        workers = min(8, os.cpu_count() or 1) if name == "c" else 1
    blocks = _blocks(lo, hi, max(1, workers) * 4 if workers > 1 else 1)
    job = lambda blk: mod.scan_pair(fa, fb, blk[0], blk[1], bits, max_witnesses)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(b) for b in blocks]
    wit, fails, esc = [], 0, 0
    min_rel, argmin = 1e308, lo
    for w, f, e, mr, am in parts:
        wit.extend(w)
        fails += f
        esc += e
        if mr < min_rel:
            min_rel, argmin = mr, am
    return {"witnesses": wit[:max_witnesses], "fail_count": fails, "escalations": esc,
            "min_rel_gap": min_rel, "argmin": argmin, "backend": name, "blocks": len(blocks)}
