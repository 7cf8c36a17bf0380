# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""MPFR evaluation of the scanned weight families, GIL released.

Each family mirrors its pure-Python twin in _kernel_py operation by operation,
so with correct rounding the two backends return identical bits.
"""
cdef extern from "mpfr.h" nogil:
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN

    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    void mpfr_set_prec(mpfr_ptr, mpfr_prec_t)
    mpfr_prec_t mpfr_get_prec(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_add_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_ui_sub(mpfr_ptr, unsigned long, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_mul_si(mpfr_ptr, mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_div_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_ui_div(mpfr_ptr, unsigned long, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sqrt(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_pow(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_pow_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_abs(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_2si(mpfr_ptr, mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_cmp(mpfr_ptr, mpfr_ptr)
    int mpfr_sgn(mpfr_ptr)
    double mpfr_get_d(mpfr_ptr, mpfr_rnd_t)
    char *mpfr_get_str(char *, mpfr_exp_t *, int, size_t, mpfr_ptr, mpfr_rnd_t)
    void mpfr_free_str(char *)


DEF NTMP = 12

cdef struct Work:
    __mpfr_struct t[NTMP]
    mpfr_prec_t cur


cdef inline long bitlen(unsigned long n) noexcept nogil:
    cdef long b = 0
    if n == 0:
        n = 1
    while n:
        b += 1
        n >>= 1
    return b


cdef inline long guard_bits(unsigned long n) noexcept nogil:
    return 4 * bitlen(n) + 16


cdef void work_init(Work *w, mpfr_prec_t bits) noexcept nogil:
    cdef int i
    for i in range(NTMP):
        mpfr_init2(&w.t[i], bits)
    w.cur = bits


cdef void work_prec(Work *w, mpfr_prec_t bits) noexcept nogil:
    # set_prec reallocates, so skip it when nothing changes
    cdef int i
    if w.cur == bits:
        return
    w.cur = bits
    for i in range(NTMP):
        mpfr_set_prec(&w.t[i], bits)


cdef void work_clear(Work *w) noexcept nogil:
    cdef int i
    for i in range(NTMP):
        mpfr_clear(&w.t[i])


cdef void g_remainder(mpfr_ptr out, mpfr_ptr x, Work *w) noexcept nogil:
    # out = -(x^3/8 + 9x^4/64) / ((1+x) sqrt(1+x) + 1 + 3x/2 + 3x^2/8); uses t[6..11]
    cdef mpfr_ptr p = &w.t[6]
    cdef mpfr_ptr q = &w.t[7]
    cdef mpfr_ptr r = &w.t[8]
    cdef mpfr_ptr s = &w.t[9]
    mpfr_mul_ui(q, x, 3, MPFR_RNDN)
    mpfr_div_ui(q, q, 2, MPFR_RNDN)
    mpfr_add_ui(p, q, 1, MPFR_RNDN)
    mpfr_mul_ui(q, x, 3, MPFR_RNDN)
    mpfr_mul(q, q, x, MPFR_RNDN)
    mpfr_div_ui(q, q, 8, MPFR_RNDN)
    mpfr_add(p, p, q, MPFR_RNDN)
    mpfr_pow_ui(q, x, 3, MPFR_RNDN)
    mpfr_div_ui(q, q, 8, MPFR_RNDN)
    mpfr_pow_ui(r, x, 4, MPFR_RNDN)
    mpfr_mul_ui(r, r, 9, MPFR_RNDN)
    mpfr_div_ui(r, r, 64, MPFR_RNDN)
    mpfr_add(q, q, r, MPFR_RNDN)
    mpfr_neg(q, q, MPFR_RNDN)
    mpfr_add_ui(r, x, 1, MPFR_RNDN)
    mpfr_sqrt(s, r, MPFR_RNDN)
    mpfr_mul(r, r, s, MPFR_RNDN)
    mpfr_add(r, r, p, MPFR_RNDN)
    mpfr_div(out, q, r, MPFR_RNDN)


cdef void set_s_tilde(mpfr_ptr out, unsigned long n) noexcept nogil:
    # n(n+1)(2n+1)/6 exactly, then one rounding into out (matches mpfr(int))
    cdef __mpfr_struct tmp
    mpfr_init2(&tmp, 256)
    mpfr_set_ui(&tmp, n, MPFR_RNDN)
    mpfr_mul_ui(&tmp, &tmp, n + 1, MPFR_RNDN)
    mpfr_mul_ui(&tmp, &tmp, 2 * n + 1, MPFR_RNDN)
    mpfr_div_ui(&tmp, &tmp, 6, MPFR_RNDN)
    mpfr_set(out, &tmp, MPFR_RNDN)
    mpfr_clear(&tmp)


cdef int eval_family(int fid, unsigned long n, mpfr_prec_t bits, mpfr_ptr out, Work *w) noexcept nogil:
    """Write family ``fid`` at index n into ``out`` (precision already ``bits``)."""
    cdef mpfr_ptr x = &w.t[0]
    cdef mpfr_ptr a = &w.t[1]
    cdef mpfr_ptr b = &w.t[2]
    cdef mpfr_ptr c = &w.t[3]
    cdef mpfr_ptr d = &w.t[4]
    cdef mpfr_ptr e = &w.t[5]
    cdef mpfr_prec_t wb
    if fid < 0 or fid >= 10:
        return -2
    if n >> 31:  # (n+1)^2, n^2+3n+1 etc. must fit an unsigned long
        return -1
    if fid == 0:
        if n < 1:
            return -1
        work_prec(w, bits)
        mpfr_set_ui(x, 1, MPFR_RNDN)
        mpfr_div_ui(x, x, n, MPFR_RNDN)
        mpfr_mul(a, x, x, MPFR_RNDN)
        mpfr_ui_sub(a, 1, a, MPFR_RNDN)
        mpfr_sqrt(a, a, MPFR_RNDN)
        mpfr_add_ui(a, a, 1, MPFR_RNDN)
        mpfr_ui_sub(b, 1, x, MPFR_RNDN)
        mpfr_sqrt(b, b, MPFR_RNDN)
        mpfr_add_ui(b, b, 2, MPFR_RNDN)
        mpfr_add_ui(c, x, 1, MPFR_RNDN)
        mpfr_sqrt(c, c, MPFR_RNDN)
        mpfr_add(b, b, c, MPFR_RNDN)
        mpfr_mul(a, a, b, MPFR_RNDN)
        mpfr_mul_ui(c, x, 2, MPFR_RNDN)
        mpfr_mul(c, c, x, MPFR_RNDN)
        mpfr_div(out, c, a, MPFR_RNDN)
        return 0
    if fid == 1:
        work_prec(w, 192 if bits < 192 else bits)
        mpfr_set_ui(x, 4 * n, MPFR_RNDN)
        mpfr_mul_ui(x, x, n, MPFR_RNDN)
        mpfr_ui_div(out, 1, x, MPFR_RNDN)
        return 0
    if fid == 2:
        if n < 2:
            return -1
        work_prec(w, bits)
        mpfr_set_ui(x, 1, MPFR_RNDN)
        mpfr_div_ui(x, x, n, MPFR_RNDN)
        g_remainder(a, x, w)
        mpfr_neg(d, x, MPFR_RNDN)
        g_remainder(b, d, w)
        mpfr_add(a, a, b, MPFR_RNDN)
        mpfr_mul_si(a, a, -4, MPFR_RNDN)
        mpfr_mul_ui(d, x, 2, MPFR_RNDN)
        g_remainder(b, d, w)
        mpfr_neg(d, d, MPFR_RNDN)
        g_remainder(c, d, w)
        mpfr_add(b, b, c, MPFR_RNDN)
        mpfr_add(out, a, b, MPFR_RNDN)
        return 0
    if fid == 3:
        if n < 2:
            return -1
        work_prec(w, bits)
        mpfr_set_ui(x, n, MPFR_RNDN)
        mpfr_pow_ui(x, x, 4, MPFR_RNDN)
        mpfr_ui_div(out, 9, x, MPFR_RNDN)
        mpfr_div_ui(out, out, 16, MPFR_RNDN)
        return 0
    if fid == 4:
        if n < 1:
            return -1
        wb = bits + guard_bits(n)
        work_prec(w, wb)
        set_s_tilde(a, n)
        mpfr_sqrt(a, a, MPFR_RNDN)
        mpfr_div_ui(a, a, n * n, MPFR_RNDN)
        set_s_tilde(b, n + 1)
        mpfr_sqrt(b, b, MPFR_RNDN)
        mpfr_div_ui(b, b, (n + 1) * (n + 1), MPFR_RNDN)
        mpfr_set_ui(e, 3, MPFR_RNDN)
        mpfr_div_ui(e, e, 4, MPFR_RNDN)
        mpfr_set_ui(x, 1, MPFR_RNDN)
        mpfr_div_ui(x, x, n, MPFR_RNDN)
        mpfr_ui_sub(c, 1, x, MPFR_RNDN)
        mpfr_pow(c, c, e, MPFR_RNDN)
        mpfr_mul(c, a, c, MPFR_RNDN)
        mpfr_add_ui(d, x, 1, MPFR_RNDN)
        mpfr_pow(d, d, e, MPFR_RNDN)
        mpfr_mul(d, b, d, MPFR_RNDN)
        mpfr_add(a, a, b, MPFR_RNDN)
        mpfr_sub(a, a, c, MPFR_RNDN)
        mpfr_sub(a, a, d, MPFR_RNDN)
        mpfr_set(out, a, MPFR_RNDN)
        return 0
    if fid == 5:
        work_prec(w, bits)
        set_s_tilde(a, n)
        mpfr_sqrt(b, a, MPFR_RNDN)
        mpfr_mul_ui(a, a, 16, MPFR_RNDN)
        mpfr_mul(a, a, b, MPFR_RNDN)
        mpfr_ui_div(out, n * n, a, MPFR_RNDN)
        return 0
    if fid == 6:
        if n < 1:
            return -1
        # (n^2 + 3n + 1) / (2 n^3 (n+1)^2), operands exact at >= 192 bits
        work_prec(w, 192 if bits < 192 else bits)
        mpfr_set_ui(a, n * n + 3 * n + 1, MPFR_RNDN)
        mpfr_set_ui(b, 2 * n, MPFR_RNDN)
        mpfr_mul_ui(b, b, n, MPFR_RNDN)
        mpfr_mul_ui(b, b, n, MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_div(out, a, b, MPFR_RNDN)
        return 0
    if fid == 7:
        work_prec(w, 192 if bits < 192 else bits)
        mpfr_set_ui(b, 2 * (n + 1), MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_ui_div(out, 1, b, MPFR_RNDN)
        return 0
    if fid == 8:
        if n < 1:
            return -1
        wb = bits + guard_bits(n)
        work_prec(w, wb)
        mpfr_set_ui(x, n, MPFR_RNDN)
        mpfr_ui_div(a, 1, x, MPFR_RNDN)
        mpfr_set_ui(c, n + 1, MPFR_RNDN)
        mpfr_ui_div(b, 1, c, MPFR_RNDN)
        mpfr_add(d, a, b, MPFR_RNDN)
        mpfr_mul_ui(e, a, n - 1, MPFR_RNDN)
        mpfr_div(e, e, x, MPFR_RNDN)
        mpfr_sub(d, d, e, MPFR_RNDN)
        mpfr_mul_ui(e, b, n + 1, MPFR_RNDN)
        mpfr_div(e, e, x, MPFR_RNDN)
        mpfr_sub(d, d, e, MPFR_RNDN)
        mpfr_set(out, d, MPFR_RNDN)
        return 0
    if fid == 9:
        work_prec(w, 192 if bits < 192 else bits)
        mpfr_set_ui(b, n, MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_mul_ui(b, b, n + 1, MPFR_RNDN)
        mpfr_ui_div(out, 1, b, MPFR_RNDN)
        return 0
    return -2


FAMILY_COUNT = 10

cdef object to_hex_text(mpfr_ptr v):
    cdef mpfr_exp_t ex = 0
    cdef char *s = mpfr_get_str(NULL, &ex, 16, 0, v, MPFR_RNDN)
    cdef bytes raw = s
    mpfr_free_str(s)
    text = raw.decode()
    if text.startswith("-"):
        return f"-0.{text[1:]}@{ex}"
    return f"0.{text}@{ex}"


def evaluate(int fid, unsigned long n, long bits):
    """Hex text '0.<digits>@<exp>' (base 16) of family ``fid`` at ``n``."""
    cdef Work w
    cdef __mpfr_struct out
    cdef int rc
    work_init(&w, bits)
    mpfr_init2(&out, bits)
    with nogil:
        rc = eval_family(fid, n, bits, &out, &w)
    try:
        if rc == -2:
            raise ValueError(f"unknown family id {fid}")
        if rc != 0:
            raise ValueError(f"family {fid} is undefined at n = {n}")
        return to_hex_text(&out)
    finally:
        mpfr_clear(&out)
        work_clear(&w)


cdef int compare_at(int fa, int fb, unsigned long n, mpfr_prec_t bits, Work *w,
                    mpfr_ptr va, mpfr_ptr vb, mpfr_ptr diff, double *rel) noexcept nogil:
    """Sign of family_a(n) - family_b(n) at ``bits``; 2 means too close to call."""
    cdef int rc
    if mpfr_get_prec(va) != bits:
        mpfr_set_prec(va, bits)
        mpfr_set_prec(vb, bits)
        mpfr_set_prec(diff, bits)
    rc = eval_family(fa, n, bits, va, w)
    if rc != 0:
        return -9
    rc = eval_family(fb, n, bits, vb, w)
    if rc != 0:
        return -9
    mpfr_sub(diff, va, vb, MPFR_RNDN)
    rel[0] = mpfr_get_d(diff, MPFR_RNDN) / mpfr_get_d(vb, MPFR_RNDN)
    # |a - b| < 2^(-bits/2) |a| ?
    mpfr_abs(vb, va, MPFR_RNDN)
    mpfr_mul_2si(vb, vb, -(bits // 2), MPFR_RNDN)
    mpfr_abs(va, diff, MPFR_RNDN)
    if mpfr_cmp(va, vb) < 0:
        return 2
    return mpfr_sgn(diff)


def scan_pair(int fa, int fb, unsigned long lo, unsigned long hi, long bits, int max_witnesses=64):
    """Check family_a(n) > family_b(n) for lo <= n <= hi.

    Returns (witnesses, fail_count, escalations, min_rel_gap, argmin).  A close
    call is re-decided at doubled precision before it counts either way.
    """
    cdef Work w
    cdef __mpfr_struct va, vb, diff
    cdef unsigned long n, argmin = lo
    cdef int s
    cdef double rel = 0.0, min_rel = 1e308
    cdef long fails = 0, esc = 0, nw = 0
    cdef int broken = 0
    cdef unsigned long bad = 0
    cdef unsigned long wit[256]
    if max_witnesses > 256:
        max_witnesses = 256
    work_init(&w, bits)
    mpfr_init2(&va, bits)
    mpfr_init2(&vb, bits)
    mpfr_init2(&diff, bits)
    with nogil:
        for n in range(lo, hi + 1):
            s = compare_at(fa, fb, n, bits, &w, &va, &vb, &diff, &rel)
            if s == 2:
                esc += 1
                s = compare_at(fa, fb, n, 2 * bits, &w, &va, &vb, &diff, &rel)
                if s == 2:
                    s = 0
            if s == -9:
                broken = 1
                bad = n
                break
            if rel < min_rel:
                min_rel = rel
                argmin = n
            if s <= 0:
                fails += 1
                if nw < max_witnesses:
                    wit[nw] = n
                    nw += 1
    mpfr_clear(&va)
    mpfr_clear(&vb)
    mpfr_clear(&diff)
    work_clear(&w)
    if broken:
        raise ValueError(f"family {fa} or {fb} is undefined at n = {bad}")
    return [wit[i] for i in range(nw)], fails, esc, min_rel, argmin
