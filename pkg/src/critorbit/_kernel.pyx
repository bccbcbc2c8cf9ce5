# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the per-prime hot loops.

Same API and semantics as critorbit._purekernel (which is the reference
implementation); this path assumes p < 2**31 and 64-bit operands, which
the drivers enforce before dispatching here.
"""

from libc.stdlib cimport free, malloc, qsort

NAME = "cython"

ctypedef unsigned long long u64
ctypedef long long i64

cdef int _MAXDEG = 64


cdef inline u64 _powmod(u64 b, u64 e, u64 p) noexcept nogil:
    cdef u64 r = 1
    b %= p
    while e:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


cdef i64 _sqrtmod(u64 a, u64 p) noexcept nogil:
    """Square root of a mod odd prime p, or -1 for a non-residue."""
    cdef u64 q, z, m, c, t, r, t2, b
    cdef int s, i, j
    a %= p
    if a == 0:
        return 0
    if _powmod(a, (p - 1) >> 1, p) != 1:
        return -1
    if (p & 3) == 3:
        return <i64>_powmod(a, (p + 1) >> 2, p)
    q = p - 1
    s = 0
    while (q & 1) == 0:
        q >>= 1
        s += 1
    z = 2
    while _powmod(z, (p - 1) >> 1, p) != p - 1:
        z += 1
    m = s
    c = _powmod(z, q, p)
    t = _powmod(a, q, p)
    r = _powmod(a, (q + 1) >> 1, p)
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = c
        for j in range(m - i - 1):
            b = b * b % p
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return <i64>r


cdef inline u64 _evalmod(u64* cs, int n, u64 x, u64 p) noexcept nogil:
    cdef u64 acc = 0
    cdef int i
    for i in range(n - 1, -1, -1):
        acc = (acc * x + cs[i]) % p
    return acc


cdef int _walk_qx(u64 b, u64 c, u64 x0, u64 p, i64* steps, i64* lam) noexcept nogil:
    """Brent walk for monic quadratic f with g = x (hit when x == 0)."""
    cdef u64 tort, hare
    cdef i64 power = 1, l = 1, s = 1
    steps[0] = -1
    lam[0] = -1
    if x0 == 0:
        steps[0] = 0
        return 1
    tort = x0
    hare = (x0 * (x0 + b) + c) % p
    while True:
        if hare == 0:
            steps[0] = s
            return 1
        if hare == tort:
            lam[0] = l
            return 0
        if power == l:
            tort = hare
            power <<= 1
            l = 0
        hare = (hare * (hare + b) + c) % p
        l += 1
        s += 1


cdef int _walk_gen(u64* fcm, int fn, u64* gcm, int gn, u64 x0, u64 p,
                   i64* steps, i64* lam) noexcept nogil:
    """Brent walk, generic coefficients; gn == 0 means g = x."""
    cdef u64 tort, hare
    cdef i64 power = 1, l = 1, s = 1
    cdef bint hit0
    steps[0] = -1
    lam[0] = -1
    if gn == 0:
        hit0 = x0 == 0
    else:
        hit0 = _evalmod(gcm, gn, x0, p) == 0
    if hit0:
        steps[0] = 0
        return 1
    tort = x0
    hare = _evalmod(fcm, fn, x0, p)
    while True:
        if gn == 0:
            hit0 = hare == 0
        else:
            hit0 = _evalmod(gcm, gn, hare, p) == 0
        if hit0:
            steps[0] = s
            return 1
        if hare == tort:
            lam[0] = l
            return 0
        if power == l:
            tort = hare
            power <<= 1
            l = 0
        hare = _evalmod(fcm, fn, hare, p)
        l += 1
        s += 1


cdef inline u64 _redc(i64 v, u64 p) noexcept nogil:
    cdef i64 r = v % <i64>p
    if r < 0:
        r += <i64>p
    return <u64>r


def orbit_member_batch(f_coeffs, g_coeffs, prefix_pairs, start_index, start_value, primes, collect=False):
    cdef int fn = len(f_coeffs)
    cdef int gn = len(g_coeffs) if g_coeffs is not None else 0
    cdef int npre = len(prefix_pairs)
    if fn > _MAXDEG or gn > _MAXDEG:
        raise ValueError("degree exceeds kernel cap")
    cdef i64* fc = <i64*>malloc(fn * sizeof(i64))
    cdef i64* gc = <i64*>malloc((gn if gn else 1) * sizeof(i64))
    cdef i64* pre_n = <i64*>malloc((npre if npre else 1) * sizeof(i64))
    cdef i64* pre_v = <i64*>malloc((npre if npre else 1) * sizeof(i64))
    cdef Py_ssize_t np_ = len(primes)
    cdef i64* ps = <i64*>malloc((np_ if np_ else 1) * sizeof(i64))
    cdef i64* r_steps = NULL
    cdef i64* r_lam = NULL
    cdef char* r_mem = NULL
    cdef bint do_collect = bool(collect)
    cdef int i
    cdef Py_ssize_t j
    cdef bint has_start = start_value is not None
    cdef i64 sv = start_value if start_value is not None else 0
    cdef i64 sidx = start_index if start_index is not None else 0
    cdef i64 members = 0
    cdef u64 p, x0, b = 0, c = 0
    cdef u64 fcm[64]
    cdef u64 gcm[64]
    cdef i64 steps, lam
    cdef int k, hit
    cdef bint quad_x = fn == 3 and gn == 0
    if do_collect:
        r_steps = <i64*>malloc((np_ if np_ else 1) * sizeof(i64))
        r_lam = <i64*>malloc((np_ if np_ else 1) * sizeof(i64))
        r_mem = <char*>malloc(np_ if np_ else 1)
    try:
        for i in range(fn):
            fc[i] = f_coeffs[i]
        for i in range(gn):
            gc[i] = g_coeffs[i]
        for i in range(npre):
            pre_n[i] = prefix_pairs[i][0]
            pre_v[i] = prefix_pairs[i][1]
        for j in range(np_):
            ps[j] = primes[j]
        with nogil:
            for j in range(np_):
                p = <u64>ps[j]
                hit = 0
                steps = -1
                lam = 0
                for k in range(npre):
                    if _redc(pre_v[k], p) == 0:
                        hit = 1
                        steps = pre_n[k]
                        break
                if hit == 0 and has_start:
                    x0 = _redc(sv, p)
                    if quad_x and fc[2] % <i64>p == 1:
                        b = _redc(fc[1], p)
                        c = _redc(fc[0], p)
                        hit = _walk_qx(b, c, x0, p, &steps, &lam)
                    else:
                        for k in range(fn):
                            fcm[k] = _redc(fc[k], p)
                        for k in range(gn):
                            gcm[k] = _redc(gc[k], p)
                        hit = _walk_gen(fcm, fn, gcm, gn, x0, p, &steps, &lam)
                    if hit:
                        steps += sidx
                if hit:
                    members += 1
                if do_collect:
                    r_mem[j] = <char>hit
                    r_steps[j] = steps
                    r_lam[j] = lam
        rows = None
        if do_collect:
            rows = [
                (primes[j], int(r_mem[j]), int(r_steps[j]), int(r_lam[j]))
                for j in range(np_)
            ]
        return int(members), rows
    finally:
        free(fc)
        free(gc)
        free(pre_n)
        free(pre_v)
        free(ps)
        if r_steps != NULL:
            free(r_steps)
        if r_lam != NULL:
            free(r_lam)
        if r_mem != NULL:
            free(r_mem)


cdef int _cmp_u64(const void* a, const void* b) noexcept nogil:
    cdef u64 x = (<u64*>a)[0]
    cdef u64 y = (<u64*>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef int _bfs_depth(u64 b, u64 c, int depth, u64 p, u64* roots, int nroots) noexcept nogil:
    """Achieved backward-chain depth <= depth under x^2 + bx + c mod p.

    The frontier doubles at worst per level and is deduped, so it stays
    below p; buffers grow on demand.
    """
    cdef u64 inv2 = (p + 1) >> 1
    cdef u64 h = b % p * inv2 % p
    cdef u64 shift = (h * h % p + p - c % p) % p
    cdef int cap = 1024
    cdef u64* cur
    cdef u64* nxt
    cdef u64* tmp
    cdef int ncur = 0, nnxt, d = 0, i, t
    cdef i64 r
    cdef u64 y
    while cap < 2 * nroots + 2:
        cap <<= 1
    cur = <u64*>malloc(cap * sizeof(u64))
    nxt = <u64*>malloc(cap * sizeof(u64))
    if cur == NULL or nxt == NULL:
        if cur != NULL:
            free(cur)
        if nxt != NULL:
            free(nxt)
        return -2
    for i in range(nroots):
        cur[i] = roots[i] % p
    ncur = nroots
    while d < depth:
        if 2 * ncur + 2 > cap:
            while cap < 2 * ncur + 2:
                cap <<= 1
            tmp = <u64*>malloc(cap * sizeof(u64))
            if tmp == NULL:
                free(cur)
                free(nxt)
                return -2
            for i in range(ncur):
                tmp[i] = cur[i]
            free(cur)
            cur = tmp
            tmp = <u64*>malloc(cap * sizeof(u64))
            if tmp == NULL:
                free(cur)
                free(nxt)
                return -2
            free(nxt)
            nxt = tmp
        nnxt = 0
        for i in range(ncur):
            y = (cur[i] + shift) % p
            r = _sqrtmod(y, p)
            if r < 0:
                continue
            nxt[nnxt] = (<u64>r + p - h) % p
            nnxt += 1
            nxt[nnxt] = (p - <u64>r + p - h) % p
            nnxt += 1
        if nnxt == 0:
            free(cur)
            free(nxt)
            return d
        if nnxt > 8:
            qsort(nxt, nnxt, sizeof(u64), _cmp_u64)
            t = 1
            for i in range(1, nnxt):
                if nxt[i] != nxt[t - 1]:
                    nxt[t] = nxt[i]
                    t += 1
            nnxt = t
        tmp = cur
        cur = nxt
        nxt = tmp
        ncur = nnxt
        d += 1
    free(cur)
    free(nxt)
    return depth


def preimage_depth_one(b, c, depth, p, roots):
    cdef int nroots = len(roots)
    if nroots == 0:
        return -1
    cdef u64* rs = <u64*>malloc(nroots * sizeof(u64))
    cdef int i, out
    cdef u64 pp = p
    try:
        for i in range(nroots):
            rs[i] = <u64>(roots[i] % p)
        out = _bfs_depth(<u64>(b % p), <u64>(c % p), depth, pp, rs, nroots)
        if out == -2:
            raise MemoryError("preimage frontier allocation failed")
        return out
    finally:
        free(rs)


def preimage_depth_batch(b, c, depth, primes):
    cdef Py_ssize_t np_ = len(primes)
    cdef i64* ps = <i64*>malloc((np_ if np_ else 1) * sizeof(i64))
    cdef signed char* out = <signed char*>malloc(np_ if np_ else 1)
    cdef Py_ssize_t j
    cdef i64 bb = b, cc = c
    cdef int dep = depth
    cdef u64 p, root0
    cdef int d
    try:
        for j in range(np_):
            ps[j] = primes[j]
        with nogil:
            for j in range(np_):
                p = <u64>ps[j]
                root0 = 0
                d = _bfs_depth(_redc(bb, p), _redc(cc, p), dep, p, &root0, 1)
                out[j] = <signed char>d
        return [int(out[j]) for j in range(np_)]
    finally:
        free(ps)
        free(out)
