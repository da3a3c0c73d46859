# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``nckit._kernel.pure``.

Same functions, same flat-array contract, bit-identical outputs; see the
pure module for the documentation.  Keep the two in lockstep when editing.
"""

from libc.stdlib cimport free, malloc

NAME = "compiled"

cdef unsigned long long _G1 = 0x9E3779B97F4A7C15ULL
cdef unsigned long long _G2 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long _M1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long _M2 = 0x94D049BB133111EBULL


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * _M1
    z = (z ^ (z >> 27)) * _M2
    return z ^ (z >> 31)


def mix64(z):
    return int(_mix64(<unsigned long long> z))


def draw(seed, trial, slot, q):
    cdef unsigned long long s = <unsigned long long> seed
    cdef unsigned long long t = <unsigned long long> trial
    cdef unsigned long long v = <unsigned long long> slot
    return int(_mix64(s + (t + 1) * _G1 + (v + 1) * _G2) % <unsigned long long> q)


cdef inline long long _add(long long p, long long k, long long a, long long b) noexcept nogil:
    cdef long long out, scale
    if p == 2:
        return a ^ b
    if k == 1:
        return (a + b) % p
    out = 0
    scale = 1
    while a or b:
        out += (a + b) % p * scale
        a //= p
        b //= p
        scale *= p
    return out


def count_nonzero_slots(
    long long q, long long p, long long k,
    long long[::1] exp, long long[::1] log, long long mu,
    long long[::1] slot_ptr, long long[::1] term_coef,
    long long[::1] term_vptr, long long[::1] term_var, long long[::1] term_exp,
):
    cdef long long n = q - 1
    cdef long long nslots = slot_ptr.shape[0] - 1
    cdef long long total = 1, i
    for i in range(mu):
        total *= q
    cdef long long* x = <long long*> malloc(mu * sizeof(long long) if mu else sizeof(long long))
    if x == NULL:
        raise MemoryError()
    cdef long long count = 0, point, s, t, e, v, base, acc
    cdef bint hit
    try:
        for i in range(mu):
            x[i] = 0
        for point in range(total):
            for s in range(nslots):
                acc = 0
                for t in range(slot_ptr[s], slot_ptr[s + 1]):
                    v = term_coef[t]
                    for e in range(term_vptr[t], term_vptr[t + 1]):
                        base = x[term_var[e]]
                        if base == 0:
                            v = 0
                            break
                        v = exp[(log[v] + log[base] * term_exp[e] % n) % n]
                    if v:
                        acc = _add(p, k, acc, v)
                if acc:
                    count += 1
                    break
            i = 0
            while i < mu:
                x[i] += 1
                if x[i] < q:
                    break
                x[i] = 0
                i += 1
    finally:
        free(x)
    return int(count)


def count_rank_success(
    long long q, long long p, long long k,
    long long[::1] exp, long long[::1] log, long long[::1] inv, long long[::1] neg,
    long long mu, long long h, long long n_edges,
    long long[::1] contrib_ptr, long long[::1] contrib_kind,
    long long[::1] contrib_idx, long long[::1] contrib_isvar, long long[::1] contrib_val,
    long long[::1] sink_ptr, long long[::1] sink_edge,
    long long mode, long long trials, unsigned long long seed,
):
    cdef long long n = q - 1
    cdef long long nsinks = sink_ptr.shape[0] - 1
    cdef long long max_rows = 0, i
    for i in range(nsinks):
        if sink_ptr[i + 1] - sink_ptr[i] > max_rows:
            max_rows = sink_ptr[i + 1] - sink_ptr[i]

    cdef long long* x = <long long*> malloc((mu if mu else 1) * sizeof(long long))
    cdef long long* vec = <long long*> malloc(n_edges * h * sizeof(long long))
    cdef long long* mat = <long long*> malloc(max_rows * h * sizeof(long long))
    if x == NULL or vec == NULL or mat == NULL:
        free(x); free(vec); free(mat)
        raise MemoryError()

    cdef long long total = 1
    if mode == 0:
        for i in range(mu):
            total *= q
    else:
        total = trials

    cdef long long count = 0, point, pos, base, c, j, coeff, src, lc, sv
    cdef long long si, lo, rows, r, rank, col, piv, f, lf, t, rj, linv, tmp
    cdef bint ok
    try:
        for i in range(mu):
            x[i] = 0
        for point in range(total):
            if mode == 1:
                for i in range(mu):
                    x[i] = <long long> (_mix64(seed + (<unsigned long long> point + 1) * _G1
                                               + (<unsigned long long> i + 1) * _G2)
                                        % <unsigned long long> q)
            ok = True
            for pos in range(n_edges):
                base = pos * h
                for j in range(h):
                    vec[base + j] = 0
                for c in range(contrib_ptr[pos], contrib_ptr[pos + 1]):
                    coeff = x[contrib_val[c]] if contrib_isvar[c] else contrib_val[c]
                    if coeff == 0:
                        continue
                    if contrib_kind[c] == 0:
                        j = base + contrib_idx[c]
                        vec[j] = _add(p, k, vec[j], coeff)
                    else:
                        src = contrib_idx[c] * h
                        lc = log[coeff]
                        for j in range(h):
                            sv = vec[src + j]
                            if sv:
                                vec[base + j] = _add(p, k, vec[base + j], exp[lc + log[sv]])
            for si in range(nsinks):
                lo = sink_ptr[si]
                rows = sink_ptr[si + 1] - lo
                if rows < h:
                    ok = False
                    break
                for r in range(rows):
                    src = sink_edge[lo + r] * h
                    for j in range(h):
                        mat[r * h + j] = vec[src + j]
                rank = 0
                for col in range(h):
                    piv = -1
                    for r in range(rank, rows):
                        if mat[r * h + col]:
                            piv = r
                            break
                    if piv < 0:
                        ok = False
                        break
                    if piv != rank:
                        for j in range(col, h):
                            tmp = mat[piv * h + j]
                            mat[piv * h + j] = mat[rank * h + j]
                            mat[rank * h + j] = tmp
                    linv = log[inv[mat[rank * h + col]]]
                    for r in range(rank + 1, rows):
                        f = mat[r * h + col]
                        if f == 0:
                            continue
                        lf = (log[f] + linv) % n
                        mat[r * h + col] = 0
                        for j in range(col + 1, h):
                            t = mat[rank * h + j]
                            if t:
                                rj = r * h + j
                                mat[rj] = _add(p, k, mat[rj], neg[exp[lf + log[t]]])
                    rank += 1
                if not ok:
                    break
            if ok:
                count += 1
            if mode == 0:
                i = 0
                while i < mu:
                    x[i] += 1
                    if x[i] < q:
                        break
                    x[i] = 0
                    i += 1
    finally:
        free(x)
        free(vec)
        free(mat)
    return int(count)
