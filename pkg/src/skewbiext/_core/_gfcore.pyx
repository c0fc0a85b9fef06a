# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled finite-field kernels. Signatures mirror ``_pycore``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

ctypedef long long i64


cdef inline i64 _m(i64 x, i64 p) nogil:
    x %= p
    return x + p if x < 0 else x


cdef void _mulmod_raw(const i64* a, const i64* b, const i64* mod, i64 n, i64 p,
                      i64* prod, i64* out) nogil:
    cdef i64 i, j, k, c, base
    for i in range(2 * n - 1):
        prod[i] = 0
    for i in range(n):
        if a[i]:
            for j in range(n):
                prod[i + j] += a[i] * b[j]
            # keep partial sums small for large p
            if p > 46340:
                for j in range(n):
                    prod[i + j] = _m(prod[i + j], p)
    for k in range(2 * n - 2, n - 1, -1):
        c = _m(prod[k], p)
        if c:
            base = k - n
            for i in range(n):
                if mod[i]:
                    prod[base + i] = _m(prod[base + i] - c * mod[i], p)
    for i in range(n):
        out[i] = _m(prod[i], p)


def mulmod(a, b, mod, i64 p):
    cdef i64 n = len(mod) - 1
    cdef i64 i
    cdef i64* buf = <i64*> malloc(sizeof(i64) * (6 * n + 1))
    if buf == NULL:
        raise MemoryError()
    cdef i64* ca = buf
    cdef i64* cb = buf + n
    cdef i64* cm = buf + 2 * n
    cdef i64* prod = buf + 3 * n + 1
    cdef i64* out = buf + 5 * n
    try:
        for i in range(n):
            ca[i] = a[i]
            cb[i] = b[i]
        for i in range(n + 1):
            cm[i] = mod[i]
        _mulmod_raw(ca, cb, cm, n, p, prod, out)
        return tuple([out[i] for i in range(n)])
    finally:
        free(buf)


def invmod(a, mod, i64 p):
    # extended Euclid on Python lists is not the bottleneck; reuse the pure version
    from ._pycore import invmod as _inv
    return _inv(a, mod, p)


def batch_mulmod(X, Y, mod, i64 p):
    cdef cnp.ndarray[i64, ndim=2, mode="c"] A = np.ascontiguousarray(X, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2, mode="c"] B = np.ascontiguousarray(Y, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1, mode="c"] Md = np.ascontiguousarray(mod, dtype=np.int64)
    cdef i64 M = A.shape[0]
    cdef i64 n = A.shape[1]
    cdef cnp.ndarray[i64, ndim=2, mode="c"] out = np.empty((M, n), dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1, mode="c"] prod = np.empty(2 * n, dtype=np.int64)
    cdef i64 r
    with nogil:
        for r in range(M):
            _mulmod_raw(&A[r, 0], &B[r, 0], &Md[0], n, p, &prod[0], &out[r, 0])
    return out


def matmul_mod(A, B, i64 p):
    from ._pycore import matmul_mod as _mm
    return _mm(A, B, p)


cdef i64 _inv_p(i64 x, i64 p):
    cdef i64 r = 1, e = p - 2, b = _m(x, p)
    while e:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


def rref_mod(Min, i64 p):
    cdef cnp.ndarray[i64, ndim=2, mode="c"] R = np.ascontiguousarray(np.array(Min, dtype=np.int64) % p)
    cdef i64 rows = R.shape[0]
    cdef i64 cols = R.shape[1]
    cdef i64 r = 0, c, i, j, piv, inv, f, t
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if R[i, c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                t = R[r, j]
                R[r, j] = R[piv, j]
                R[piv, j] = t
        inv = _inv_p(R[r, c], p)
        for j in range(cols):
            R[r, j] = R[r, j] * inv % p
        for i in range(rows):
            if i != r and R[i, c]:
                f = R[i, c]
                for j in range(cols):
                    if R[r, j]:
                        R[i, j] = _m(R[i, j] - f * R[r, j], p)
        pivots.append(c)
        r += 1
    return R, pivots


def polar_defects(qnum, i64 p, i64 D, gram):
    # codes split as lo + p^h * hi so a + b needs two table lookups and no division
    cdef i64 h = D // 2
    cdef i64 nlo = p ** h, nhi = p ** (D - h), M = p ** D
    cdef cnp.ndarray[i64, ndim=1, mode="c"] Q = np.ascontiguousarray(np.asarray(qnum, dtype=np.int64) % p)
    cdef cnp.ndarray[i64, ndim=2, mode="c"] G = np.ascontiguousarray(np.asarray(gram, dtype=np.int64) % p)
    codes = np.arange(M, dtype=np.int64)
    strides = p ** np.arange(D, dtype=np.int64)
    dig_np = (codes[:, None] // strides) % p if D else np.zeros((1, 0), dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2, mode="c"] dig = np.ascontiguousarray(dig_np)
    # gram applied to every b, columns i: (G b)_i
    cdef cnp.ndarray[i64, ndim=2, mode="c"] gb = np.ascontiguousarray((dig_np @ G.T) % p)
    lo_codes = np.arange(nlo, dtype=np.int64)
    hi_codes = np.arange(nhi, dtype=np.int64)
    lo_dig = (lo_codes[:, None] // p ** np.arange(h, dtype=np.int64)) % p
    hi_dig = (hi_codes[:, None] // p ** np.arange(D - h, dtype=np.int64)) % p
    cdef cnp.ndarray[i64, ndim=2, mode="c"] addlo = np.ascontiguousarray(
        ((lo_dig[:, None, :] + lo_dig[None, :, :]) % p) @ p ** np.arange(h, dtype=np.int64))
    cdef cnp.ndarray[i64, ndim=2, mode="c"] addhi = np.ascontiguousarray(
        ((hi_dig[:, None, :] + hi_dig[None, :, :]) % p) @ p ** np.arange(D - h, dtype=np.int64))
    cdef cnp.ndarray[i64, ndim=1, mode="c"] la_lo = np.zeros(nlo, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1, mode="c"] la_hi = np.zeros(nhi, dtype=np.int64)
    # ok[s + 4p] is 1 when s is divisible by p; s ranges over (-4p, p)
    cdef cnp.ndarray[i64, ndim=1, mode="c"] bad_tab = np.array(
        [1 if (s - 4 * p) % p else 0 for s in range(5 * p)], dtype=np.int64)
    cdef i64 a, i, bl, bh, alo, ahi, qa, base, bbase, t, acc, bad = 0
    with nogil:
        for a in range(M):
            alo = a % nlo
            ahi = a // nlo
            for bl in range(nlo):
                acc = 0
                for i in range(D):
                    acc += dig[a, i] * gb[bl, i]
                la_lo[bl] = acc % p
            for bh in range(nhi):
                acc = 0
                for i in range(D):
                    acc += dig[a, i] * gb[bh * nlo, i]
                la_hi[bh] = acc % p
            qa = Q[a]
            for bh in range(nhi):
                base = addhi[ahi, bh] * nlo
                bbase = bh * nlo
                t = qa + la_hi[bh] - 4 * p
                for bl in range(nlo):
                    bad += bad_tab[Q[base + addlo[alo, bl]] - Q[bbase + bl] - t - la_lo[bl]]
    return bad
