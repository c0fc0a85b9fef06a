"""Pure Python / numpy versions of the finite-field hot kernels.

Every function here has a twin with the same signature in ``_gfcore.pyx``.
Polynomials over F_p are little-endian coefficient sequences; a modulus is
monic of degree N and given with all N + 1 coefficients.
"""

import numpy as np

BACKEND = "python"


def mulmod(a, b, mod, p):
    """Product of two length-N residues modulo ``mod`` over F_p, as a tuple."""
    n = len(mod) - 1
    prod = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k] % p
        if c:
            base = k - n
            for i in range(n):
                if mod[i]:
                    prod[base + i] -= c * mod[i]
    return tuple(x % p for x in prod[:n])


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def invmod(a, mod, p):
    """Inverse of a nonzero residue by the extended Euclidean algorithm."""
    n = len(mod) - 1
    r0, r1 = _trim(list(mod)), _trim([x % p for x in a])
    if not r1:
        raise ZeroDivisionError("inverse of zero field element")
    s0, s1 = [], [1]
    while len(r1) > 1:
        inv = pow(r1[-1], p - 2, p)
        q = [0] * (len(r0) - len(r1) + 1)
        r = r0[:]
        while len(r) >= len(r1):
            c = r[-1] * inv % p
            sh = len(r) - len(r1)
            q[sh] = c
            for i, v in enumerate(r1):
                r[sh + i] = (r[sh + i] - c * v) % p
            _trim(r)
        # s2 = s0 - q*s1
        prod = [0] * (len(q) + len(s1))
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    prod[i + j] += qi * sj
        s2 = [0] * max(len(s0), len(prod))
        for i, v in enumerate(s0):
            s2[i] += v
        for i, v in enumerate(prod):
            s2[i] -= v
        s2 = _trim([x % p for x in s2])
        r0, r1, s0, s1 = r1, r, s1, s2
        if not r1:
            raise ZeroDivisionError("element is not invertible modulo the given modulus")
    c = pow(r1[0], p - 2, p)
    out = [x * c % p for x in s1] + [0] * n
    return tuple(out[:n])


def _reduction_matrix(mod, p):
    n = len(mod) - 1
    red = np.zeros((2 * n - 1, n), dtype=np.int64)
    cur = [0] * n
    cur[0] = 1
    for k in range(2 * n - 1):
        red[k] = cur
        # cur <- x * cur mod (mod)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(c - top * m) % p for c, m in zip(cur, mod[:n])]
    return red


def batch_mulmod(X, Y, mod, p):
    """Row-wise products of two (M, N) int64 arrays of residues."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    M, n = X.shape
    if n == 1:
        return (X * Y) % p
    L = 2 * n - 1
    if n * (p - 1) ** 2 < 2 ** 40:
        size = 1 << (L - 1).bit_length()
        fx = np.fft.rfft(X.astype(np.float64), size, axis=1)
        fy = np.fft.rfft(Y.astype(np.float64), size, axis=1)
        Z = np.rint(np.fft.irfft(fx * fy, size, axis=1)[:, :L]).astype(np.int64) % p
    else:
        Z = np.zeros((M, L), dtype=np.int64)
        for i in range(n):
            Z[:, i:i + n] = (Z[:, i:i + n] + X[:, i:i + 1] * Y) % p
    red = _reduction_matrix([int(m) for m in mod], p)
    return matmul_mod(Z, red, p)


def matmul_mod(A, B, p):
    """(A @ B) mod p for int64 arrays, exact."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    k = A.shape[-1]
    if k * (p - 1) ** 2 < 2 ** 52:
        return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    for i in range(k):
        out = (out + np.multiply.outer(A[..., i], B[i]) % p) % p
    return out


def rref_mod(M, p):
    """Reduced row echelon form over F_p; returns (R, pivot_columns)."""
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = R[r] * pow(int(R[r, c]), p - 2, p) % p
        col = R[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            R[mask] = (R[mask] - np.outer(col[mask], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def polar_defects(qnum, p, D, gram):
    """Count pairs (a, b) of F_p^D with q(a+b) - q(a) - q(b) != gram(a, b).

    ``qnum`` is indexed by the base-p code of a coordinate vector (first
    coordinate least significant) and holds values in F_p.
    """
    qnum = np.asarray(qnum, dtype=np.int64)
    gram = np.asarray(gram, dtype=np.int64) % p
    M = p ** D
    codes = np.arange(M, dtype=np.int64)
    strides = p ** np.arange(D, dtype=np.int64)
    digits = (codes[:, None] // strides) % p
    gb = matmul_mod(digits, gram.T, p)  # gb[b, i] = (gram @ b)_i
    bad = 0
    chunk = max(1, 2_000_000 // max(M, 1))
    for start in range(0, M, chunk):
        da = digits[start:start + chunk]
        summed = ((da[:, None, :] + digits[None, :, :]) % p) @ strides
        bil = matmul_mod(da, gb.T, p)
        lhs = (qnum[summed] - qnum[start:start + chunk, None] - qnum[None, :] - bil) % p
        bad += int(np.count_nonzero(lhs))
    return bad
