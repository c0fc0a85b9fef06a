"""Finite fields F_{p^N}: arithmetic, Frobenius, subfield embeddings, F_p-linear algebra.

Finite fields stand in for the algebraically closed ground field: every
computation that needs "enough points" grows the working field instead.
Contexts are deterministic and cached, so ``make_field(p, N)`` always returns
the same object for the same arguments.
"""

from __future__ import annotations

import itertools
import random
import threading
from functools import lru_cache
from math import gcd

import numpy as np

from . import _core

DEFAULT_DEGREE_CAP = 64


class FieldError(ValueError):
    pass


class FieldMismatchError(FieldError):
    """Arithmetic between elements of different fields."""


class DegreeCapError(FieldError):
    """A requested extension degree exceeds the configured cap."""


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# dense polynomials over F_p (little-endian lists), used for modulus search


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim(list(b))
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        sh = len(a) - len(b)
        for i, v in enumerate(b):
            a[sh + i] = (a[sh + i] - c * v) % p
        _trim(a)
    return a


def _pgcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(mod, p):
    """Ben-Or test: gcd(x^(p^i) - x, f) = 1 for 1 <= i <= N/2."""
    n = len(mod) - 1
    if n == 1:
        return True
    if mod[0] == 0:
        return False
    # matrix of the p-power map on F_p[x]/(mod)
    x = [0] * n
    x[1] = 1
    xp = _powmod_raw(tuple(x), p, mod, p)
    cols = [tuple([1] + [0] * (n - 1))]
    for _ in range(1, n):
        cols.append(_core.mulmod(cols[-1], xp, mod, p))
    Q = np.array(cols, dtype=np.int64).T
    h = np.array(xp, dtype=np.int64)
    for i in range(1, n // 2 + 1):
        if i > 1:
            h = _core.matmul_mod(Q, h[:, None], p)[:, 0]
        diff = [int(v) for v in h]
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(list(mod), diff, p)) > 1:
            return False
    return True


def _powmod_raw(a, e, mod, p):
    n = len(mod) - 1
    result = tuple([1] + [0] * (n - 1))
    base = a
    while e:
        if e & 1:
            result = _core.mulmod(result, base, mod, p)
        e >>= 1
        if e:
            base = _core.mulmod(base, base, mod, p)
    return result


def _smallest_irreducible(p, N):
    # candidates [c0, ..., c_{N-1}] in lexicographic order, c0 most significant
    if N == 1:
        return (0, 1)
    for tail in itertools.product(range(1, p), *([range(p)] * (N - 1))):
        mod = tuple(tail) + (1,)
        if _is_irreducible(mod, p):
            return mod
    raise FieldError(f"no irreducible polynomial of degree {N} over F_{p}")  # unreachable


# ---------------------------------------------------------------------------


class FieldCtx:
    """The field F_{p^N} = F_p[g]/(modulus)."""

    def __init__(self, p, N, modulus):
        self.p = p
        self.N = N
        self.modulus = tuple(modulus)
        self._lock = threading.Lock()
        self._frob_pows = {}
        self._mul_mats = {}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, N={self.N})"

    @property
    def key(self):
        return (self.p, self.N)

    @property
    def order(self):
        return self.p ** self.N

    # element construction -------------------------------------------------

    def __call__(self, value):
        if isinstance(value, FieldElem):
            if value.ctx is not self:
                raise FieldMismatchError(f"{value!r} does not belong to {self!r}")
            return value
        if isinstance(value, int):
            return FieldElem(self, (value % self.p,) + (0,) * (self.N - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.N:
            raise FieldError(f"too many coefficients for {self!r}")
        return FieldElem(self, tuple(coeffs) + (0,) * (self.N - len(coeffs)))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def gen(self):
        if self.N == 1:
            # modulus x: the generator is the root 0
            return self(0)
        return self([0, 1])

    def from_code(self, code):
        digits = []
        for _ in range(self.N):
            code, d = divmod(code, self.p)
            digits.append(d)
        return FieldElem(self, tuple(digits))

    def elements(self):
        for code in range(self.order):
            yield self.from_code(code)

    def random(self, rng):
        return FieldElem(self, tuple(rng.randrange(self.p) for _ in range(self.N)))

    # linear-map caches ------------------------------------------------------

    def frob_matrix(self, k=1):
        """Matrix of x -> x^(p^k) on coefficient vectors (columns = images of g^i)."""
        k %= self.N
        with self._lock:
            M = self._frob_pows.get(k)
        if M is not None:
            return M
        if k == 0:
            M = np.eye(self.N, dtype=np.int64)
        elif k == 1:
            x = [0] * self.N
            if self.N > 1:
                x[1] = 1
            xp = _powmod_raw(tuple(x), self.p, self.modulus, self.p) if self.N > 1 else (0,)
            cols = [tuple([1] + [0] * (self.N - 1))]
            for _ in range(1, self.N):
                cols.append(_core.mulmod(cols[-1], xp, self.modulus, self.p))
            M = np.array(cols, dtype=np.int64).T.copy()
        else:
            M = _matpow(self.frob_matrix(1), k, self.p)
        with self._lock:
            self._frob_pows[k] = M
        return M

    def mul_matrix(self, c):
        """Matrix of y -> c*y."""
        key = c.coeffs
        with self._lock:
            M = self._mul_mats.get(key)
        if M is not None:
            return M
        cols = []
        for i in range(self.N):
            e = [0] * self.N
            e[i] = 1
            cols.append(_core.mulmod(c.coeffs, tuple(e), self.modulus, self.p))
        M = np.array(cols, dtype=np.int64).T.copy()
        with self._lock:
            if len(self._mul_mats) < 4096:
                self._mul_mats[key] = M
        return M

    def frobenius_power(self, x, k):
        """x^(p^k) for any integer k (negative k means iterated p-th roots)."""
        self._check(x)
        k %= self.N
        if k == 0 or self.N == 1:
            return x
        v = self.frob_matrix(k) @ np.array(x.coeffs, dtype=np.int64) % self.p
        return FieldElem(self, tuple(int(t) for t in v))

    def batch_frobenius(self, X, k):
        """Apply x -> x^(p^k) to every row of an (M, N) coefficient array."""
        k %= self.N
        if k == 0 or self.N == 1:
            return np.asarray(X, dtype=np.int64) % self.p
        return _core.matmul_mod(X, self.frob_matrix(k).T, self.p)

    def batch_mul(self, X, Y):
        return _core.batch_mulmod(X, Y, self.modulus, self.p)

    def _check(self, x):
        if x.ctx is not self:
            raise FieldMismatchError(f"{x!r} does not belong to {self!r}")

    def to_json(self):
        return {"p": self.p, "N": self.N, "modulus": list(self.modulus)}


def _matpow(M, e, p):
    n = M.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = M.copy()
    while e:
        if e & 1:
            result = _core.matmul_mod(result, base, p)
        e >>= 1
        if e:
            base = _core.matmul_mod(base, base, p)
    return result


class FieldElem:
    """An element of a FieldCtx, stored as little-endian base-p digits."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def _other(self, other):
        if isinstance(other, int):
            return self.ctx(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.ctx is not self.ctx:
            raise FieldMismatchError(f"cannot combine elements of {self.ctx!r} and {other.ctx!r}")
        return other

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FieldElem(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FieldElem(self.ctx, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.ctx.p
        return FieldElem(self.ctx, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.ctx.p
            return FieldElem(self.ctx, tuple(a * other % p for a in self.coeffs))
        other = self._other(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        if ctx.N == 1:
            return FieldElem(ctx, (self.coeffs[0] * other.coeffs[0] % ctx.p,))
        return FieldElem(ctx, _core.mulmod(self.coeffs, other.coeffs, ctx.modulus, ctx.p))

    __rmul__ = __mul__

    def inverse(self):
        ctx = self.ctx
        if not any(self.coeffs):
            raise ZeroDivisionError("inverse of zero field element")
        if ctx.N == 1:
            return FieldElem(ctx, (pow(self.coeffs[0], ctx.p - 2, ctx.p),))
        return FieldElem(ctx, _core.invmod(self.coeffs, ctx.modulus, ctx.p))

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        ctx = self.ctx
        result = ctx.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ctx(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.N, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __lt__(self, other):
        return self.coeffs < other.coeffs

    def __repr__(self):
        return f"F{self.ctx.p}^{self.ctx.N}{list(self.coeffs)}"

    @property
    def code(self):
        c = 0
        for d in reversed(self.coeffs):
            c = c * self.ctx.p + d
        return c

    def in_prime_field(self):
        return not any(self.coeffs[1:])

    def to_json(self):
        return list(self.coeffs)


# ---------------------------------------------------------------------------
# public operations


@lru_cache(maxsize=None)
def _field(p, N):
    return FieldCtx(p, N, _smallest_irreducible(p, N))


def make_field(p, N, cap=DEFAULT_DEGREE_CAP):
    """Return the deterministic context for F_{p^N}.

    The modulus is the lexicographically smallest monic irreducible
    polynomial, comparing coefficient lists little-endian.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"characteristic must be prime, got {p}")
    if not isinstance(N, int) or N < 1:
        raise FieldError(f"extension degree must be a positive integer, got {N}")
    if N > cap:
        raise DegreeCapError(f"extension degree {N} exceeds cap {cap}")
    return _field(p, N)


def field_from_json(obj, cap=None):
    ctx = make_field(int(obj["p"]), int(obj["N"]), cap=cap or max(DEFAULT_DEGREE_CAP, int(obj["N"])))
    if "modulus" in obj and tuple(obj["modulus"]) != ctx.modulus:
        raise FieldError("modulus does not match the deterministic choice for this field")
    return ctx


def frobenius(x):
    return x.ctx.frobenius_power(x, 1)


def inv_frobenius(x):
    # x^(p^(N-1)); the cached matrix is the (N-1)-th power of the Frobenius matrix
    return x.ctx.frobenius_power(x, x.ctx.N - 1)


# embeddings -----------------------------------------------------------------


def _ppoly_mul(a, b, ctx):
    if not a or not b:
        return []
    out = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return out


def _ppoly_trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _ppoly_mod(a, b):
    a = _ppoly_trim(list(a))
    inv = b[-1].inverse()
    while len(a) >= len(b):
        c = a[-1] * inv
        sh = len(a) - len(b)
        for i, v in enumerate(b):
            a[sh + i] = a[sh + i] - c * v
        _ppoly_trim(a)
    return a


def _ppoly_gcd(a, b):
    a, b = _ppoly_trim(list(a)), _ppoly_trim(list(b))
    while b:
        a, b = b, _ppoly_mod(a, b)
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


def _ppoly_powmod(a, e, m, ctx):
    result = [ctx.one]
    base = _ppoly_mod(a, m)
    while e:
        if e & 1:
            result = _ppoly_mod(_ppoly_mul(result, base, ctx), m)
        e >>= 1
        if e:
            base = _ppoly_mod(_ppoly_mul(base, base, ctx), m)
    return result


def _one_root(poly, ctx):
    """A root of a monic poly over ctx that splits into distinct linear factors."""
    p = ctx.p
    code = 0
    while len(poly) > 2:
        code += 1
        delta = ctx.from_code(code)
        if p == 2:
            # trace map Tr(delta*x) mod poly
            t = [ctx.zero, delta]
            acc = list(t)
            cur = t
            for _ in range(ctx.N - 1):
                cur = _ppoly_mod(_ppoly_mul(cur, cur, ctx), poly)
                n = max(len(acc), len(cur))
                acc = [(acc[i] if i < len(acc) else ctx.zero) + (cur[i] if i < len(cur) else ctx.zero)
                       for i in range(n)]
            h = _ppoly_trim(acc)
        else:
            h = _ppoly_powmod([delta, ctx.one], (ctx.order - 1) // 2, poly, ctx)
            if not h:
                continue
            h = list(h)
            h[0] = h[0] - ctx.one
            h = _ppoly_trim(h)
        d = _ppoly_gcd(poly, h)
        if 1 < len(d) < len(poly):
            poly = d if len(d) <= len(poly) - len(d) + 1 else _ppoly_div_exact(poly, d, ctx)
    return -(poly[0] / poly[1])


def _ppoly_div_exact(a, b, ctx):
    a = list(a)
    q = [ctx.zero] * (len(a) - len(b) + 1)
    inv = b[-1].inverse()
    while len(a) >= len(b):
        c = a[-1] * inv
        sh = len(a) - len(b)
        q[sh] = c
        for i, v in enumerate(b):
            a[sh + i] = a[sh + i] - c * v
        _ppoly_trim(a)
    return q


_embed_lock = threading.Lock()
_embed_cache = {}


def _embedding_image(src, dst):
    key = (src.key, dst.key)
    with _embed_lock:
        img = _embed_cache.get(key)
    if img is not None:
        return img
    poly = [dst(c) for c in src.modulus]
    root = _one_root(poly, dst)
    roots = {root}
    cur = root
    for _ in range(src.N - 1):
        cur = frobenius(cur)
        roots.add(cur)
    img = min(roots, key=lambda e: e.coeffs)
    with _embed_lock:
        _embed_cache[key] = img
    return img


def embed(src, dst, x):
    """Ring embedding F_{p^n} -> F_{p^N} for n | N (deterministic choice of image of g)."""
    if src.p != dst.p:
        raise FieldError("embedding between different characteristics")
    if dst.N % src.N:
        raise FieldError(f"cannot embed F_p^{src.N} into F_p^{dst.N}")
    src._check(x)
    if src is dst:
        return x
    if src.N == 1:
        return dst(x.coeffs[0])
    gamma = _embedding_image(src, dst)
    out = dst.zero
    for c in reversed(x.coeffs):
        out = out * gamma + c
    return out


# F_p-linear algebra -----------------------------------------------------------


def nullspace_mod(M, p):
    """Basis (rows) of the right null space of M over F_p, from the RREF."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    R, pivots = _core.rref_mod(M, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-R[r, f]) % p
        basis.append(v)
    return basis


def rank_mod(M, p):
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(_core.rref_mod(M, p)[1])


def fp_kernel(op, ctx, checks=16, seed=0):
    """F_p-basis of the kernel of an F_p-linear map op: ctx -> ctx.

    Linearity is spot-checked on ``checks`` random pairs before the
    N x N matrix of ``op`` is reduced.
    """
    rng = random.Random(seed)
    for _ in range(checks):
        x, y = ctx.random(rng), ctx.random(rng)
        c = rng.randrange(ctx.p)
        if op(x + y) != op(x) + op(y) or op(x * c) != op(x) * c:
            raise FieldError("operator failed the F_p-linearity check")
    cols = []
    for i in range(ctx.N):
        e = [0] * ctx.N
        e[i] = 1
        cols.append(op(FieldElem(ctx, tuple(e))).coeffs)
    M = np.array(cols, dtype=np.int64).T
    return [FieldElem(ctx, tuple(int(t) for t in v)) for v in nullspace_mod(M, ctx.p)]


def trace_to_prime(x):
    """Absolute trace F_{p^N} -> F_p, returned as an int in [0, p)."""
    acc = x.ctx.zero
    cur = x
    for _ in range(x.ctx.N):
        acc = acc + cur
        cur = frobenius(cur)
    if not acc.in_prime_field():
        raise FieldError("trace did not land in the prime field")  # internal
    return acc.coeffs[0]


def norm_to_prime_from(sub_degree, x):
    """Norm from F_{p^N} down to its subfield F_{p^sub_degree}, as an element of x's field."""
    N = x.ctx.N
    if sub_degree < 1 or N % sub_degree:
        raise FieldError(f"{sub_degree} does not divide {N}")
    acc = x.ctx.one
    cur = x
    for _ in range(N // sub_degree):
        acc = acc * cur
        cur = x.ctx.frobenius_power(cur, sub_degree)
    return acc


def norm_to_prime(x):
    n = norm_to_prime_from(1, x)
    return n.coeffs[0]


def common_field(a, b, cap=None):
    """Smallest field containing both contexts (degree lcm)."""
    if a.p != b.p:
        raise FieldError("different characteristics")
    n = a.N * b.N // gcd(a.N, b.N)
    return make_field(a.p, n, cap=cap or max(DEFAULT_DEGREE_CAP, n))


def elem_from_json(ctx, digits):
    return ctx(digits)
