"""Finite abelian p-groups with Q_p/Z_p-valued quadratic forms.

Elements are integer codes in mixed radix over ``shape`` (first coordinate
least significant). The form is a full table ``qnum`` of numerators over
``p**K``; B(a, b) = q(a + b) - q(a) - q(b).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _core
from .gf import is_prime, make_field, norm_to_prime

DEFAULT_TABLE_CAP = 10 ** 6
DEFAULT_ENUM_CAP = 4096
DEFAULT_ISO_CAP = 1024


class MetricError(ValueError):
    pass


class CapError(MetricError):
    """A size budget was exceeded."""


class NotIsotropicError(MetricError):
    pass


# values ---------------------------------------------------------------------------


class QpZp(NamedTuple):
    """num / p^k mod 1, normalized."""

    num: int
    k: int

    @classmethod
    def make(cls, num, k, p):
        if k < 0:
            raise ValueError("negative denominator exponent")
        num %= p ** k
        while k > 0 and num % p == 0:
            num //= p
            k -= 1
        if num == 0:
            k = 0
        return cls(num, k)

    def fraction(self, p):
        return Fraction(self.num, p ** self.k)

    def __str__(self):
        return "0" if self.num == 0 else f"{self.num}/p^{self.k}"


def _phi(n, p):
    return n - n // p if n > 1 else 1


class CycInt:
    """Element of Z[zeta_{p^k}] in the power basis of length phi(p^k), lowest conductor."""

    __slots__ = ("p", "k", "coeffs")

    def __init__(self, p, k, coeffs):
        self.p = p
        vec = [int(c) for c in coeffs]
        n = p ** k
        if len(vec) < n:
            vec += [0] * (n - len(vec))
        elif len(vec) > n:
            full = [0] * n
            for i, c in enumerate(vec):
                full[i % n] += c
            vec = full
        self.k, self.coeffs = _canonical(p, k, vec)

    @classmethod
    def from_int(cls, p, n):
        return cls(p, 0, [n])

    @classmethod
    def from_exponent_counts(cls, p, k, counts):
        """sum counts[j] * zeta_{p^k}^j."""
        return cls(p, k, list(counts))

    @property
    def conductor(self):
        return self.p ** self.k

    def _lift(self, k):
        n = self.p ** k
        step = self.p ** (k - self.k)
        vec = [0] * n
        for i, c in enumerate(self.coeffs):
            vec[i * step] = c
        return vec

    def _check(self, other):
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        if not isinstance(other, CycInt) or other.p != self.p:
            raise TypeError("cyclotomic integers over different primes")
        return other

    def __add__(self, other):
        other = self._check(other)
        k = max(self.k, other.k)
        return CycInt(self.p, k, [a + b for a, b in zip(self._lift(k), other._lift(k))])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, self.k, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        k = max(self.k, other.k)
        n = self.p ** k
        a, b = self._lift(k), other._lift(k)
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % n] += x * y
        return CycInt(self.p, k, out)

    __rmul__ = __mul__

    def conj(self):
        n = self.p ** self.k
        vec = [0] * n
        for i, c in enumerate(self.coeffs):
            vec[(-i) % n] += c
        return CycInt(self.p, self.k, vec)

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return (self.p, self.k, self.coeffs) == (other.p, other.k, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.k, self.coeffs))

    def is_integer(self):
        return self.k == 0

    def __int__(self):
        if self.k:
            raise ValueError("not a rational integer")
        return self.coeffs[0]

    def __repr__(self):
        if self.k == 0:
            return f"CycInt({self.coeffs[0]})"
        return f"CycInt(conductor={self.conductor}, coeffs={list(self.coeffs)})"

    def to_json(self):
        return {"conductor": self.conductor, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj):
        n = int(obj["conductor"])
        p, k = _prime_power(n)
        return cls(p, k, obj["coeffs"])


def _prime_power(n):
    if n == 1:
        return 2, 0
    for p in range(2, n + 1):
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            if n != 1:
                raise ValueError("conductor is not a prime power")
            return p, k
    raise ValueError("bad conductor")


def _canonical(p, k, vec):
    """Reduce a length-p^k exponent vector modulo Phi_{p^k}; drop to the lowest conductor."""
    vec = list(vec)
    if k == 0:
        return 0, (sum(vec),)
    n = p ** k
    step = p ** (k - 1)
    ph = n - step
    # zeta^(ph) = -sum_{i<p-1} zeta^(i*step); top-down keeps every target index below j
    for j in range(n - 1, ph - 1, -1):
        c = vec[j]
        if c:
            vec[j] = 0
            base = j - ph
            for i in range(p - 1):
                vec[base + i * step] -= c
    vec = vec[:ph]
    while k >= 1:
        if k == 1:
            if any(vec[1:]):
                break
            return 0, (vec[0],)
        if any(c for i, c in enumerate(vec) if i % p):
            break
        vec = vec[::p]
        k -= 1
    return k, tuple(vec)


# groups -------------------------------------------------------------------------


def _vp(n, p):
    e = 0
    while n % p == 0 and n > 1:
        n //= p
        e += 1
    return e


class MetricGroup:
    """Finite abelian p-group with a quadratic form table; immutable."""

    def __init__(self, p, shape, qnum, K, cap=DEFAULT_TABLE_CAP):
        if not is_prime(p):
            raise MetricError(f"{p} is not prime")
        shape = tuple(int(o) for o in shape)
        for o in shape:
            if o < p or p ** _vp(o, p) != o:
                raise MetricError(f"cyclic order {o} is not a positive power of {p}")
        size = 1
        for o in shape:
            size *= o
        if size > cap:
            raise CapError(f"group of order {size} exceeds the table cap {cap}")
        qnum = np.asarray(qnum, dtype=np.int64).reshape(-1) % (p ** K)
        if qnum.shape[0] != size:
            raise MetricError("q table does not match the group order")
        while K > 0 and not np.any(qnum % p):
            qnum = qnum // p
            K -= 1
        self.p = p
        self.shape = shape
        self.size = size
        self.K = K
        self.qnum = qnum
        self.qnum.setflags(write=False)
        strides = []
        s = 1
        for o in shape:
            strides.append(s)
            s *= o
        self.strides = np.array(strides, dtype=np.int64)
        self._coords = None
        self._orders = None

    # construction ---------------------------------------------------------------

    @classmethod
    def from_function(cls, p, shape, fn, K, cap=DEFAULT_TABLE_CAP):
        """fn(coords) -> numerator over p^K."""
        size = int(np.prod(shape)) if shape else 1
        if size > cap:
            raise CapError(f"group of order {size} exceeds the table cap {cap}")
        tmp = cls(p, shape, np.zeros(size, dtype=np.int64), 0, cap)
        q = [fn(tuple(int(c) for c in row)) for row in tmp.coords]
        return cls(p, shape, q, K, cap)

    @classmethod
    def trivial(cls, p):
        return cls(p, (), [0], 0)

    # element arithmetic -----------------------------------------------------------

    @property
    def coords(self):
        if self._coords is None:
            codes = np.arange(self.size, dtype=np.int64)
            if self.shape:
                self._coords = np.stack(
                    [(codes // s) % o for s, o in zip(self.strides, self.shape)], axis=1)
            else:
                self._coords = np.zeros((1, 0), dtype=np.int64)
            self._coords.setflags(write=False)
        return self._coords

    def encode(self, coords):
        coords = np.asarray(coords, dtype=np.int64)
        if not self.shape:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        return (coords % np.array(self.shape)) @ self.strides

    def add(self, a, b):
        return self.encode(self.coords[a] + self.coords[b])

    def neg(self, a):
        return self.encode(-self.coords[a])

    def mul(self, n, a):
        return self.encode(np.asarray(n, dtype=np.int64)[..., None] * self.coords[a])

    @property
    def orders(self):
        if self._orders is None:
            out = np.ones(self.size, dtype=np.int64)
            for i, o in enumerate(self.shape):
                c = self.coords[:, i]
                g = np.gcd(c, o)
                out = np.maximum(out, o // g)  # orders are p-powers, so max is the lcm
            self._orders = out
        return self._orders

    def generators(self):
        """Codes of the standard basis elements."""
        return [int(s) for s in self.strides]

    def q(self, a):
        return QpZp.make(int(self.qnum[a]), self.K, self.p)

    def bnum(self, a, b):
        """B(a, b) as numerators over p^K (vectorized)."""
        mod = self.p ** self.K
        return (self.qnum[self.add(a, b)] - self.qnum[a] - self.qnum[b]) % mod

    def B(self, a, b):
        return QpZp.make(int(self.bnum(a, b)), self.K, self.p)

    def histogram(self):
        c = Counter(int(v) for v in self.qnum)
        return {QpZp.make(v, self.K, self.p): n for v, n in sorted(c.items())}

    def negate(self):
        return MetricGroup(self.p, self.shape, -self.qnum, self.K)

    def invariants(self):
        return tuple(sorted(self.shape))

    def __repr__(self):
        return f"MetricGroup(p={self.p}, shape={list(self.shape)}, K={self.K})"

    def __eq__(self, other):
        if not isinstance(other, MetricGroup):
            return NotImplemented
        return (self.p, self.shape, self.K) == (other.p, other.shape, other.K) and \
            np.array_equal(self.qnum, other.qnum)

    def __hash__(self):
        return hash((self.p, self.shape, self.K, self.qnum.tobytes()))

    # JSON -----------------------------------------------------------------------

    def to_json(self):
        out = []
        for code in range(self.size):
            v = self.q(code)
            out.append([[int(c) for c in self.coords[code]], v.num, v.k])
        return {"p": self.p, "shape": list(self.shape), "q": out}

    @classmethod
    def from_json(cls, obj, cap=DEFAULT_TABLE_CAP):
        p = int(obj["p"])
        shape = tuple(int(o) for o in obj["shape"])
        entries = obj["q"]
        K = max([int(e[2]) for e in entries] + [0])
        tmp = cls(p, shape, np.zeros(int(np.prod(shape)) if shape else 1, dtype=np.int64), 0, cap)
        q = np.full(tmp.size, -1, dtype=np.int64)
        for coords, num, k in entries:
            code = int(tmp.encode(np.array(coords, dtype=np.int64)))
            if len(coords) != len(shape):
                raise MetricError("element tuple has the wrong length")
            q[code] = int(num) * p ** (K - int(k))
        if np.any(q < 0):
            raise MetricError("q table is incomplete")
        return cls(p, shape, q, K, cap)


def direct_sum(A, B, cap=DEFAULT_TABLE_CAP):
    if A.p != B.p:
        raise MetricError("direct sum of groups over different primes")
    if A.size * B.size > cap:
        raise CapError(f"direct sum of order {A.size * B.size} exceeds the table cap {cap}")
    K = max(A.K, B.K)
    qa = A.qnum * A.p ** (K - A.K)
    qb = B.qnum * B.p ** (K - B.K)
    q = (qb[:, None] + qa[None, :]).reshape(-1)
    return MetricGroup(A.p, A.shape + B.shape, q, K, cap)


def norm_form_group(p):
    """(F_{p^2}, i o Nm) with i(1) = 1/p."""
    F = make_field(p, 2)
    q = [norm_to_prime(F.from_code(c)) for c in range(p * p)]
    return MetricGroup(p, (p, p), q, 1)


def hyperbolic_plane(p):
    return MetricGroup.from_function(p, (p, p), lambda c: c[0] * c[1], 1)


def rank1_form(p, u):
    """(Z/p, u x^2 / p) for odd p; (Z/2, u x^2 / 4) with u odd for p = 2."""
    if p == 2:
        if u % 2 == 0:
            raise MetricError("u must be odd for p = 2")
        return MetricGroup.from_function(2, (2,), lambda c: u * c[0] * c[0], 2)
    if u % p == 0:
        raise MetricError("u must be a unit")
    return MetricGroup.from_function(p, (p,), lambda c: u * c[0] * c[0], 1)


def smallest_nonresidue(p):
    for v in range(2, p):
        if pow(v, (p - 1) // 2, p) == p - 1:
            return v
    raise MetricError(f"no quadratic non-residue mod {p}")


# validation -----------------------------------------------------------------------


@dataclass
class Validation:
    premetric: bool
    metric: bool
    diagnostics: list = field(default_factory=list)

    def __bool__(self):
        return self.metric


def _bilinear_from_gens(A):
    """Numerators of sum_ij a_i b_j B(e_i, e_j); used as the biadditivity target."""
    gens = A.generators()
    r = len(gens)
    G = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            G[i, j] = A.bnum(gens[i], gens[j])
    return G


def biadditivity_defects(A, chunk=256):
    """Count pairs (a, b) where B(a, b) differs from its bilinear expansion over the basis."""
    if A.size == 1:
        return 0
    G = _bilinear_from_gens(A)
    if A.K <= 1 and all(o == A.p for o in A.shape):
        return int(_core.polar_defects(A.qnum, A.p, len(A.shape), G))
    mod = A.p ** A.K
    C = A.coords
    bad = 0
    allc = np.arange(A.size)
    for start in range(0, A.size, chunk):
        a = np.arange(start, min(start + chunk, A.size))
        sums = A.encode(C[a][:, None, :] + C[None, :, :])
        lhs = (A.qnum[sums] - A.qnum[a][:, None] - A.qnum[allc][None, :]) % mod
        rhs = np.einsum("ai,ij,bj->ab", C[a], G, C) % mod
        bad += int(np.count_nonzero(lhs != rhs))
    return bad


def radical(A):
    """Codes a with B(a, e_i) = 0 for every basis element e_i."""
    allc = np.arange(A.size)
    mask = np.ones(A.size, dtype=bool)
    for g in A.generators():
        mask &= A.bnum(allc, np.full(A.size, g)) == 0
    return allc[mask]


def validate(A):
    diags = []
    allc = np.arange(A.size)
    if int(A.qnum[0]) != 0:
        diags.append("q(0) != 0")
    bad_neg = int(np.count_nonzero(A.qnum[A.neg(allc)] != A.qnum))
    if bad_neg:
        diags.append(f"q(-a) != q(a) for {bad_neg} elements")
    bad_bi = biadditivity_defects(A)
    if bad_bi:
        diags.append(f"B is not biadditive on {bad_bi} pairs")
    premetric = not diags
    rad = radical(A)
    if len(rad) > 1:
        diags.append(f"B is degenerate (radical of order {len(rad)})")
    return Validation(premetric, premetric and len(rad) == 1, diags)


# subgroups -----------------------------------------------------------------------


def span(A, gens, base=None):
    """Sorted codes of the subgroup generated by ``gens`` (and ``base``)."""
    H = np.array([0] if base is None else base, dtype=np.int64)
    for g in gens:
        g = int(g)
        if np.any(H == g):
            continue
        o = int(A.orders[g])
        mults = A.mul(np.arange(o), np.full(o, g))
        H = np.unique(A.add(np.repeat(H, o), np.tile(mults, len(H))))
    return np.unique(H)


def subgroup_generators(A, H):
    """A small generating set of the subgroup H (codes)."""
    H = np.asarray(H, dtype=np.int64)
    order = H[np.argsort(-A.orders[H], kind="stable")]
    gens = []
    cur = np.array([0], dtype=np.int64)
    for x in order:
        if len(cur) == len(H):
            break
        if not np.any(cur == x):
            gens.append(int(x))
            cur = span(A, [x], cur)
    return gens


def is_isotropic(A, H):
    return not np.any(A.qnum[np.asarray(H, dtype=np.int64)])


def _check_size(A, cap, what):
    if A.size > cap:
        raise CapError(f"{what}: group of order {A.size} exceeds the cap {cap}")


def isotropic_subgroups(A, max_count=None, cap=DEFAULT_ENUM_CAP):
    """All isotropic subgroups, as sorted code tuples ordered by (size, codes)."""
    _check_size(A, cap, "isotropic_subgroups")
    if max_count is None:
        max_count = cap
    zeros = np.flatnonzero(A.qnum == 0)
    zeros = zeros[zeros != 0]
    seen = {(0,)}
    frontier = [(0,)]
    while frontier:
        nxt = []
        for H in frontier:
            Harr = np.array(H, dtype=np.int64)
            hset = set(H)
            gens = subgroup_generators(A, Harr)
            for a in zeros:
                a = int(a)
                if a in hset:
                    continue
                if gens and np.any(A.bnum(np.full(len(gens), a), np.array(gens)) != 0):
                    continue
                new = tuple(int(x) for x in span(A, [a], Harr))
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
                    if len(seen) > max_count:
                        raise CapError(f"more than {max_count} isotropic subgroups")
        frontier = nxt
    return sorted(seen, key=lambda H: (len(H), H))


def _element_order(A, order):
    codes = np.arange(A.size)
    if order in (None, "asc"):
        return codes
    if order == "desc":
        return codes[::-1]
    if isinstance(order, int):
        rng = np.random.default_rng(order)
        return rng.permutation(codes)
    return np.asarray(order, dtype=np.int64)


def maximal_isotropic(A, order=None, cap=DEFAULT_TABLE_CAP):
    """Greedy maximal isotropic subgroup (sorted codes).

    One pass suffices: an element rejected for q(a) != 0 or B(a, H) != 0
    stays rejected as H grows.
    """
    _check_size(A, cap, "maximal_isotropic")
    H = np.array([0], dtype=np.int64)
    gens = []
    for a in _element_order(A, order):
        a = int(a)
        if A.qnum[a] != 0 or np.any(H == a):
            continue
        if gens and np.any(A.bnum(np.full(len(gens), a), np.array(gens)) != 0):
            continue
        gens.append(a)
        H = span(A, [a], H)
    return H


def orthogonal(A, H):
    gens = subgroup_generators(A, np.asarray(H, dtype=np.int64))
    allc = np.arange(A.size)
    mask = np.ones(A.size, dtype=bool)
    for g in gens:
        mask &= A.bnum(allc, np.full(A.size, g)) == 0
    return allc[mask]


def quotient_basis(A, P, H):
    """Elements x_1..x_r of P whose classes give P/H = (+) <x_i>, with their orders."""
    P = np.asarray(P, dtype=np.int64)
    H = np.asarray(H, dtype=np.int64)
    hset = set(int(h) for h in H)
    target = len(P) // len(H)
    # order of each element modulo H
    qord = np.ones(len(P), dtype=np.int64)
    cur = P.copy()
    inH = np.isin(cur, H)
    while not inH.all():
        qord[~inH] *= A.p
        cur = np.where(inH, cur, A.mul(A.p, cur))
        inH = np.isin(cur, H)
    idx = np.argsort(-qord, kind="stable")
    basis, orders = [], []
    U = np.array(sorted(hset), dtype=np.int64)
    prod = 1
    for i in idx:
        if prod == target:
            break
        x, o = int(P[i]), int(qord[i])
        if o == 1:
            break
        s = int(A.mul(o // A.p, np.array([x]))[0])
        if np.any(U == s):
            continue
        basis.append(x)
        orders.append(o)
        prod *= o
        U = span(A, [s], U)
    if prod != target:
        raise MetricError("failed to split the quotient (internal)")
    return basis, orders


def subquotient(A, H, cap=DEFAULT_TABLE_CAP):
    """H^perp / H with the induced form."""
    H = np.unique(np.asarray(H, dtype=np.int64))
    if not is_isotropic(A, H):
        raise NotIsotropicError("subgroup is not isotropic")
    if len(H) == 1:
        return A
    P = orthogonal(A, H)
    if not np.all(np.isin(H, P)):
        raise NotIsotropicError("subgroup is not contained in its orthogonal")
    basis, orders = quotient_basis(A, P, H)
    if not basis:
        return MetricGroup.trivial(A.p)
    tmp = MetricGroup(A.p, orders, np.zeros(int(np.prod(orders)), dtype=np.int64), 0, cap)
    reps = np.zeros(tmp.size, dtype=np.int64)
    for i, x in enumerate(basis):
        reps = A.add(reps, A.mul(tmp.coords[:, i], np.full(tmp.size, x)))
    return MetricGroup(A.p, orders, A.qnum[reps], A.K, cap)


def anisotropic_kernel(A, order=None, cap=DEFAULT_TABLE_CAP):
    """Quotient repeatedly by <a> for nonzero isotropic a until none is left."""
    _check_size(A, cap, "anisotropic_kernel")
    while True:
        cand = _element_order(A, order)
        cand = cand[(cand != 0) & (A.qnum[cand] == 0)]
        if len(cand) == 0:
            return A
        A = subquotient(A, span(A, [int(cand[0])]), cap)


def is_anisotropic(A):
    return not np.any(A.qnum[1:] == 0)


def is_metric_isomorphic(A, B, cap=DEFAULT_ISO_CAP):
    """Search for a group isomorphism A -> B carrying q_A to q_B."""
    if A.p != B.p:
        return False
    if A.size > cap or B.size > cap:
        raise CapError(f"isomorphism test beyond the cap {cap}")
    if A.size != B.size or A.invariants() != B.invariants():
        return False
    p = A.p
    K = max(A.K, B.K)
    qa = A.qnum * p ** (K - A.K)
    qb = B.qnum * p ** (K - B.K)
    if sorted(qa.tolist()) != sorted(qb.tolist()):
        return False
    if A.size == 1:
        return True
    mod = p ** K
    gens = A.generators()
    r = len(gens)
    gorders = [int(A.orders[g]) for g in gens]
    GA = np.array([[(qa[A.add(g, h)] - qa[g] - qa[h]) % mod for h in gens] for g in gens])
    cands = [np.flatnonzero((B.orders == gorders[i]) & (qb == qa[gens[i]])) for i in range(r)]
    allA = A.coords

    def full_check(images):
        img = np.zeros(A.size, dtype=np.int64)
        for i, y in enumerate(images):
            img = B.add(img, B.mul(allA[:, i], np.full(A.size, y)))
        return np.array_equal(qb[img], qa) and len(np.unique(img)) == A.size

    def search(i, images, socle):
        if i == r:
            return full_check(images)
        for y in cands[i]:
            y = int(y)
            ok = True
            for j, z in enumerate(images):
                if (qb[B.add(y, z)] - qb[y] - qb[z]) % mod != GA[i, j]:
                    ok = False
                    break
            if not ok:
                continue
            s = int(B.mul(gorders[i] // p, y))
            if np.any(socle == s):
                continue
            if search(i + 1, images + [y], span(B, [s], socle)):
                return True
        return False

    return search(0, [], np.array([0], dtype=np.int64))


def all_subgroups(A, cap=DEFAULT_ENUM_CAP):
    """Every subgroup (brute force), as sorted code tuples."""
    _check_size(A, cap, "all_subgroups")
    seen = {(0,)}
    frontier = [(0,)]
    while frontier:
        nxt = []
        for H in frontier:
            Harr = np.array(H, dtype=np.int64)
            covered = np.zeros(A.size, dtype=bool)
            covered[Harr] = True
            for a in range(A.size):
                if covered[a]:
                    continue
                # every element of a + H extends H to the same subgroup
                covered[A.add(np.full(len(Harr), a), Harr)] = True
                new = tuple(int(x) for x in span(A, [a], Harr))
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
                    if len(seen) > cap:
                        raise CapError(f"more than {cap} subgroups")
        frontier = nxt
    return sorted(seen, key=lambda H: (len(H), H))


# Witt classes -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WittClass:
    p: int
    label: str
    param: int = 0
    kernel: MetricGroup = None

    def __eq__(self, other):
        if not isinstance(other, WittClass):
            return NotImplemented
        if self.p != other.p or self.label != other.label:
            return False
        if self.label == "Other":
            return is_metric_isomorphic(self.kernel, other.kernel,
                                        cap=max(DEFAULT_ISO_CAP, self.kernel.size))
        return self.param == other.param

    def __hash__(self):
        if self.label == "Other":
            return hash((self.p, self.label, self.kernel.invariants(),
                         tuple(sorted(self.kernel.qnum.tolist()))))
        return hash((self.p, self.label, self.param))

    def __str__(self):
        if self.label == "Rank1":
            return "Rank1(1)" if self.param == 1 else f"Rank1({self.param})"
        if self.label == "Other":
            return f"Other{list(self.kernel.shape)}"
        return self.label

    def representative(self):
        if self.label == "Zero":
            return MetricGroup.trivial(self.p)
        if self.label == "NormForm":
            return norm_form_group(self.p)
        if self.label == "Rank1":
            return rank1_form(self.p, self.param)
        return self.kernel

    def to_json(self):
        out = {"label": str(self)}
        if self.label == "Other":
            out["kernel"] = self.kernel.to_json()
        return out


def _label(K):
    p = K.p
    if K.size == 1:
        return WittClass(p, "Zero")
    if p != 2 and K.shape == (p,) and K.K == 1:
        u = int(K.qnum[1])
        leg = 1 if pow(u, (p - 1) // 2, p) == 1 else smallest_nonresidue(p)
        return WittClass(p, "Rank1", leg)
    if K.invariants() == (p, p) and is_metric_isomorphic(K, norm_form_group(p)):
        return WittClass(p, "NormForm")
    return WittClass(p, "Other", 0, K)


def witt_class(A, cap=DEFAULT_TABLE_CAP):
    return _label(anisotropic_kernel(A, cap=cap))


def witt_add(c1, c2, cap=DEFAULT_TABLE_CAP):
    return witt_class(direct_sum(c1.representative(), c2.representative(), cap), cap)


def witt_neg(c):
    return witt_class(c.representative().negate())


def classify_exponent_p(A, cap=DEFAULT_TABLE_CAP):
    """'Hyperbolic' or 'NormFormClass' for groups of order p^(2n) with values in (1/p)Z/Z."""
    e = _vp(A.size, A.p) if A.size > 1 else 0
    if e % 2:
        raise MetricError("group order is an odd power of p")
    if A.K > 1:
        raise MetricError("q takes values outside (1/p)Z/Z")
    K = anisotropic_kernel(A, cap=cap)
    if K.size == 1:
        return "Hyperbolic"
    if K.invariants() == (A.p, A.p) and is_metric_isomorphic(K, norm_form_group(A.p)):
        return "NormFormClass"
    raise MetricError("anisotropic kernel is neither trivial nor the norm form")


def gauss_sum(A, cap=DEFAULT_TABLE_CAP):
    _check_size(A, cap, "gauss_sum")
    counts = np.bincount(A.qnum, minlength=A.p ** A.K)
    return CycInt.from_exponent_counts(A.p, A.K, counts.tolist())


def expected_gauss_sum(p, size, sign):
    e = _vp(size, p) if size > 1 else 0
    if e % 2:
        raise MetricError("order is not an even power of p")
    return CycInt.from_int(p, sign * p ** (e // 2))
