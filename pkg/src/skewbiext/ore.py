"""The twisted Laurent ring k{tau, tau^-1} with tau*a = a^p*tau, and matrices over it.

An element sum c_i tau^i acts on field points by x -> sum c_i x^(p^i); this is
how homomorphisms between the perfectized additive group and its dual are
represented throughout the package.
"""

from __future__ import annotations

import random

import numpy as np

from . import gf
from .gf import FieldElem, embed, make_field


class OreError(ValueError):
    pass


class ZeroKernelError(OreError):
    """The zero element has a connected (infinite) kernel."""


class SplittingCapError(OreError):
    """The kernel does not split within the allowed extension degree."""


class OrePoly:
    """sum c_i tau^i with coefficients in a finite field; immutable."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        clean = {}
        for e, c in (terms or {}).items():
            if isinstance(c, int):
                c = ctx(c)
            elif c.ctx is not ctx:
                raise gf.FieldMismatchError("coefficient outside the polynomial's field")
            if c:
                clean[int(e)] = c
        self.terms = dict(sorted(clean.items()))

    # constructors -----------------------------------------------------------

    @classmethod
    def monomial(cls, ctx, c, e):
        return cls(ctx, {e: c})

    @classmethod
    def tau(cls, ctx, e=1):
        return cls(ctx, {e: ctx.one})

    @classmethod
    def scalar(cls, ctx, c):
        return cls(ctx, {0: c})

    # basic queries ------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    @property
    def lo(self):
        if not self.terms:
            raise OreError("lo() of the zero element")
        return next(iter(self.terms))

    @property
    def hi(self):
        if not self.terms:
            raise OreError("hi() of the zero element")
        return next(reversed(self.terms))

    def coeff(self, e):
        return self.terms.get(e, self.ctx.zero)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            parts.append(f"{list(c.coeffs)}*t^{e}")
        return " + ".join(parts)

    def __eq__(self, other):
        if isinstance(other, int):
            other = OrePoly.scalar(self.ctx, self.ctx(other))
        if not isinstance(other, OrePoly):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx.key, tuple((e, c.coeffs) for e, c in self.terms.items())))

    def _same(self, other):
        if isinstance(other, int):
            return OrePoly.scalar(self.ctx, self.ctx(other))
        if isinstance(other, FieldElem):
            return OrePoly.scalar(self.ctx, other)
        if other.ctx is not self.ctx:
            raise gf.FieldMismatchError(f"Ore polynomials over {self.ctx!r} and {other.ctx!r}")
        return other

    # ring operations --------------------------------------------------------

    def __add__(self, other):
        other = self._same(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return OrePoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return OrePoly(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._same(other)
        ctx = self.ctx
        out = {}
        for i, c in self.terms.items():
            for j, d in other.terms.items():
                t = c * ctx.frobenius_power(d, i)
                out[i + j] = out[i + j] + t if (i + j) in out else t
        return OrePoly(ctx, out)

    def __rmul__(self, other):
        return self._same(other) * self

    def __pow__(self, n):
        out = OrePoly.scalar(self.ctx, self.ctx.one)
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self):
        ctx = self.ctx
        return OrePoly(ctx, {-i: ctx.frobenius_power(c, -i) for i, c in self.terms.items()})

    def lshift(self, k):
        """tau^k * self."""
        ctx = self.ctx
        return OrePoly(ctx, {i + k: ctx.frobenius_power(c, k) for i, c in self.terms.items()})

    def rshift(self, k):
        """self * tau^k."""
        return OrePoly(self.ctx, {i + k: c for i, c in self.terms.items()})

    def change_ring(self, dst):
        if dst is self.ctx:
            return self
        return OrePoly(dst, {e: embed(self.ctx, dst, c) for e, c in self.terms.items()})

    def to_json(self):
        return {
            "p": self.ctx.p,
            "m": self.ctx.N,
            "terms": [{"e": e, "c": list(c.coeffs)} for e, c in self.terms.items()],
        }


def ore_from_json(obj):
    ctx = make_field(int(obj["p"]), int(obj["m"]), cap=max(gf.DEFAULT_DEGREE_CAP, int(obj["m"])))
    terms = {}
    for t in obj["terms"]:
        e = int(t["e"])
        if e in terms:
            raise OreError(f"duplicate exponent {e}")
        terms[e] = ctx(t["c"])
    return OrePoly(ctx, terms)


def o_add(f, g):
    return f + g


def o_mul(f, g):
    return f * g


def adjoint(f):
    return f.adjoint()


def is_weakly_skew(f):
    return (f + f.adjoint()).is_zero()


def is_skew(f):
    """Membership in the subgroup generated by c tau^j - tau^-j c."""
    ctx = f.ctx
    if f.coeff(0):
        return False
    exps = set(f.terms) | {-e for e in f.terms}
    for j in exps:
        if j <= 0:
            continue
        if f.coeff(-j) != -ctx.frobenius_power(f.coeff(j), -j):
            return False
    return True


def skew_from_coeffs(ctx, coeffs):
    """sum_j (c_j tau^j - tau^-j c_j) for coeffs = {j: c_j}, j >= 1."""
    out = OrePoly(ctx)
    for j, c in coeffs.items():
        if j < 1:
            raise OreError("generator exponents must be positive")
        w = OrePoly.monomial(ctx, c, j)
        out = out + w - w.adjoint()
    return out


def random_elem(ctx, rng, nonzero=False):
    while True:
        x = ctx.random(rng)
        if x or not nonzero:
            return x


def random_skew(ctx, n, seed):
    """w - w* for w = sum_{1<=j<=n} c_j tau^j drawn with random.Random(seed) (MT19937).

    Coefficients are drawn digit by digit with ``randrange(p)``, j = 1..n in
    order; c_n is redrawn until nonzero.
    """
    if n < 1:
        raise OreError("random_skew needs n >= 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    w = OrePoly(ctx)
    for j in range(1, n + 1):
        c = random_elem(ctx, rng, nonzero=(j == n))
        w = w + OrePoly.monomial(ctx, c, j)
    return w - w.adjoint()


def random_ore(ctx, lo, hi, rng, monic_ends=True):
    """Random element with exponents in [lo, hi] and nonzero extreme coefficients."""
    terms = {}
    for e in range(lo, hi + 1):
        nonzero = monic_ends and e in (lo, hi)
        terms[e] = random_elem(ctx, rng, nonzero=nonzero)
    return OrePoly(ctx, terms)


def act(f, x):
    """Evaluate the additive map sum c_i x^(p^i) at a field point x."""
    K = x.ctx
    if K.p != f.ctx.p or K.N % f.ctx.N:
        raise gf.FieldError(f"coefficient field F_p^{f.ctx.N} does not embed in F_p^{K.N}")
    out = K.zero
    for i, c in f.terms.items():
        out = out + embed(f.ctx, K, c) * K.frobenius_power(x, i)
    return out


def act_matrix(f, K):
    """N x N matrix over F_p of x -> act(f, x) on the coefficient basis of K."""
    M = np.zeros((K.N, K.N), dtype=np.int64)
    for i, c in f.terms.items():
        cK = embed(f.ctx, K, c)
        M = (M + gf._core.matmul_mod(K.mul_matrix(cK), K.frob_matrix(i), K.p)) % K.p
    return M


# Euclidean division ------------------------------------------------------------


def _divide_poly(a, b):
    """Right division in k{tau}: a = q*b + r with deg r < deg b (a, b with lo >= 0)."""
    ctx = a.ctx
    d = b.hi
    lc = b.coeff(d)
    q = {}
    r = a
    while not r.is_zero() and r.hi >= d:
        k = r.hi
        e = r.coeff(k)
        u = e * ctx.frobenius_power(lc, k - d).inverse()
        q[k - d] = u
        r = r - OrePoly.monomial(ctx, u, k - d) * b
    return OrePoly(ctx, q), r


def right_divide(a, b):
    """a = q*b + r with hi(r) < hi(b) or r = 0 (Laurent elements normalized into k{tau})."""
    if b.is_zero():
        raise ZeroDivisionError("right division by the zero element")
    if a.ctx is not b.ctx:
        raise gf.FieldMismatchError("right_divide across different coefficient fields")
    if a.is_zero():
        return OrePoly(a.ctx), OrePoly(a.ctx)
    t = b.lo
    bh = b.rshift(-t)
    a1 = a.rshift(-t)
    s = min(0, a1.lo)
    ah = a1.lshift(-s)
    qh, rh = _divide_poly(ah, bh)
    return qh.lshift(s), rh.lshift(s).rshift(t)


def right_gcd(a, b):
    """Monic generator of the left ideal k{tau}a + k{tau}b (inputs in k{tau})."""
    while not b.is_zero():
        a, b = b, _divide_poly(a, b)[1]
    if a.is_zero():
        return a
    lc = a.coeff(a.hi)
    return OrePoly.scalar(a.ctx, lc.inverse()) * a


# kernels -----------------------------------------------------------------------


def kernel_size_exponent(f):
    """log_p of the number of roots of act(f, .) over the algebraic closure."""
    if f.is_zero():
        raise ZeroKernelError("the zero element has a connected kernel")
    return f.hi - f.lo


def splitting_degree(f, max_ext=64):
    """Least s (a multiple of the coefficient degree m) with ker f inside F_{p^s}.

    ker f lies in F_{p^s} iff tau^s - 1 is right divisible by g = f*tau^-lo,
    i.e. iff tau^s = 1 modulo g; the residue of tau^s is advanced one
    Frobenius step at a time. Gives up beyond s = max_ext * m.
    """
    if f.is_zero():
        raise ZeroKernelError("the zero element has a connected kernel")
    ctx = f.ctx
    m = ctx.N
    g = f.rshift(-f.lo)
    D = g.hi
    if D == 0:
        return m
    one = OrePoly.scalar(ctx, ctx.one)
    lc_inv = g.coeff(D).inverse()
    r = OrePoly.tau(ctx, 1)
    if D == 1:
        r = _divide_poly(r, g)[1]
    for s in range(1, max_ext * m + 1):
        if s % m == 0 and r == one:
            return s
        r = r.lshift(1)
        if not r.is_zero() and r.hi == D:
            e = r.coeff(D)
            r = r - OrePoly.scalar(ctx, e * lc_inv) * g
    raise SplittingCapError(f"kernel does not split within degree {max_ext * m}")


def roots_in_subfield_exponent(f, s):
    """log_p #(ker f inside F_{p^s}) = deg rgcd(g, tau^s - 1)."""
    g = f.rshift(-f.lo)
    ctx = f.ctx
    if s % ctx.N:
        raise OreError("s must be a multiple of the coefficient degree")
    t = OrePoly.tau(ctx, s) - OrePoly.scalar(ctx, ctx.one)
    h = right_gcd(t, g)
    return h.hi if not h.is_zero() else 0


def kernel(f, max_ext=64):
    """(field, F_p-basis) of the full root space of act(f, .)."""
    D = kernel_size_exponent(f)
    N = splitting_degree(f, max_ext)
    K = make_field(f.ctx.p, N, cap=max(gf.DEFAULT_DEGREE_CAP, max_ext * f.ctx.N))
    if D == 0:
        return K, []
    M = act_matrix(f, K)
    basis = [FieldElem(K, tuple(int(t) for t in v)) for v in gf.nullspace_mod(M, K.p)]
    if len(basis) != D:
        raise OreError(f"internal: found {len(basis)} kernel dimensions, expected {D}")
    return K, basis


def kernel_via_callable(f, max_ext=64):
    """Same as kernel() but through gf.fp_kernel and act(); slower, used as a cross-check."""
    D = kernel_size_exponent(f)
    N = splitting_degree(f, max_ext)
    K = make_field(f.ctx.p, N, cap=max(gf.DEFAULT_DEGREE_CAP, max_ext * f.ctx.N))
    basis = gf.fp_kernel(lambda x: act(f, x), K)
    if len(basis) != D:
        raise OreError(f"internal: found {len(basis)} kernel dimensions, expected {D}")
    return K, basis


# matrices ------------------------------------------------------------------------


class OreMatrix:
    """d x d matrix over k{tau, tau^-1}.

    ``kernel_size`` is an optional hint recorded by the block constructions
    that know the cardinality of the joint kernel.
    """

    def __init__(self, rows, kernel_size=None):
        rows = [list(r) for r in rows]
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise OreError("OreMatrix must be square and nonempty")
        ctx = rows[0][0].ctx
        if any(e.ctx is not ctx for r in rows for e in r):
            raise gf.FieldMismatchError("matrix entries over different fields")
        self.d = d
        self.ctx = ctx
        self.rows = rows
        self.kernel_size = kernel_size

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        return self.d == other.d and all(
            self.rows[i][j] == other.rows[i][j] for i in range(self.d) for j in range(self.d))

    def __repr__(self):
        return f"OreMatrix({self.rows!r})"

    def __add__(self, other):
        return OreMatrix([[self[i, j] + other[i, j] for j in range(self.d)] for i in range(self.d)])

    def __neg__(self):
        return OreMatrix([[-e for e in r] for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        d = self.d
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = OrePoly(self.ctx)
                for k in range(d):
                    acc = acc + self[i, k] * other[k, j]
                row.append(acc)
            out.append(row)
        return OreMatrix(out)

    def is_zero(self):
        return all(e.is_zero() for r in self.rows for e in r)

    def change_ring(self, dst):
        return OreMatrix([[e.change_ring(dst) for e in r] for r in self.rows], self.kernel_size)

    def to_json(self):
        out = {"d": self.d, "rows": [[e.to_json() for e in r] for r in self.rows]}
        if self.kernel_size is not None:
            out["kernel_size"] = self.kernel_size
        return out

    @classmethod
    def diag(cls, entries, kernel_size=None):
        ctx = entries[0].ctx
        d = len(entries)
        return cls([[entries[i] if i == j else OrePoly(ctx) for j in range(d)] for i in range(d)],
                   kernel_size)

    @classmethod
    def identity(cls, ctx, d):
        return cls.diag([OrePoly.scalar(ctx, ctx.one)] * d, kernel_size=1)


def matrix_from_json(obj):
    rows = [[ore_from_json(e) for e in r] for r in obj["rows"]]
    if int(obj.get("d", len(rows))) != len(rows):
        raise OreError("matrix dimension does not match rows")
    ctx = max((e.ctx for r in rows for e in r), key=lambda c: c.N)
    for r in rows:
        for e in r:
            if ctx.N % e.ctx.N:
                raise OreError("matrix entries over incompatible fields")
    ks = obj.get("kernel_size")
    return OreMatrix([[e.change_ring(ctx) for e in r] for r in rows],
                     kernel_size=int(ks) if ks is not None else None)


def m_adjoint(F):
    d = F.d
    return OreMatrix([[F[j, i].adjoint() for j in range(d)] for i in range(d)])


def is_skew_matrix(F):
    """F + F* = 0 and every diagonal entry is skew (the extra condition matters for p = 2)."""
    if not (F + m_adjoint(F)).is_zero():
        return False
    return all(is_skew(F[i, i]) for i in range(F.d))
