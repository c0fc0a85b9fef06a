"""Polynomials with exponents in Z[1/p], and the explicit Artin-Schreier solutions.

For an Ore element f the module builds

* ``solve_g(f)``: the unique g(u, v) with g(0, 0) = 0 and
  g^p - g = f(u) v - u f*(v);
* ``solve_r(f)`` (f skew): the unique r(x) with r(0) = 0 and r^p - r = x f(x);

plus their multivariate versions for skew matrices, which are re-verified
symbolically (``frob_minus_id``) before they are returned.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import gf
from .gf import embed, make_field
from .ore import OreError, OreMatrix, OrePoly, is_skew, is_skew_matrix


class SolverGateError(OreError):
    """A solver output failed its symbolic re-verification."""


class NotSkewError(OreError):
    pass


class PExp(NamedTuple):
    """The exponent num / p^e in lowest terms."""

    num: int
    e: int

    @classmethod
    def make(cls, num, e, p):
        if num < 0:
            raise ValueError("exponents are nonnegative")
        if num == 0:
            return cls(0, 0)
        while e > 0 and num % p == 0:
            num //= p
            e -= 1
        while e < 0:
            num *= p
            e += 1
        return cls(num, e)

    @classmethod
    def power_of_p(cls, k, p):
        """The exponent p^k for any integer k."""
        return cls(p ** k, 0) if k >= 0 else cls(1, -k)

    def add(self, other, p):
        e = max(self.e, other.e)
        return PExp.make(self.num * p ** (e - self.e) + other.num * p ** (e - other.e), e, p)

    def times_p(self, p):
        return PExp.make(self.num * p, self.e, p)

    def value(self, p):
        return Fraction(self.num, p ** self.e)


ZERO_EXP = PExp(0, 0)


class PerfectPoly:
    """sum c * x_1^a_1 ... x_k^a_k with a_i in Z[1/p]_{>=0}; immutable."""

    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx, nvars, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError("exponent tuple has the wrong arity")
            if c.ctx is not ctx:
                raise gf.FieldMismatchError("coefficient outside the polynomial's field")
            if exps in clean:
                c = clean[exps] + c
            if c:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def monomial(cls, ctx, c, exps):
        return cls(ctx, len(exps), {tuple(exps): c})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PerfectPoly):
            return NotImplemented
        return self.ctx is other.ctx and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple((k, c.coeffs) for k, c in self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        p = self.ctx.p
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(f"x{i}^{e.value(p)}" for i, e in enumerate(exps) if e.num)
            parts.append(f"{list(c.coeffs)}*{mono or '1'}")
        return " + ".join(parts)

    def _check(self, other):
        if other.ctx is not self.ctx or other.nvars != self.nvars:
            raise ValueError("incompatible perfect polynomials")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return PerfectPoly(self.ctx, self.nvars, out)

    def __neg__(self):
        return PerfectPoly(self.ctx, self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def frobenius(self):
        """h^p, computed termwise (the p-th power map is additive)."""
        p = self.ctx.p
        return PerfectPoly(self.ctx, self.nvars, {
            tuple(e.times_p(p) for e in exps): self.ctx.frobenius_power(c, 1)
            for exps, c in self.terms.items()})

    def constant_term(self):
        return self.terms.get((ZERO_EXP,) * self.nvars, self.ctx.zero)

    def remap(self, mapping, nvars):
        """Move variable i to position mapping[i] in a polynomial with ``nvars`` variables."""
        out = {}
        for exps, c in self.terms.items():
            new = [ZERO_EXP] * nvars
            for i, e in enumerate(exps):
                new[mapping[i]] = e
            key = tuple(new)
            out[key] = out[key] + c if key in out else c
        return PerfectPoly(self.ctx, nvars, out)

    def change_ring(self, dst):
        if dst is self.ctx:
            return self
        return PerfectPoly(dst, self.nvars,
                           {k: embed(self.ctx, dst, c) for k, c in self.terms.items()})

    def to_json(self):
        return {
            "p": self.ctx.p,
            "m": self.ctx.N,
            "vars": self.nvars,
            "terms": [{"exps": [[e.num, e.e] for e in exps], "c": list(c.coeffs)}
                      for exps, c in self.terms.items()],
        }


def ppoly_from_json(obj):
    ctx = make_field(int(obj["p"]), int(obj["m"]), cap=max(gf.DEFAULT_DEGREE_CAP, int(obj["m"])))
    p = ctx.p
    terms = {}
    for t in obj["terms"]:
        exps = tuple(PExp.make(int(n), int(e), p) for n, e in t["exps"])
        terms[exps] = terms.get(exps, ctx.zero) + ctx(t["c"])
    return PerfectPoly(ctx, int(obj["vars"]), terms)


def frob_minus_id(h):
    return h.frobenius() - h


# evaluation ---------------------------------------------------------------------


def _digits(n, p):
    out = []
    while n:
        n, d = divmod(n, p)
        out.append(d)
    return out


def _eval_monomial_point(x, exp):
    # x^(num/p^e) = prod_d (x^(p^(d-e)))^digit_d
    K = x.ctx
    out = K.one
    for d, digit in enumerate(_digits(exp.num, K.p)):
        if digit:
            out = out * K.frobenius_power(x, d - exp.e) ** digit
    return out


def p_eval(h, point):
    """Evaluate h at a field point (one FieldElem per variable)."""
    if not isinstance(point, (tuple, list)):
        point = (point,)
    if len(point) != h.nvars:
        raise ValueError(f"expected {h.nvars} coordinates")
    K = point[0].ctx
    out = K.zero
    for exps, c in h.terms.items():
        term = embed(h.ctx, K, c)
        for x, e in zip(point, exps):
            if e.num:
                term = term * _eval_monomial_point(x, e)
        out = out + term
    return out


def p_eval_batch(h, X, K):
    """Evaluate h at many points at once.

    X has shape (M, nvars, N): coefficient vectors of the coordinates over K.
    Returns an (M, N) array.
    """
    X = np.asarray(X, dtype=np.int64)
    M = X.shape[0]
    p = K.p
    frob_cache = {}

    def frob(v, k):
        key = (v, k % K.N)
        if key not in frob_cache:
            frob_cache[key] = K.batch_frobenius(X[:, v, :], k)
        return frob_cache[key]

    total = np.zeros((M, K.N), dtype=np.int64)
    for exps, c in h.terms.items():
        cK = embed(h.ctx, K, c)
        acc = None
        for v, e in enumerate(exps):
            for d, digit in enumerate(_digits(e.num, p)):
                for _ in range(digit):
                    f = frob(v, d - e.e)
                    acc = f if acc is None else K.batch_mul(acc, f)
        if acc is None:
            acc = np.zeros((M, K.N), dtype=np.int64)
            acc[:, 0] = 1
        total = total + gf._core.matmul_mod(acc, K.mul_matrix(cK).T, p)
    return total % p


# symbolic right-hand sides ---------------------------------------------------------


def x_times_f(f):
    """x * f(x) = sum c_i x^(1 + p^i)."""
    p = f.ctx.p
    one = PExp(1, 0)
    return PerfectPoly(f.ctx, 1, {(one.add(PExp.power_of_p(i, p), p),): c for i, c in f.terms.items()})


def bilinear_rhs(f):
    """f(u) v - u f*(v) in variables (u, v)."""
    p = f.ctx.p
    one = PExp(1, 0)
    out = PerfectPoly(f.ctx, 2)
    for i, c in f.terms.items():
        out = out + PerfectPoly.monomial(f.ctx, c, (PExp.power_of_p(i, p), one))
    for i, c in f.adjoint().terms.items():
        out = out - PerfectPoly.monomial(f.ctx, c, (one, PExp.power_of_p(i, p)))
    return out


def quadratic_rhs_matrix(F):
    """sum_i x_i (F x)_i in d variables."""
    d = F.d
    p = F.ctx.p
    one = PExp(1, 0)
    out = PerfectPoly(F.ctx, d)
    for i in range(d):
        for j in range(d):
            for e, c in F[i, j].terms.items():
                exps = [ZERO_EXP] * d
                exps[i] = one
                exps[j] = exps[j].add(PExp.power_of_p(e, p), p)
                out = out + PerfectPoly.monomial(F.ctx, c, exps)
    return out


def bilinear_rhs_matrix(F):
    """<F u, v> - <u, F* v> in variables (u_1..u_d, v_1..v_d)."""
    d = F.d
    out = PerfectPoly(F.ctx, 2 * d)
    for i in range(d):
        for j in range(d):
            out = out + bilinear_rhs(F[i, j]).remap((j, d + i), 2 * d)
    return out


# solvers ---------------------------------------------------------------------


def _g_monomial(ctx, a, n):
    p = ctx.p
    terms = {}
    if n > 0:
        for s in range(1, n + 1):
            terms[(PExp.power_of_p(n - s, p), PExp.power_of_p(-s, p))] = ctx.frobenius_power(a, -s)
    elif n < 0:
        for s in range(0, -n):
            terms[(PExp.power_of_p(n + s, p), PExp.power_of_p(s, p))] = -ctx.frobenius_power(a, s)
    return PerfectPoly(ctx, 2, terms)


def solve_g(f):
    """The unique g(u, v), g(0, 0) = 0, with g^p - g = f(u) v - u f*(v)."""
    out = PerfectPoly(f.ctx, 2)
    for n, a in f.terms.items():
        out = out + _g_monomial(f.ctx, a, n)
    return out


def solve_r(f):
    """The unique r(x), r(0) = 0, with r^p - r = x f(x); f must be skew."""
    if not is_skew(f):
        raise NotSkewError("r exists only for skew-symmetric f")
    ctx = f.ctx
    p = ctx.p
    out = PerfectPoly(ctx, 1)
    for j, c in f.terms.items():
        if j <= 0:
            continue
        # telescoping solution for c tau^j - tau^-j c
        terms = {}
        for s in range(1, j + 1):
            exp = PExp.power_of_p(-s, p).add(PExp.power_of_p(j - s, p), p)
            terms[(exp,)] = ctx.frobenius_power(c, -s)
        out = out + PerfectPoly(ctx, 1, terms)
    return out


def solve_r_matrix(F):
    """r(x_1..x_d) with r^p - r = sum_i x_i (F x)_i, r(0) = 0; verified before return."""
    if not is_skew_matrix(F):
        raise NotSkewError("r exists only for skew-symmetric matrices")
    d = F.d
    out = PerfectPoly(F.ctx, d)
    for i in range(d):
        out = out + solve_r(F[i, i]).remap((i,), d)
        for j in range(i + 1, d):
            out = out + solve_g(F[i, j]).remap((j, i), d)
    if frob_minus_id(out) != quadratic_rhs_matrix(F):
        raise SolverGateError("multivariate r failed symbolic verification")
    return out


def solve_g_matrix(F):
    """g(u, v) in 2d variables with g^p - g = <F u, v> - <u, F* v>; verified before return."""
    d = F.d
    out = PerfectPoly(F.ctx, 2 * d)
    for i in range(d):
        for j in range(d):
            out = out + solve_g(F[i, j]).remap((j, d + i), 2 * d)
    if frob_minus_id(out) != bilinear_rhs_matrix(F):
        raise SolverGateError("multivariate g failed symbolic verification")
    return out


def as_matrix(F):
    if isinstance(F, OrePoly):
        return OreMatrix([[F]])
    return F
