"""Metric groups of skew-symmetric homomorphisms, descent and isogeny pullback.

A skew f (an Ore element, or a d x d Ore matrix) has a finite kernel A inside
some F_{p^N}^d. The quadratic form is q(a) = i(r(a)) and the pairing is
B(a, b) = i(g(a, b)), with r, g the Artin-Schreier solutions of ``ppoly`` and
i(1) = 1/p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import lcm

import numpy as np

from . import _core, gf, mgrp, ore, ppoly
from .gf import FieldElem, common_field, make_field
from .ore import OreError, OreMatrix, OrePoly

DEFAULT_MAX_EXT = 64
# evaluate g directly on every kernel pair when there are at most this many pairs
DIRECT_PAIRS_LIMIT = 1 << 16
# budget for the compiled all-pairs polarization check
DEFAULT_PAIRS_CAP = 1 << 28


class BiextError(OreError):
    pass


class DescentError(BiextError):
    """The subgroup does not satisfy the descent hypotheses."""


class DescentInternalError(BiextError):
    """An Ore division that must be exact left a remainder."""


class KernelSizeError(BiextError):
    pass


@dataclass
class BiextModel:
    """Kernel, quadratic form and pairing of a skew homomorphism.

    Kernel elements are indexed by codes over the F_p-basis ``kernel_basis``
    (first basis vector least significant); ``qnum`` holds q in units of 1/p
    and ``gram`` holds B on the basis.
    """

    F: object
    d: int
    kernel_field: gf.FieldCtx
    kernel_basis: np.ndarray  # (D, d, N) coefficient vectors
    r: ppoly.PerfectPoly
    g: ppoly.PerfectPoly
    qnum: np.ndarray
    gram: np.ndarray
    connected: bool = False
    _metric: mgrp.MetricGroup = field(default=None, repr=False)

    @property
    def p(self):
        return self.kernel_field.p

    @property
    def dim(self):
        return self.kernel_basis.shape[0]

    @property
    def kernel_size(self):
        return self.p ** self.dim

    @property
    def metric(self):
        if self._metric is None:
            self._metric = mgrp.MetricGroup(self.p, (self.p,) * self.dim, self.qnum, 1)
        return self._metric

    def coordinates(self):
        """(M, D) base-p digits of every kernel code."""
        return _digit_table(self.p, self.dim)

    def elements(self):
        """(M, d, N) coefficient vectors of every kernel element, by code."""
        C = self.coordinates()
        if self.dim == 0:
            return np.zeros((1, self.d, self.kernel_field.N), dtype=np.int64)
        flat = self.kernel_basis.reshape(self.dim, -1)
        return _core.matmul_mod(C, flat, self.p).reshape(len(C), self.d, -1)

    def element(self, code):
        vec = self.elements()[code]
        K = self.kernel_field
        out = tuple(FieldElem(K, tuple(int(t) for t in row)) for row in vec)
        return out[0] if self.d == 1 else out

    def code_of(self, x):
        """Code of a kernel element given as a FieldElem (d = 1) or a tuple of them."""
        xs = (x,) if self.d == 1 else tuple(x)
        vec = np.array([e.coeffs for e in xs], dtype=np.int64).reshape(-1)
        flat = self.kernel_basis.reshape(self.dim, -1)
        sol = _solve_coords(flat, vec, self.p)
        return int(sum(int(c) * self.p ** i for i, c in enumerate(sol)))

    def q(self, code):
        return mgrp.QpZp.make(int(self.qnum[code]), 1, self.p)

    def B(self, a, b):
        C = self.coordinates()
        return mgrp.QpZp.make(int(C[a] @ self.gram @ C[b]), 1, self.p)

    def check_invariants(self, pairs_cap=DEFAULT_PAIRS_CAP):
        """Exact checks of the structural properties; returns name -> bool."""
        p, D = self.p, self.dim
        if self.kernel_size ** 2 > pairs_cap:
            raise mgrp.CapError(f"{self.kernel_size ** 2} kernel pairs exceed the pair budget {pairs_cap}")
        out = {
            "even_order": D % 2 == 0,
            "symmetric": bool(np.array_equal(self.gram % p, self.gram.T % p)),
            "nondegenerate": gf.rank_mod(self.gram, p) == D if D else True,
            "g_biadditive": _is_biadditive(self.g),
            "polarization": int(_core.polar_defects(self.qnum, p, D, self.gram)) == 0,
        }
        if self.kernel_size ** 2 <= DIRECT_PAIRS_LIMIT:
            out["pairing_all_pairs"] = self._direct_pairs_match()
        A = self.metric
        allc = np.arange(A.size)
        out["q_even"] = bool(np.array_equal(A.qnum[A.neg(allc)], A.qnum))
        out["q_scaling"] = all(
            np.array_equal(A.qnum[A.mul(np.full(A.size, n), allc)],
                           (n * n * A.qnum) % p)
            for n in range(2, p))
        return out

    def _direct_pairs_match(self):
        """Evaluate g on every pair of kernel elements and compare with the Gram form."""
        X = self.elements()
        M = X.shape[0]
        pairs = np.concatenate([np.repeat(X, M, axis=0), np.tile(X, (M, 1, 1))], axis=1)
        vals = ppoly.p_eval_batch(self.g, pairs, self.kernel_field)
        if np.any(vals[:, 1:]):
            return False
        C = self.coordinates()
        expect = (C @ self.gram @ C.T) % self.p
        return bool(np.array_equal(vals[:, 0].reshape(M, M), expect))


def _digit_table(p, D):
    M = p ** D
    codes = np.arange(M, dtype=np.int64)
    if D == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack([(codes // p ** i) % p for i in range(D)], axis=1)


def _solve_coords(basis_rows, vec, p):
    """Solve c @ basis_rows = vec over F_p."""
    D = basis_rows.shape[0]
    aug = np.concatenate([basis_rows.T, vec.reshape(-1, 1)], axis=1) % p
    R, piv = _core.rref_mod(aug, p)
    if D in piv:
        raise BiextError("element is not in the kernel")
    sol = np.zeros(D, dtype=np.int64)
    for row, c in enumerate(piv):
        sol[c] = R[row, D]
    return sol


def _is_biadditive(h):
    """Each monomial is c u_j^(p^a) v_i^(p^b): then h is additive in u and in v."""
    half = h.nvars // 2
    p = h.ctx.p
    for exps in h.terms:
        for block in (exps[:half], exps[half:]):
            live = [e for e in block if e.num]
            if len(live) != 1:
                return False
            n = live[0].num
            while n % p == 0:
                n //= p
            if n != 1:
                return False
    return True


def _to_prime(vals, what):
    if np.any(vals[:, 1:]):
        raise BiextError(f"internal: {what} left the prime field")
    return vals[:, 0].copy()


def _build(F, d, K, basis, r, g):
    p = K.p
    D = len(basis)
    basis = np.asarray(basis, dtype=np.int64).reshape(D, d, K.N)
    model = BiextModel(F, d, K, basis, r, g, np.zeros(1, dtype=np.int64),
                       np.zeros((D, D), dtype=np.int64))
    if p ** D > mgrp.DEFAULT_TABLE_CAP:
        raise mgrp.CapError(f"kernel of order p^{D} exceeds the table cap")
    X = model.elements()
    model.qnum = _to_prime(ppoly.p_eval_batch(r, X, K), "q")
    if D:
        pairs = np.concatenate([np.repeat(basis, D, axis=0), np.tile(basis, (D, 1, 1))], axis=1)
        model.gram = _to_prime(ppoly.p_eval_batch(g, pairs, K), "B").reshape(D, D)
    return model


def _trivial_model(F, d):
    K = F.ctx
    zero = ppoly.PerfectPoly(K, d)
    return BiextModel(F, d, K, np.zeros((0, d, K.N), dtype=np.int64), zero,
                      ppoly.PerfectPoly(K, 2 * d), np.zeros(1, dtype=np.int64),
                      np.zeros((0, 0), dtype=np.int64), connected=True)


# single-variable model -----------------------------------------------------------------


def pairing(f, a, b):
    """B(a, b) = i(g(a, b)) for a in ker f, b in ker f*."""
    if ore.act(f, a) or ore.act(f.adjoint(), b):
        raise BiextError("pairing arguments must lie in ker f and ker f*")
    a, b = _same_field(a, b)
    v = ppoly.p_eval(ppoly.solve_g(f), (a, b))
    if not v.in_prime_field():
        raise BiextError("internal: pairing left the prime field")
    return mgrp.QpZp.make(v.coeffs[0], 1, f.ctx.p)


def _same_field(a, b):
    if a.ctx is b.ctx:
        return a, b
    K = common_field(a.ctx, b.ctx)
    return gf.embed(a.ctx, K, a), gf.embed(b.ctx, K, b)


def metric_from_skew(f, max_ext=DEFAULT_MAX_EXT):
    if not ore.is_skew(f):
        raise ppoly.NotSkewError("f is not skew-symmetric")
    if f.is_zero():
        return _trivial_model(f, 1)
    K, basis = ore.kernel(f, max_ext)
    r = ppoly.solve_r(f)
    g = ppoly.solve_g(f)
    return _build(f, 1, K, [b.coeffs for b in basis], r, g)


# matrices ------------------------------------------------------------------------


def _entry_kernel_size(e):
    return e.ctx.p ** ore.kernel_size_exponent(e)


def joint_kernel(F, K):
    """F_p-basis (rows of length d*N) of the joint kernel of F over K^d."""
    d, N = F.d, K.N
    M = np.zeros((d * N, d * N), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            M[i * N:(i + 1) * N, j * N:(j + 1) * N] = ore.act_matrix(F[i, j], K)
    return gf.nullspace_mod(M, K.p)


def metric_from_skew_matrix(F, expected_size=None, max_ext=DEFAULT_MAX_EXT):
    if not ore.is_skew_matrix(F):
        raise ppoly.NotSkewError("matrix is not skew-symmetric")
    if expected_size is None:
        expected_size = F.kernel_size
    if expected_size is None:
        # diagonal matrices are the only case whose size is read off directly
        expected_size = _kernel_size(F)
    p = F.ctx.p
    D = mgrp._vp(expected_size, p) if expected_size > 1 else 0
    if p ** D != expected_size:
        raise KernelSizeError("expected size is not a power of p")
    m = F.ctx.N
    degrees = []
    for row in F.rows:
        for e in row:
            if not e.is_zero():
                try:
                    degrees.append(ore.splitting_degree(e, max_ext))
                except ore.SplittingCapError:
                    pass
    first = reduce(lcm, degrees, m)
    tries = ([first] if first <= max_ext * m else []) + \
        [s for s in range(m, max_ext * m + 1, m) if s != first]
    cap = max(gf.DEFAULT_DEGREE_CAP, max_ext * m)
    for s in tries:
        K = make_field(p, s, cap=cap)
        basis = joint_kernel(F, K)
        if len(basis) > D:
            raise KernelSizeError(f"joint kernel exceeds the expected size {expected_size}")
        if len(basis) == D:
            r = ppoly.solve_r_matrix(F)
            g = ppoly.solve_g_matrix(F)
            return _build(F, F.d, K, basis, r, g)
    raise KernelSizeError(f"expected kernel size {expected_size} not reached within degree {max_ext * m}")


def metric_of(F, max_ext=DEFAULT_MAX_EXT):
    if isinstance(F, OrePoly):
        return metric_from_skew(F, max_ext)
    if F.d == 1:
        return metric_from_skew(F[0, 0], max_ext)
    return metric_from_skew_matrix(F, max_ext=max_ext)


def _kernel_size(F):
    if isinstance(F, OrePoly):
        return _entry_kernel_size(F)
    if F.kernel_size is not None:
        return F.kernel_size
    if all(F[i, j].is_zero() for i in range(F.d) for j in range(F.d) if i != j):
        size = 1
        for i in range(F.d):
            size *= _entry_kernel_size(F[i, i])
        return size
    raise BiextError("matrix kernels need a known expected size (kernel_size)")


def direct_sum_blocks(*blocks):
    """Block-diagonal matrix; blocks are Ore elements or matrices."""
    mats = [OreMatrix([[b]]) if isinstance(b, OrePoly) else b for b in blocks]
    ctx = mats[0].ctx
    for M in mats[1:]:
        if M.ctx is not ctx:
            ctx = common_field(ctx, M.ctx)
    mats = [M.change_ring(ctx) if M.ctx is not ctx else M for M in mats]
    d = sum(M.d for M in mats)
    zero = OrePoly(ctx)
    rows = [[zero] * d for _ in range(d)]
    off = 0
    size = 1
    for M in mats:
        for i in range(M.d):
            for j in range(M.d):
                rows[off + i][off + j] = M[i, j]
        off += M.d
        size *= _kernel_size(M)
    return OreMatrix(rows, kernel_size=size)


def hyperbolic_block(g):
    """[[0, g], [-g*, 0]]: skew for any g, with kernel ker g* x ker g."""
    if g.is_zero():
        raise BiextError("hyperbolic block needs a nonzero entry")
    zero = OrePoly(g.ctx)
    size = _entry_kernel_size(g) ** 2
    return OreMatrix([[zero, g], [-g.adjoint(), zero]], kernel_size=size)


# descent ---------------------------------------------------------------------------


def subgroup_isogeny(L, ctx):
    """Monic pi in k{tau} of degree len(L) whose kernel is span(L)."""
    pi = OrePoly.scalar(ctx, ctx.one)
    p = ctx.p
    for l in L:
        l = ctx(l)
        beta = ore.act(pi, l)
        if not beta:
            raise DescentError("subgroup generators are not independent")
        pi = (OrePoly.tau(ctx, 1) - OrePoly.scalar(ctx, beta ** (p - 1))) * pi
    return pi


def _span_elements(L, ctx):
    p = ctx.p
    out = [ctx.zero]
    for l in L:
        out = [x + l * c for c in range(p) for x in out]
    return out


def descend(f, L, max_ext=DEFAULT_MAX_EXT):
    """f' with adjoint(pi_L) f' pi_L = f, for an isotropic subgroup span(L) of ker f."""
    if not ore.is_skew(f):
        raise ppoly.NotSkewError("f is not skew-symmetric")
    L = list(L)
    if not L:
        return f
    ctx = L[0].ctx
    if any(l.ctx is not ctx for l in L):
        raise DescentError("subgroup generators lie in different fields")
    if ctx.N % f.ctx.N:
        ctx = common_field(ctx, f.ctx)
        L = [gf.embed(l.ctx, ctx, l) for l in L]
    for l in L:
        if ore.act(f, l):
            raise DescentError("subgroup is not inside ker f")
    r = ppoly.solve_r(f)
    for x in _span_elements(L, ctx):
        v = ppoly.p_eval(r, x)
        if v:
            raise DescentError("q does not vanish on the subgroup")
    fk = f.change_ring(ctx)
    pi = subgroup_isogeny(L, ctx)
    h, rem = ore.right_divide(fk, pi)
    if not rem.is_zero():
        raise DescentInternalError("f is not right divisible by pi_L")
    fs, rem = ore.right_divide(h.adjoint(), pi)
    if not rem.is_zero():
        raise DescentInternalError("the cofactor is not left divisible by adjoint(pi_L)")
    f2 = fs.adjoint()
    if pi.adjoint() * f2 * pi != fk:
        raise DescentInternalError("recomposition failed")
    if not ore.is_skew(f2):
        raise DescentInternalError("descended element is not skew")
    return f2


# pullback ------------------------------------------------------------------------


def _common(F, Phi):
    if F.ctx is Phi.ctx:
        return F, Phi
    K = common_field(F.ctx, Phi.ctx)
    return F.change_ring(K), Phi.change_ring(K)


def pullback(F, Phi):
    """adjoint(Phi) F Phi; for matrices the kernel size hint is propagated."""
    if isinstance(F, OrePoly) and isinstance(Phi, OrePoly):
        if Phi.is_zero():
            raise BiextError("Phi is not an isogeny")
        if not ore.is_skew(F):
            raise ppoly.NotSkewError("F is not skew-symmetric")
        F, Phi = _common(F, Phi)
        return Phi.adjoint() * F * Phi
    if isinstance(F, OrePoly):
        F = OreMatrix([[F]])
    if isinstance(Phi, OrePoly):
        Phi = OreMatrix([[Phi]])
    if F.d != Phi.d:
        raise BiextError("dimension mismatch")
    if not ore.is_skew_matrix(F):
        raise ppoly.NotSkewError("F is not skew-symmetric")
    try:
        kphi = _kernel_size(Phi)
    except (BiextError, ore.ZeroKernelError):
        raise BiextError("Phi is not an isogeny of known degree") from None
    ks = F.kernel_size if F.kernel_size is not None else _kernel_size(F)
    F, Phi = _common(F, Phi)
    out = ore.m_adjoint(Phi) * F * Phi
    return OreMatrix(out.rows, kernel_size=ks * kphi * kphi)


def apply_batch(Phi, X, K):
    """Apply an Ore element or matrix to a batch (M, d, N) of points of K^d."""
    if isinstance(Phi, OrePoly):
        Phi = OreMatrix([[Phi]])
    out = np.zeros_like(X)
    for i in range(Phi.d):
        for j in range(Phi.d):
            if Phi[i, j].is_zero():
                continue
            A = ore.act_matrix(Phi[i, j], K)
            out[:, i, :] = (out[:, i, :] + _core.matmul_mod(X[:, j, :], A.T, K.p)) % K.p
    return out


# reports -----------------------------------------------------------------------


def report(model, witt=None, gauss=None):
    p = model.p
    X = model.elements()
    keys = [tuple(X[c].reshape(-1).tolist()) for c in range(len(X))]
    order = sorted(range(len(X)), key=lambda c: keys[c])
    entries = []
    for c in order:
        elem = X[c, 0].tolist() if model.d == 1 else X[c].tolist()
        v = model.q(c)
        entries.append([elem, v.num, p ** v.k])
    F = model.F
    return {
        "p": p,
        "f": F.to_json(),
        "kernel_size": model.kernel_size,
        "kernel_field_degree": model.kernel_field.N,
        "connected": model.connected,
        "q": entries,
        "witt_class": str(witt) if witt is not None else None,
        "gauss_sum": gauss.to_json() if gauss is not None else None,
    }
