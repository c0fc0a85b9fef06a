import random

import numpy as np
import pytest

from skewbiext import biext, mgrp, ore, ppoly
from skewbiext.biext import (descend, direct_sum_blocks, hyperbolic_block, metric_from_skew,
                             metric_from_skew_matrix, pairing, pullback, subgroup_isogeny)
from skewbiext.gf import common_field, embed, make_field, rank_mod
from skewbiext.ore import OreMatrix, OrePoly, act

from oracles import NaiveField


def T(ctx, e=1):
    return OrePoly.tau(ctx, e)


def basic(p):
    F = make_field(p, 1)
    return T(F) - T(F, -1)


def _outside_kernel(f, K):
    fK = f.change_ring(K)
    return next(x for x in K.elements() if act(fK, x))


def all_true(checks):
    bad = [k for k, v in checks.items() if not v]
    assert not bad, bad


# worked example ------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_worked_example_against_trace_and_norm(p):
    f = basic(p)
    M = metric_from_skew(f)
    K = M.kernel_field
    assert K.N == 2 and M.kernel_size == p * p
    ref = NaiveField(p, K.modulus)
    elems = [M.element(c) for c in range(M.kernel_size)]
    for c, a in enumerate(elems):
        nm = ref.pow(a.coeffs, p + 1)
        assert nm[1:] == (0,) and M.q(c) == mgrp.QpZp.make(nm[0], 1, p)
    for ca, a in enumerate(elems):
        for cb, b in enumerate(elems):
            prod = ref.mul(a.coeffs, ref.pow(b.coeffs, p))
            tr = ref.add(prod, ref.pow(prod, p))
            assert tr[1:] == (0,)
            want = mgrp.QpZp.make(tr[0], 1, p)
            assert M.B(ca, cb) == want
            assert pairing(f, a, b) == want


def test_pairing_errors_and_zero():
    f = basic(3)
    M = metric_from_skew(f)
    a = M.element(1)
    assert pairing(f, a, M.kernel_field.zero) == mgrp.QpZp(0, 0)
    with pytest.raises(biext.BiextError):
        pairing(f, _outside_kernel(f, make_field(3, 4)), a)


def test_pairing_is_polarization_of_q():
    f = basic(3)
    M = metric_from_skew(f)
    A = M.metric
    for a in range(9):
        for b in range(9):
            x, y = M.element(a), M.element(b)
            assert pairing(f, x, y) == A.B(a, b)


# metric_from_skew ----------------------------------------------------------------------


def test_zero_map_is_connected_trivial():
    M = metric_from_skew(OrePoly(make_field(3, 1)))
    assert M.connected and M.kernel_size == 1
    assert M.metric == mgrp.MetricGroup.trivial(3)


def test_not_skew_is_rejected():
    with pytest.raises(ppoly.NotSkewError):
        metric_from_skew(T(make_field(3, 1)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_rank_one_family(p):
    F = make_field(p, 2)
    rng = random.Random(p)
    for _ in range(3):
        c = F.random(rng)
        while not c:
            c = F.random(rng)
        C = OrePoly.scalar(F, c)
        f = C * T(F) - T(F, -1) * C
        M = metric_from_skew(f)
        assert M.kernel_size == p * p
        assert mgrp.witt_class(M.metric).label == "NormForm"


@pytest.mark.parametrize("p,m,n", [(2, 1, 1), (2, 2, 2), (3, 1, 2), (3, 2, 1), (5, 1, 1), (2, 1, 3)])
def test_random_instances_satisfy_invariants(p, m, n):
    ctx = make_field(p, m)
    for seed in range(3):
        f = ore.random_skew(ctx, n, seed)
        M = metric_from_skew(f)
        assert M.kernel_size == p ** (2 * n)
        all_true(M.check_invariants())
        assert mgrp.classify_exponent_p(M.metric) == "NormFormClass"
        # q is really r evaluated on the kernel
        for c in range(0, M.kernel_size, max(1, M.kernel_size // 7)):
            v = ppoly.p_eval(ppoly.solve_r(f).change_ring(M.kernel_field), M.element(c))
            assert M.q(c) == mgrp.QpZp.make(v.coeffs[0], 1, p)


def test_code_of_inverts_element():
    M = metric_from_skew(ore.random_skew(make_field(3, 1), 2, 1))
    for c in (0, 1, 17, 80):
        assert M.code_of(M.element(c)) == c


def test_pairs_cap():
    M = metric_from_skew(ore.random_skew(make_field(3, 1), 2, 1))
    with pytest.raises(mgrp.CapError):
        M.check_invariants(pairs_cap=1000)


# matrices -------------------------------------------------------------------------------


def test_diagonal_matrix_is_a_direct_sum():
    ctx = make_field(3, 1)
    f1, f2 = ore.random_skew(ctx, 1, 4), basic(3)
    M = metric_from_skew_matrix(direct_sum_blocks(f1, f2))
    A = mgrp.direct_sum(metric_from_skew(f1).metric, metric_from_skew(f2).metric)
    assert mgrp.is_metric_isomorphic(M.metric, A)
    all_true(M.check_invariants())


def test_diag_example_p3():
    f = basic(3)
    M = metric_from_skew_matrix(OreMatrix.diag([f, f]))
    assert M.kernel_size == 81
    assert mgrp.witt_class(M.metric).label == "Zero"


@pytest.mark.parametrize("p", [2, 3, 5])
def test_hyperbolic_block_is_hyperbolic(p):
    ctx = make_field(p, 1)
    rng = random.Random(p)
    g = ore.random_ore(ctx, 0, 1, rng)
    while g.hi != 1 or g.lo != 0:
        g = ore.random_ore(ctx, 0, 1, rng)
    H = hyperbolic_block(g)
    M = metric_from_skew_matrix(H)
    assert M.kernel_size == p * p
    assert mgrp.witt_class(M.metric).label == "Zero"
    assert mgrp.classify_exponent_p(M.metric) == "Hyperbolic"
    all_true(M.check_invariants())


def test_matrix_size_errors():
    ctx = make_field(3, 1)
    g = T(ctx) - OrePoly.scalar(ctx, ctx.one)
    Z = OrePoly(ctx)
    bare = OreMatrix([[Z, g], [-g.adjoint(), Z]])
    with pytest.raises(biext.BiextError):
        metric_from_skew_matrix(bare)
    assert metric_from_skew_matrix(bare, expected_size=9).kernel_size == 9
    with pytest.raises(biext.KernelSizeError):
        metric_from_skew_matrix(bare, expected_size=3)
    with pytest.raises(biext.KernelSizeError):
        metric_from_skew_matrix(bare, expected_size=10)
    with pytest.raises(biext.BiextError):
        hyperbolic_block(Z)


# subgroup isogenies and descent -------------------------------------------------------------


def test_subgroup_isogeny_examples():
    F = make_field(3, 1)
    assert subgroup_isogeny([], F) == OrePoly.scalar(F, F.one)
    assert subgroup_isogeny([F.one], F) == T(F) - OrePoly.scalar(F, F.one)
    with pytest.raises(biext.DescentError):
        subgroup_isogeny([F.one, F(2)], F)


@pytest.mark.parametrize("p,N,k", [(2, 4, 2), (3, 3, 2), (5, 2, 1), (2, 5, 3)])
def test_subgroup_isogeny_kernel(p, N, k):
    K = make_field(p, N)
    rng = random.Random(N)
    for _ in range(3):
        while True:
            L = [K.random(rng) for _ in range(k)]
            if rank_mod([l.coeffs for l in L], p) == k:
                break
        pi = subgroup_isogeny(L, K)
        assert pi.hi == k and pi.lo == 0 and pi.coeff(k) == K.one
        zeros = [x for x in K.elements() if not act(pi, x)]
        assert len(zeros) == p ** k
        for l in L:
            assert not act(pi, l)


def _isotropic_line(M):
    for c in range(1, M.kernel_size):
        if M.qnum[c] == 0:
            return M.element(c)
    return None


@pytest.mark.parametrize("p", [2, 3, 5])
def test_descent_relation(p):
    ctx = make_field(p, 1)
    done = 0
    for seed in range(40):
        f = ore.random_skew(ctx, 2, seed)
        M = metric_from_skew(f)
        l = _isotropic_line(M)
        if l is None:
            continue
        f2 = descend(f, [l])
        M2 = metric_from_skew(f2)
        assert ore.is_skew(f2)
        assert M.kernel_size == M2.kernel_size * p * p
        assert mgrp.witt_class(M.metric) == mgrp.witt_class(M2.metric)
        H = np.array([M.code_of(l * c) for c in range(p)])
        assert mgrp.is_metric_isomorphic(mgrp.subquotient(M.metric, H), M2.metric)
        done += 1
        if done == 3:
            break
    assert done == 3


def test_descend_trivial_and_errors():
    f = ore.random_skew(make_field(3, 1), 2, 0)
    assert descend(f, []) == f
    M = metric_from_skew(f)
    bad = next(M.element(c) for c in range(1, M.kernel_size) if M.qnum[c])
    with pytest.raises(biext.DescentError):
        descend(f, [bad])
    with pytest.raises(biext.DescentError):
        descend(f, [_outside_kernel(f, M.kernel_field)])
    with pytest.raises(ppoly.NotSkewError):
        descend(T(make_field(3, 1)), [M.element(1)])


# pullback -----------------------------------------------------------------------------------


def test_pullback_identity_and_example():
    for p in (2, 3):
        F = make_field(p, 1)
        f = basic(p)
        one = OrePoly.scalar(F, F.one)
        assert pullback(f, one) == f
        f2 = pullback(f, T(F) - one)
        assert ore.is_skew(f2)
        _, basis = ore.kernel(f2)
        assert len(basis) == 4
        c1, c2 = (mgrp.witt_class(metric_from_skew(g).metric) for g in (f, f2))
        assert c1 == c2


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pullback_functoriality(p):
    ctx = make_field(p, 1)
    rng = random.Random(p)
    f = ore.random_skew(ctx, 1, p)
    Phi = ore.random_ore(ctx, 0, 1, rng)
    while Phi.hi != 1 or Phi.lo != 0:
        Phi = ore.random_ore(ctx, 0, 1, rng)
    f2 = pullback(f, Phi)
    M, M2 = metric_from_skew(f), metric_from_skew(f2)
    assert M2.kernel_size == M.kernel_size * p * p
    K = common_field(M.kernel_field, M2.kernel_field)
    r = ppoly.solve_r(f).change_ring(K)
    r2 = ppoly.solve_r(f2).change_ring(K)
    g = ppoly.solve_g(f).change_ring(K)
    g2 = ppoly.solve_g(f2).change_ring(K)
    fK, PhiK = f.change_ring(K), Phi.change_ring(K)
    pre = []
    for c in range(M2.kernel_size):
        a = embed(M2.kernel_field, K, M2.element(c))
        y = act(PhiK, a)
        if not act(fK, y):
            pre.append((a, y))
            assert ppoly.p_eval(r2, a) == ppoly.p_eval(r, y)
    assert len(pre) >= M.kernel_size
    for a, y in pre[:6]:
        for b, z in pre[:6]:
            assert ppoly.p_eval(g2, (a, b)) == ppoly.p_eval(g, (y, z))


def test_matrix_pullback_carries_size_hint():
    ctx = make_field(3, 1)
    f = basic(3)
    one = OrePoly.scalar(ctx, ctx.one)
    Phi = OreMatrix.diag([T(ctx) - one, one])
    F2 = pullback(direct_sum_blocks(f, f), Phi)
    assert F2.kernel_size == 81 * 9
    assert ore.is_skew_matrix(F2)
    with pytest.raises(biext.BiextError):
        pullback(f, OrePoly(ctx))
    with pytest.raises(biext.BiextError):
        pullback(OreMatrix.diag([f, f]), OreMatrix([[one]]))


def test_apply_batch_matches_act():
    ctx = make_field(2, 1)
    K = make_field(2, 4)
    Phi = T(ctx) + OrePoly.scalar(ctx, ctx.one)
    X = np.array([[x.coeffs] for x in K.elements()])
    out = biext.apply_batch(Phi, X, K)
    for row, x in zip(out, K.elements()):
        assert tuple(int(v) for v in row[0]) == act(Phi.change_ring(K), x).coeffs


# report ---------------------------------------------------------------------------------------


def test_report_is_sorted_and_complete():
    f = ore.random_skew(make_field(3, 1), 1, 2)
    M = metric_from_skew(f)
    rep = biext.report(M, mgrp.witt_class(M.metric), mgrp.gauss_sum(M.metric))
    assert rep["kernel_size"] == 9 and rep["witt_class"] == "NormForm"
    elems = [e[0] for e in rep["q"]]
    assert elems == sorted(elems) and len(elems) == 9
    assert all(e[2] in (1, 3) for e in rep["q"])
    assert rep["gauss_sum"] == mgrp.CycInt.from_int(3, -3).to_json()
