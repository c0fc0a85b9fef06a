import random

import pytest
from hypothesis import given, strategies as st

from skewbiext import gf, ore
from skewbiext.gf import make_field
from skewbiext.ore import OreMatrix, OrePoly, act, adjoint, is_skew, is_weakly_skew

from oracles import NaiveField, brute_root_count, naive_act


def T(ctx, e=1):
    return OrePoly.tau(ctx, e)


def S(ctx, c):
    return OrePoly.scalar(ctx, ctx(c))


def ore_strategy(ctx, lo=-2, hi=2):
    coeff = st.lists(st.integers(0, ctx.p - 1), min_size=ctx.N, max_size=ctx.N).map(ctx)
    return st.dictionaries(st.integers(lo, hi), coeff, max_size=4).map(lambda d: OrePoly(ctx, d))


F9 = make_field(3, 2)
F4 = make_field(2, 2)


def test_twist_relation():
    for a in F9.elements():
        assert T(F9) * OrePoly.scalar(F9, a) == OrePoly.monomial(F9, gf.frobenius(a), 1)


def test_unit_and_commuting_example():
    f = T(F9, 2) * S(F9, [1, 1]) + T(F9, -1)
    assert f * S(F9, 1) == f
    F3 = make_field(3, 1)
    one = S(F3, 1)
    want = T(F3, 2) - one
    assert (T(F3) + one) * (T(F3) - one) == want
    assert (T(F3) - one) * (T(F3) + one) == want


def test_adjoint_examples():
    assert adjoint(T(F9)) == T(F9, -1)
    c = F9([2, 1])
    assert adjoint(OrePoly.scalar(F9, c)) == OrePoly.scalar(F9, c)
    for j in (1, 2, 3):
        m = OrePoly.monomial(F9, c, j)
        assert adjoint(m) == OrePoly.monomial(F9, F9.frobenius_power(c, -j), -j)
        # (c tau^j)* = (tau^j)* c*
        assert adjoint(m) == adjoint(T(F9, j)) * adjoint(OrePoly.scalar(F9, c))


@given(st.data())
def test_adjoint_is_an_involutive_antiautomorphism(data):
    ctx = make_field(5, 2)
    f, g = data.draw(ore_strategy(ctx)), data.draw(ore_strategy(ctx))
    assert adjoint(f * g) == adjoint(g) * adjoint(f)
    assert adjoint(adjoint(f)) == f
    assert adjoint(f + g) == adjoint(f) + adjoint(g)


@given(st.data())
def test_multiplication_is_associative(data):
    ctx = make_field(2, 3)
    f, g, h = (data.draw(ore_strategy(ctx)) for _ in range(3))
    assert (f * g) * h == f * (g * h)


def test_weak_skewness_examples():
    c = OrePoly.scalar(F9, F9([1, 2]))
    assert is_weakly_skew(c * T(F9) - T(F9, -1) * c)
    assert is_weakly_skew(S(F4, [1, 1]))
    assert not is_weakly_skew(S(make_field(3, 1), 1))


def test_skewness_examples():
    c = OrePoly.scalar(F9, F9([0, 1]))
    for n in (1, 2, 3):
        assert is_skew(c * T(F9, n) - T(F9, -n) * c)
    assert not is_skew(S(F4, [1, 1]))
    assert is_skew(OrePoly(F9))


@given(st.data())
def test_skew_implies_weakly_skew_and_odd_converse(data):
    for ctx in (make_field(3, 2), make_field(2, 2)):
        f = data.draw(ore_strategy(ctx))
        w = f - adjoint(f)
        assert is_weakly_skew(w)
        if ctx.p % 2:
            assert is_skew(w)
        s = ore.random_skew(ctx, 2, data.draw(st.integers(0, 10 ** 6)))
        assert is_weakly_skew(s)
    # for p = 2 a scalar is weakly skew without being skew
    assert is_weakly_skew(S(F4, 1)) and not is_skew(S(F4, 1))


@pytest.mark.parametrize("p,m,n", [(2, 1, 3), (3, 2, 2), (5, 1, 1), (7, 3, 2)])
def test_random_skew_contract(p, m, n):
    ctx = make_field(p, m)
    for seed in range(5):
        f = ore.random_skew(ctx, n, seed)
        assert is_skew(f)
        assert f.hi == n and f.lo == -n
        assert f == ore.random_skew(ctx, n, seed)


def test_act_examples():
    F81 = make_field(3, 4)
    rng = random.Random(0)
    for _ in range(10):
        x = F81.random(rng)
        assert act(T(F81), x) == gf.frobenius(x)
        assert act(S(F81, 1), x) == x
    F3 = make_field(3, 1)
    f = T(F3) - T(F3, -1)
    zeros = [x for x in F81.elements() if not act(f, x)]
    assert len(zeros) == 9
    assert all(F81.frobenius_power(x, 2) == x for x in zeros)


@given(st.data())
def test_act_is_a_ring_homomorphism(data):
    ctx = make_field(2, 2)
    K = make_field(2, 6)
    f, g = data.draw(ore_strategy(ctx)), data.draw(ore_strategy(ctx))
    x = K.random(random.Random(data.draw(st.integers(0, 10 ** 6))))
    y = K.random(random.Random(data.draw(st.integers(0, 10 ** 6))))
    assert act(f * g, x) == act(f, act(g, x))
    assert act(f + g, x) == act(f, x) + act(g, x)
    assert act(f, x + y) == act(f, x) + act(f, y)


def test_act_matrix_matches_naive_evaluation():
    ctx = make_field(3, 2)
    K = make_field(3, 4)
    f = ore.random_skew(ctx, 2, 4)
    ref = NaiveField(3, K.modulus)
    coeffs = {i: gf.embed(ctx, K, c).coeffs for i, c in f.terms.items()}
    for x in list(K.elements())[:40]:
        assert act(f, x).coeffs == naive_act(ref, coeffs, x.coeffs)


def test_kernel_examples():
    F3 = make_field(3, 1)
    K, basis = ore.kernel(T(F3) - T(F3, -1))
    assert K.N == 2 and len(basis) == 2
    K, basis = ore.kernel(T(F3))
    assert basis == []
    with pytest.raises(ore.ZeroKernelError):
        ore.kernel(OrePoly(F3))


@pytest.mark.parametrize("p,m,n", [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 1), (3, 1, 2), (5, 1, 1)])
def test_kernel_against_brute_force(p, m, n):
    ctx = make_field(p, m)
    for seed in range(3):
        f = ore.random_skew(ctx, n, seed)
        K, basis = ore.kernel(f)
        assert len(basis) == 2 * n
        for b in basis:
            assert not act(f, b)
        if K.order <= 6561:
            ref = NaiveField(p, K.modulus)
            coeffs = {i: gf.embed(ctx, K, c).coeffs for i, c in f.terms.items()}
            assert brute_root_count(ref, coeffs) == p ** (2 * n)


def _brute_splitting_degree(f):
    """Least s (multiple of m) whose field holds p^(hi-lo) roots, by enumeration."""
    ctx = f.ctx
    want = ctx.p ** (f.hi - f.lo)
    s = ctx.N
    while True:
        K = make_field(ctx.p, s)
        ref = NaiveField(ctx.p, K.modulus)
        coeffs = {i: gf.embed(ctx, K, c).coeffs for i, c in f.terms.items()}
        if brute_root_count(ref, coeffs) == want:
            return s
        s += ctx.N


@pytest.mark.parametrize("p,m,n,seeds", [(2, 1, 1, 4), (2, 1, 2, 4), (2, 2, 1, 3), (3, 1, 1, 4)])
def test_splitting_degree_against_enumeration(p, m, n, seeds):
    ctx = make_field(p, m)
    for seed in range(seeds):
        f = ore.random_skew(ctx, n, seed)
        assert ore.splitting_degree(f) == _brute_splitting_degree(f)


def test_roots_in_subfield_exponent():
    ctx = make_field(2, 1)
    f = ore.random_skew(ctx, 2, 1)
    for s in range(1, 7):
        K = make_field(2, s)
        ref = NaiveField(2, K.modulus)
        coeffs = {i: gf.embed(ctx, K, c).coeffs for i, c in f.terms.items()}
        assert 2 ** ore.roots_in_subfield_exponent(f, s) == brute_root_count(ref, coeffs)


def test_splitting_cap():
    ctx = make_field(5, 1)
    f = ore.random_skew(ctx, 3, 7)
    with pytest.raises(ore.SplittingCapError):
        ore.splitting_degree(f, max_ext=2)


def test_kernel_via_callable_spans_the_same_space():
    ctx = make_field(3, 1)
    f = ore.random_skew(ctx, 2, 9)
    K, b1 = ore.kernel(f)
    _, b2 = ore.kernel_via_callable(f)
    assert gf.rank_mod([b.coeffs for b in b1] + [b.coeffs for b in b2], 3) == len(b1)


@given(st.data())
def test_right_divide_contract(data):
    ctx = make_field(3, 2)
    a, b = data.draw(ore_strategy(ctx)), data.draw(ore_strategy(ctx))
    if b.is_zero():
        with pytest.raises(ZeroDivisionError):
            ore.right_divide(a, b)
        return
    q, r = ore.right_divide(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.hi < b.hi
    q2, r2 = ore.right_divide(a * b, b)
    assert r2.is_zero() and q2 == a


def test_right_divide_by_one():
    f = ore.random_skew(F9, 2, 0)
    q, r = ore.right_divide(f, S(F9, 1))
    assert q == f and r.is_zero()


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_kernel_sizes_multiply_and_match_adjoint(s1, s2):
    ctx = make_field(2, 2)
    rng = random.Random(s1)
    f = ore.random_ore(ctx, -1, 1, rng)
    g = ore.random_ore(ctx, 0, 1, random.Random(s2))
    _, bf = ore.kernel(f)
    _, bg = ore.kernel(g)
    _, bfg = ore.kernel(f * g)
    assert len(bf) + len(bg) == len(bfg)
    _, bstar = ore.kernel(adjoint(f))
    assert len(bstar) == len(bf)


def test_matrix_adjoint_and_skewness():
    rng = random.Random(1)
    ctx = make_field(3, 1)
    W = OreMatrix([[ore.random_ore(ctx, -1, 2, rng) for _ in range(3)] for _ in range(3)])
    F = W - ore.m_adjoint(W)
    assert ore.is_skew_matrix(F)
    assert ore.m_adjoint(ore.m_adjoint(W)) == W
    assert ore.m_adjoint(W)[0, 1] == adjoint(W[1, 0])
    g = ore.random_ore(ctx, -1, 1, rng)
    Z = OrePoly(ctx)
    assert ore.is_skew_matrix(OreMatrix([[Z, g], [-adjoint(g), Z]]))
    P = OreMatrix.diag([S(F4, 1), OrePoly(F4)])
    assert not ore.is_skew_matrix(P)


def test_matrix_multiplication_is_associative():
    rng = random.Random(2)
    ctx = make_field(2, 2)
    A, B, C = (OreMatrix([[ore.random_ore(ctx, -1, 1, rng) for _ in range(2)] for _ in range(2)])
               for _ in range(3))
    assert (A * B) * C == A * (B * C)
    assert ore.m_adjoint(A * B) == ore.m_adjoint(B) * ore.m_adjoint(A)


def test_json_round_trip():
    f = ore.random_skew(F9, 3, 5)
    js = f.to_json()
    assert [t["e"] for t in js["terms"]] == sorted(t["e"] for t in js["terms"])
    assert ore.ore_from_json(js) == f
    M = OreMatrix.diag([f, f], kernel_size=3 ** 12)
    back = ore.matrix_from_json(M.to_json())
    assert back == M and back.kernel_size == 3 ** 12
    with pytest.raises(ore.OreError):
        ore.ore_from_json({"p": 3, "m": 1, "terms": [{"e": 1, "c": [1]}, {"e": 1, "c": [2]}]})
