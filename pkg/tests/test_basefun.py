import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wreathembed import basefun as bf
from wreathembed.errors import BaseFunctionError, PeriodicityError
from wreathembed.groups import CyclicGroup
from wreathembed.specfile import symmetric_group
from wreathembed.wreath import WreathGroup

Z = bf.ActiveGroup((None,), ("b",))
Z2 = bf.ActiveGroup((None, None), ("b1", "b2"))
S3 = symmetric_group(3)


def exponent_oracle(n, k):
    """Exponent of the k-fold integral at n, by walking the recurrence
    e_k(0) = 1, e_k(x + 1) = e_k(x) + e_{k-1}(x), e_0 = 1."""
    if k == 0:
        return 1
    if n >= 0:
        return 1 + sum(exponent_oracle(x, k - 1) for x in range(n))
    return 1 - sum(exponent_oracle(x, k - 1) for x in range(n, 0))


def sparse(G, values):
    return bf.SparseFunction(Z, G, {(k,): v for k, v in values.items()})


# -- integrals and derivatives over Z -----------------------------------------

targets = [CyclicGroup(None), CyclicGroup(2), CyclicGroup(3), CyclicGroup(6)]


@pytest.mark.parametrize("G", targets, ids=lambda G: f"order-{G.order}")
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_derivative_inverts_integral(G, data):
    n = G.order or 50
    support = data.draw(st.dictionaries(st.integers(-20, 20), st.integers(0, n - 1), max_size=8))
    start = data.draw(st.integers(0, n - 1))
    d = sparse(G, support)
    x = bf.discrete_integral(d, start)
    box = ((-50, 50),)
    assert bf.window_equal(bf.discrete_derivative(x), d, box)
    assert x.eval((0,)) == start
    # uniqueness: the recurrence from the start value reproduces x
    vals = {0: start}
    for i in range(0, 50):
        vals[i + 1] = G.mul(vals[i], d.eval((i,)))
    for i in range(0, -50, -1):
        vals[i - 1] = G.mul(vals[i], G.inv(d.eval((i - 1,))))
    assert all(x.eval((i,)) == v for i, v in vals.items())


def test_integral_in_nonabelian_target():
    s, r = S3.generators
    d = sparse(S3, {0: s, 1: r, -2: r, 5: s})
    x = bf.discrete_integral(d, r)
    assert bf.window_equal(bf.discrete_derivative(x), d, ((-30, 30),))


@pytest.mark.parametrize("n,k", list(itertools.product(range(-12, 13), range(0, 5))))
def test_exponent_formula(n, k):
    assert bf.integral_exponent(n, k) == exponent_oracle(n, k)


def test_first_integral_values():
    # u^(1)(b^i) = u^(i+1)
    G = CyclicGroup(None)
    f = bf.iterated_integral(G, 1, 1)
    assert [f.eval((i,)) for i in range(-3, 4)] == [i + 1 for i in range(-3, 4)]


@pytest.mark.parametrize("G,u", [(CyclicGroup(None), 1), (CyclicGroup(6), 1), (S3, S3.generators[1])],
                         ids=["inf", "Z6", "S3"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_iterated_commutator_with_active_generator(G, u, k):
    W = WreathGroup(G, Z, box=((-32, 32),))
    b = W.active_element(0)
    for i in range(k + 1):
        x = W.base_element(bf.iterated_integral(G, u, i))
        got = W.iterated_commutator(x, b, k)
        want = bf.ConstFunction(Z, G, u if i == k else G.identity())
        assert W.is_base(got)
        assert bf.window_equal(got.base, want, ((-32, 32),)), (i, k)


# -- periodic descent ---------------------------------------------------------

def periodic(G, pattern):
    r = len(pattern)
    return bf.PowerRule(Z, G, 1, lambda p: pattern[p[0] % r], G.order, label="periodic")


@pytest.mark.parametrize("l", [2, 3, 4])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_periodic_descent_exhaustive(l, r):
    G = CyclicGroup(l)
    for pattern in itertools.product(range(l), repeat=r):
        d = periodic(G, pattern)
        start = pattern[0]
        x = bf.periodic_descent(d, r, 1, start)
        assert x.active.orders == (l * r,)
        over_z = bf.discrete_integral(d, start)
        assert all(over_z.eval((i,)) == over_z.eval((i + l * r,)) for i in range(-2 * l * r, 2 * l * r))
        assert bf.exact_equal(bf.discrete_derivative(x), bf.fold(d, l * r))


@pytest.mark.parametrize("l", [2, 3, 4])
@pytest.mark.parametrize("t", [1, 2, 3])
def test_finite_iterated_integrals(l, t):
    G = CyclicGroup(l)
    prev = None
    for k in range(t + 1):
        f = bf.finite_iterated_integral(G, 1, k, t)
        assert f.active.orders == (l**t,)
        assert f.eval((0,)) == 1
        for x in range(l**t):
            assert f.eval((x,)) == bf.integral_exponent(x, k) % l
        if prev is not None:
            assert bf.exact_equal(bf.discrete_derivative(f), prev)
        prev = f
    with pytest.raises(BaseFunctionError):
        bf.finite_iterated_integral(G, 1, t + 1, t)


def test_nonperiodic_integral_rejected():
    A = bf.ActiveGroup((4,), ("b",))
    G = CyclicGroup(3)
    d = bf.to_dense(bf.ConstFunction(A, G, 1), bf.shared_codec(G))
    with pytest.raises(PeriodicityError):
        bf.discrete_integral(d, 0)


# -- distinguishers -----------------------------------------------------------

def grid_check(W, f, j, t, box=None):
    b1, b2 = W.active_element(0), W.active_element(1)
    x = W.base_element(f)
    x = W.iterated_commutator(x, b2, j) if j else x
    x = W.iterated_commutator(x, b1, t - j) if t - j else x
    return x


@pytest.mark.parametrize("t", [1, 2, 3])
def test_distinguishers_infinite_order(t):
    G = CyclicGroup(None)
    box = ((-16, 16),) * 2
    W = WreathGroup(G, Z2, box=box)
    for i, j in itertools.product(range(1, t + 1), repeat=2):
        f = bf.grid_distinguisher(G, 1, i, t, Z2)
        got = grid_check(W, f, j, t)
        want = bf.ConstFunction(Z2, G, 1 if i == j else 0)
        assert W.is_base(got)
        assert bf.window_equal(got.base, want, box), (t, i, j)


@pytest.mark.parametrize("s,l,tmax", [(4, 2, 3), (8, 2, 3), (9, 3, 3), (8, 4, 2)])
def test_distinguishers_finite_grid(s, l, tmax):
    G = CyclicGroup(l)
    A = bf.ActiveGroup((s, s), ("b1", "b2"))
    W = WreathGroup(G, A)
    for t in range(1, tmax + 1):
        for i, j in itertools.product(range(1, t + 1), repeat=2):
            f = bf.grid_distinguisher(G, 1, i, t, A)
            got = grid_check(W, f, j, t)
            want = bf.ConstFunction(A, G, 1 if i == j else 0)
            assert bf.exact_equal(got.base, want), (s, t, i, j)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_distinguisher_two_routes_agree(t):
    G = CyclicGroup(None)
    for i in range(1, t + 1):
        a = bf.grid_distinguisher(G, 1, i, t, Z2)
        b = bf.distinguisher_by_integrals(G, 1, i, t, Z2)
        assert bf.window_equal(a, b, ((-10, 10),) * 2)


def test_distinguisher_rejects_bad_index():
    with pytest.raises(BaseFunctionError):
        bf.grid_distinguisher(CyclicGroup(None), 1, 0, 2)


# -- pointwise algebra --------------------------------------------------------

codes = st.integers(0, 5)


@settings(max_examples=50, deadline=None)
@given(st.lists(codes, min_size=24, max_size=24), st.lists(codes, min_size=24, max_size=24),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_dense_ops_match_pointwise(fa, ga, shift):
    codec = bf.shared_codec(S3)
    A = bf.ActiveGroup((4, 6), ("x", "y"))
    f = bf.DenseFunction(A, codec, np.array(fa, dtype=np.int32).reshape(4, 6))
    g = bf.DenseFunction(A, codec, np.array(ga, dtype=np.int32).reshape(4, 6))
    prod = bf.pointwise_mul(bf.shift(f, shift), g)
    inv = bf.pointwise_inv(f)
    for p in A.points():
        q = A.add(p, shift)
        assert prod.eval(p) == S3.mul(f.eval(q), g.eval(p))
        assert inv.eval(p) == S3.inv(f.eval(p))


@given(st.dictionaries(st.integers(-10, 10), st.integers(1, 5), max_size=6),
       st.dictionaries(st.integers(-10, 10), st.integers(1, 5), max_size=6), st.integers(-6, 6))
def test_sparse_ops_match_pointwise(fs, gs, b):
    G = CyclicGroup(6)
    f, g = sparse(G, fs), sparse(G, gs)
    h = bf.pointwise_mul(bf.shift(f, (b,)), g)
    assert h.exact
    for i in range(-25, 25):
        assert h.eval((i,)) == G.mul(f.eval((i + b,)), g.eval((i,)))


def test_sliced_functions_drop_trivial_slices():
    A = bf.ActiveGroup((None, None), ("c", "b"))
    G = CyclicGroup(5)
    sub = A.drop_axis(0)
    f = bf.SlicedFunction(A, G, {0: bf.ConstFunction(sub, G, 0), 3: bf.ConstFunction(sub, G, 2)})
    assert set(f.slices) == {3}
    assert f.eval((3, 17)) == 2 and f.eval((1, 0)) == 0
    g = bf.shift(f, (1, 0))
    assert set(g.slices) == {2}
    assert bf.exact_equal(bf.pointwise_mul(f, bf.pointwise_inv(f)), bf.identity_function(A, G))


def test_lazy_equality_needs_window():
    G = CyclicGroup(None)
    f = bf.iterated_integral(G, 1, 2)
    with pytest.raises(BaseFunctionError):
        bf.exact_equal(f, f)
    assert bf.functions_equal(f, f, ((-5, 5),))


def test_dump_format():
    G = CyclicGroup(3)
    out = bf.dump(sparse(G, {1: 2}), ((0, 1),))
    assert out == "(0) -> 1\n(1) -> u^2\n"
