"""Acceptance gate: one test group per criterion, summarized as PASS/FAIL lines
at the end of the pytest run (see ``conftest.py``)."""

import itertools
import json
import random
import resource
import time

import pytest

from wreathembed import basefun as bf
from wreathembed.certify import CHECK_NAMES, certify, verify_witness
from wreathembed.embedder import build_witness, corrupt_witness
from wreathembed.groups import CyclicGroup
from wreathembed.seqtools import arithmetic_progression, is_strictly_uneven, powers_of_two
from wreathembed.specfile import heisenberg, z_times_z2
from wreathembed.wreath import WreathGroup

Z = bf.ActiveGroup((None,), ("b",))
Z2 = bf.ActiveGroup((None, None), ("b1", "b2"))
PASSING = {}  # certificates collected for criterion 9


def criterion(n, text):
    return pytest.mark.criterion(n, text)


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.seconds < self.limit, f"took {self.seconds:.1f} s, limit {self.limit} s"


# -- 1 -------------------------------------------------------------------------

@criterion(1, "discrete calculus: integral/derivative inverse pair, uniqueness, iterated-commutator identities")
def test_c1_discrete_calculus():
    rng = random.Random(1)
    with Clock(5):
        for order in (None, 2, 3, 6):
            G = CyclicGroup(order)
            n = order or 1000
            for _ in range(25):
                support = {(rng.randint(-40, 40),): rng.randrange(n) for _ in range(rng.randint(0, 8))}
                d = bf.SparseFunction(Z, G, support)
                start = rng.randrange(n)
                x = bf.discrete_integral(d, start)
                assert bf.exact_equal(bf.discrete_derivative(x), d)
                # uniqueness: every solution is the recurrence from its value at 0
                y = {0: start}
                for i in range(50):
                    y[i + 1] = G.mul(y[i], d.eval((i,)))
                    y[-i - 1] = G.mul(y[-i], G.inv(d.eval((-i - 1,))))
                assert all(x.eval((i,)) == y[i] for i in range(-50, 51))
        box = ((-32, 32),)
        for order in (None, 2, 3, 6):
            G = CyclicGroup(order)
            W = WreathGroup(G, Z, box=box)
            b = W.active_element(0)
            for k in range(1, 5):
                for i in range(k + 1):
                    got = W.iterated_commutator(W.base_element(bf.iterated_integral(G, 1, i)), b, k)
                    want = bf.ConstFunction(Z, G, 1 if i == k else 0)
                    assert W.is_base(got) and bf.window_equal(got.base, want, box), (order, i, k)


# -- 2 -------------------------------------------------------------------------

@criterion(2, "periodic descent and finite iterated integrals, exhaustive over l <= 4, r <= 3, t <= 3")
def test_c2_periodic_descent():
    with Clock(10):
        for l, r in itertools.product((2, 3, 4), (1, 2, 3)):
            G = CyclicGroup(l)
            for pattern in itertools.product(range(l), repeat=r):
                d = bf.PowerRule(Z, G, 1, lambda p, pat=pattern: pat[p[0] % r], l)
                x = bf.periodic_descent(d, r, 1, pattern[0])
                over_z = bf.discrete_integral(d, pattern[0])
                n = l * r
                assert all(over_z.eval((i,)) == over_z.eval((i + n,)) for i in range(-2 * n, 2 * n))
                assert bf.exact_equal(bf.discrete_derivative(x), bf.fold(d, n))
        for l, t in itertools.product((2, 3, 4), (1, 2, 3)):
            G = CyclicGroup(l)
            for k in range(1, t + 1):
                f = bf.finite_iterated_integral(G, 1, k, t)
                below = bf.finite_iterated_integral(G, 1, k - 1, t)
                assert bf.exact_equal(bf.discrete_derivative(f), below)
                A = f.active
                W = WreathGroup(G, A)
                got = W.iterated_commutator(W.base_element(f), W.active_element(0), k)
                assert bf.exact_equal(got.base, bf.ConstFunction(A, G, 1))
                for i in range(k):
                    low = W.base_element(bf.finite_iterated_integral(G, 1, i, t))
                    assert W.is_identity(W.iterated_commutator(low, W.active_element(0), k))


# -- 3 -------------------------------------------------------------------------

def _grid(W, f, j, t):
    x = W.base_element(f)
    if j:
        x = W.iterated_commutator(x, W.active_element(1), j)
    if t - j:
        x = W.iterated_commutator(x, W.active_element(0), t - j)
    return x


@criterion(3, "distinguisher matrix for t <= 3 on [-16, 16]^2 and exactly over Z_s^2, s in {4, 8, 9}")
def test_c3_distinguishers():
    with Clock(30):
        G = CyclicGroup(None)
        box = ((-16, 16),) * 2
        W = WreathGroup(G, Z2, box=box)
        for t in (1, 2, 3):
            for i, j in itertools.product(range(1, t + 1), repeat=2):
                got = _grid(W, bf.grid_distinguisher(G, 1, i, t, Z2), j, t)
                assert bf.window_equal(got.base, bf.ConstFunction(Z2, G, 1 if i == j else 0), box)
        for s, l in ((4, 2), (8, 2), (9, 3)):
            G = CyclicGroup(l)
            A = bf.ActiveGroup((s, s), ("b1", "b2"))
            W = WreathGroup(G, A)
            for t in (1, 2, 3):
                for i, j in itertools.product(range(1, t + 1), repeat=2):
                    got = _grid(W, bf.grid_distinguisher(G, 1, i, t, A), j, t)
                    assert bf.exact_equal(got.base, bf.ConstFunction(A, G, 1 if i == j else 0)), (s, t, i, j)


# -- 4 -------------------------------------------------------------------------

def _oracle(terms, modulus):
    s = (None,) + tuple(terms)
    n = len(terms)
    pairs = [(i, j) for j in range(1, n + 1) for i in range(1, n - j + 1)]
    for (i, j), (k, l) in itertools.product(pairs, repeat=2):
        if (i, j) != (k, l) and (s[i + j] - s[j] - s[k + l] + s[l]) % modulus == 0:
            return False
    return True


@criterion(4, "strict unevenness: powers of two pass, progressions fail, modular check matches a brute-force oracle")
def test_c4_sequences():
    with Clock(10):
        assert is_strictly_uneven(powers_of_two(12))
        for n, a, step in itertools.product(range(3, 13), range(1, 8), range(1, 8)):
            assert not is_strictly_uneven(arithmetic_progression(n, a, step))
        # exhaustive on a corner of the domain, seeded sample over the rest
        for n in range(1, 7):
            for terms in itertools.combinations(range(1, 13), n):
                for m in range(1, 33):
                    assert bool(is_strictly_uneven(terms, m)) == _oracle(terms, m), (terms, m)
        rng = random.Random(4)
        for _ in range(20000):
            terms = sorted(rng.sample(range(1, 65), rng.randint(1, 6)))
            m = rng.randint(1, 256)
            assert bool(is_strictly_uneven(terms, m)) == _oracle(terms, m), (terms, m)


# -- 5 -------------------------------------------------------------------------

@criterion(5, "exact finite-route certificates for Z2, Z3, Z2xZ2, Z4 (extended tier: S3)")
def test_c5_finite_route(catalogue):
    with Clock(10):
        for name in ("Z2", "Z3", "Z2xZ2", "Z4"):
            cert = certify("5", catalogue(name))
            assert cert.verdict_label == "pass (exact)", (name, cert.verdict_label)
            assert [c.name for c in cert.checks] == list(CHECK_NAMES)
            assert cert.statistics["domain_points"] <= 1296
            PASSING[f"5/{name}"] = cert


@criterion(5, "exact finite-route certificates for Z2, Z3, Z2xZ2, Z4 (extended tier: S3)")
def test_c5_extended_s3(catalogue):
    with Clock(300):
        cert = certify("5", catalogue("S3"))
    assert cert.statistics["domain_points"] == 1_679_616
    assert cert.verdict_label == "pass (exact)", cert.verdict_label
    assert resource.getrusage(resource.RUSAGE_SELF).ru_maxrss < 2 * 2**20  # KiB on Linux
    PASSING["5/S3"] = cert


# -- 6 -------------------------------------------------------------------------

@criterion(6, "exponent route for Z2xZ2 over Z_8 x Z_2 x Z_2, sampled orders dividing 16")
def test_c6_exponent_route(catalogue):
    with Clock(10):
        cert = certify("cor6", catalogue("Z2xZ2"))
    assert cert.passed, cert.verdict_label + ": " + cert.checks[0].detail
    assert cert.check("exponent_bound").detail == "100 sampled H-element orders divide 16"
    PASSING["cor6/Z2xZ2"] = cert


# -- 7 -------------------------------------------------------------------------

@criterion(7, "two-generator window certificate for the Heisenberg group on [-16, 16]")
def test_c7_heisenberg():
    with Clock(30):
        cert = certify("1", heisenberg(), box=((-16, 16),))
    assert cert.verdict_label == "pass (window-verified at box [[-16, 16]])", cert.verdict_label
    assert "g'~z" in [r["label"] for r in cert.statistics["recovery_words"]]
    assert cert.check("relators").passed and cert.check("injectivity").passed
    assert cert.check("exponent_sum_audit").detail.startswith("50 words")
    PASSING["1/Heisenberg"] = cert


# -- 8 -------------------------------------------------------------------------

@criterion(8, "four-generator window certificate for Z x Z2 on [-8, 8]^3 with slice bookkeeping")
def test_c8_z_times_z2():
    from wreathembed.words import evaluate

    box = ((-8, 8),) * 3
    with Clock(60):
        data = z_times_z2()
        w = build_witness("3", data, box=box)
        G = data.group
        a, u = G.generators
        sub = w.W.active.drop_axis(0)
        # hand bookkeeping: slots F = 2, I = 4, M = 8, 16; conjugating by c^n moves slice k to k - n
        values = {r.label: evaluate(r.term, w.W, w.env()) for r in w.recovery}
        assert set(values["a~1"].base.slices) == {-2, 0, 4, 12}
        assert bf.exact_equal(values["a~1"].base.slice(0), bf.ConstFunction(sub, G, a))
        want_u = bf.SlicedFunction(w.W.active, G, {0: bf.ConstFunction(sub, G, u)})
        assert bf.window_equal(values["u~1"].base, want_u, box)
        assert bf.window_equal(values["g~1,2"].base, bf.identity_function(w.W.active, G), box)
        cert = verify_witness(w, box=box)
    assert cert.passed, cert.verdict_label
    PASSING["3/ZxZ2"] = cert


# -- 9 -------------------------------------------------------------------------

@criterion(9, "every passing certificate: 100 H-commutators are base elements; dl(H) <= dl(G) + 1 recorded")
def test_c9_variety(catalogue):
    # make sure the certificates exist even when run alone
    for name in ("Z2", "Z3", "Z2xZ2", "Z4", "Q8", "S3"):
        PASSING.setdefault(f"5/{name}", certify("5", catalogue(name)))
    PASSING.setdefault("cor6/Z3", certify("cor6", catalogue("Z3")))
    PASSING.setdefault("1/Heisenberg", certify("1", heisenberg(), box=((-16, 16),)))
    PASSING.setdefault("3/ZxZ2", certify("3", z_times_z2(), box=((-8, 8),) * 3))
    passing = {k: c for k, c in PASSING.items() if c.passed}
    assert len(passing) >= 9
    for key, cert in passing.items():
        v = cert.check("variety")
        assert v.passed and v.detail.startswith("100 random commutators"), key
        dl = cert.statistics["derived_length_G"]
        assert dl is not None and cert.statistics["derived_length_H_bound"] == dl + 1, key


# -- 10 ------------------------------------------------------------------------

@criterion(10, "negative controls: corrupted support value and arithmetic-progression layout both fail")
def test_c10_negative_controls(catalogue):
    def corrupted():
        w = corrupt_witness(build_witness("5", catalogue("Z3")), (2, 1, 0))
        return verify_witness(w, seed=0)

    def progression():
        w = build_witness("1", heisenberg(), sequence=arithmetic_progression(4))
        return verify_witness(w, box=((-16, 16),), seed=0)

    for make in (corrupted, progression):
        first, second = make(), make()
        assert not first.passed
        assert first.to_json() == second.to_json()  # deterministic
        failing = [c for c in first.checks if not c.passed]
        assert failing and all(c.counterexample for c in failing)
        assert json.loads(first.to_json())["verdict"] == "fail"
