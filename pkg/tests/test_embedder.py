import pytest

from wreathembed import basefun as bf
from wreathembed.embedder import (
    GroupData, build_witness, corrupt_witness, route_domain_points, theorem5_size, witness_dump,
)
from wreathembed.errors import CapacityError, EmbeddingError
from wreathembed.groups import commutator
from wreathembed.seqtools import arithmetic_progression
from wreathembed.specfile import heisenberg, symmetric_group, z_times_z2
from wreathembed.words import evaluate


def value(w, term_text):
    from wreathembed.words import parse_term

    return evaluate(parse_term(term_text), w.W, w.env())


def test_theorem1_layout_on_heisenberg():
    data = heisenberg()
    x, y, z = data.group.generators
    w = build_witness("1", data)
    # slots 2, 4 carry the free basis, 8 and 16 the commutator factors of z
    assert w.d.support == {(2,): x, (4,): y, (8,): x, (16,): y}
    assert len(w.h_gens) == 2


def test_theorem1_recovered_values_by_hand():
    data = heisenberg()
    G = data.group
    x, y, z = G.generators
    w = build_witness("1", data)
    W = w.W
    # conjugating by c^n moves the support point k to k - n
    a1 = value(w, "d^(c^2)")
    assert a1.base.support == {(0,): x, (2,): y, (6,): x, (14,): y}
    # the shifted copies overlap only at 0, where they carry x and y
    g = value(w, "[d^(c^8), d^(c^16)]")
    assert W.is_base(g) and g.base.support == {(0,): z}
    images = [evaluate(t, W, w.env()) for t in w.generator_words]
    assert [W.project_at_identity(r) for r in images] == [x, y, z]


def test_arithmetic_progression_breaks_recovery():
    data = heisenberg()
    G = data.group
    x, y, z = G.generators
    w = build_witness("1", data, sequence=arithmetic_progression(4))
    g = value(w, "[d^(c^3), d^(c^4)]")
    # equal gaps make the shifted copies overlap at three points
    assert g.base.support == {(-2,): z, (-1,): G.inv(z), (0,): z}


def test_theorem1_rejects_torsion():
    with pytest.raises(EmbeddingError):
        build_witness("1", z_times_z2())


def test_theorem3_slice_bookkeeping():
    data = z_times_z2()
    G = data.group
    a, u = G.generators
    w = build_witness("3", data)
    assert w.info["slots"] == {"F": [2], "I": [4], "M": [8, 16]}
    assert set(w.d.slices) == {2, 4, 8, 16}
    box = ((-8, 8),) * 3
    sub = w.W.active.drop_axis(0)
    # a~1 = d^(c^4): slices moved down by 4, constant a on slice 0
    a1 = value(w, "d^(c^4)")
    assert set(a1.base.slices) == {-2, 0, 4, 12}
    assert bf.exact_equal(a1.base.slice(0), bf.ConstFunction(sub, G, a))
    # u~1 = [d, b2]^(c^2): only the distinguisher slice has a b2-derivative, equal to u
    u1 = value(w, "[d, b2]^(c^2)")
    want = bf.SlicedFunction(w.W.active, G, {0: bf.ConstFunction(sub, G, u)})
    assert bf.window_equal(u1.base, want, box)
    # g~1,2 = [a, u] = 1 because G is abelian
    g = value(w, "[d^(c^8), d^(c^16)]")
    assert bf.window_equal(g.base, bf.identity_function(w.W.active, G), box)


def test_theorem5_sizes():
    assert theorem5_size([2]) == 2
    assert theorem5_size([2, 2]) == 4
    assert theorem5_size([2, 3]) == 36
    assert theorem5_size([]) == 1


@pytest.mark.parametrize("name,points", [("Z2", 16), ("Z3", 81), ("Z4", 256), ("Z2xZ2", 256), ("S3", 36**4)])
def test_route_domain_points(catalogue, name, points):
    assert route_domain_points("5", catalogue(name)) == points


def test_theorem5_generators_recovered_exactly(catalogue):
    data = catalogue("Z2xZ2")
    w = build_witness("5", data)
    W = w.W
    assert W.active.orders == (16, 4, 4)
    for g, t in zip(data.group.generators, w.generator_words):
        r = evaluate(t, W, w.env())
        want = bf.SlicedFunction(W.active, data.group, {0: bf.ConstFunction(W.active.drop_axis(0), data.group, g)})
        assert W.is_base(r) and bf.exact_equal(r.base, want)


def test_exponent_route_z3_layout(catalogue):
    w = build_witness("cor6", catalogue("Z3"))
    assert w.W.active.orders == (9, 3, 3)
    assert w.info["exponent_bound"] == 27


def test_exponent_route_z2xz2_slots_collide(catalogue):
    # 2, 4, 8, 16 modulo 8: the last two both land on 0
    with pytest.raises(CapacityError) as exc:
        build_witness("cor6", catalogue("Z2xZ2"))
    assert exc.value.suggested_modulus is not None and exc.value.suggested_modulus > 8


def test_corrupt_witness_changes_one_value(catalogue):
    w = build_witness("5", catalogue("Z2"))
    bad = corrupt_witness(w, (0, 0, 0))
    G = w.data.group
    assert bad.d_element.base.eval((0, 0, 0)) != w.d.eval((0, 0, 0))
    assert bad.d_element.base.eval((2, 1, 1)) == w.d.eval((2, 1, 1))
    assert bad.recovery is w.recovery
    assert bad.d_element.base.eval((0, 0, 0)) == G.mul(w.d.eval((0, 0, 0)), G.generators[0])
    with pytest.raises(EmbeddingError):
        corrupt_witness(build_witness("5", catalogue("trivial")), (0, 0, 0))


def test_from_finite_decomposes_generators():
    G = symmetric_group(3)
    data = GroupData.from_finite(G, "S3")
    assert data.derived_length == 2
    assert [l for _, l in data.torsion] == [2]
    s, r = G.generators
    for g, dec in zip(G.generators, data.decompositions):
        assert dec.evaluate(G, data.free, [u for u, _ in data.torsion]) == g
    # r lies in the derived subgroup, so its decomposition is a commutator product
    dec = data.decompositions[1]
    assert dec.commutators and not any(dec.torsion)
    assert G.product(commutator(G, a, b) for a, b in dec.commutators) == r


def test_bad_decomposition_rejected():
    data = heisenberg()
    data.decompositions = data.decompositions[:2] + (data.decompositions[0],)
    with pytest.raises(EmbeddingError):
        build_witness("1", data)


def test_unknown_route(catalogue):
    with pytest.raises(EmbeddingError):
        build_witness("7", catalogue("Z2"))


def test_witness_dump_lists_support():
    text = witness_dump(build_witness("1", heisenberg()))
    assert text.startswith("# G Wr (Z), H = gp(c, d)")
    assert "(16) -> " in text
