import itertools
from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from wreathembed import finite
from wreathembed.errors import ClosureOverflowError, NotInDerivedSubgroupError
from wreathembed.groups import CyclicGroup, PermutationGroup, commutator
from wreathembed.specfile import dihedral_group, quaternion_group, symmetric_group


def brute_closure(G, gens):
    """Independent oracle: iterate products until nothing new appears."""
    seen = {G.identity()}
    while True:
        new = {G.mul(x, g) for x in seen for g in gens} | seen
        if new == seen:
            return seen
        seen = new


def brute_derived(G, elements):
    comms = {commutator(G, x, y) for x in elements for y in elements}
    return brute_closure(G, list(comms))


GROUPS = {
    "S3": symmetric_group(3),
    "S4": symmetric_group(4),
    "Q8": quaternion_group(),
    "D4": dihedral_group(4),
    "D5": dihedral_group(5),
    "Z6": CyclicGroup(6),
    "Z2xZ2": PermutationGroup(4, ["(1 2)", "(3 4)"]),
}
# (order, derived length, abelianization invariants, exponent), known by hand
KNOWN = {
    "S3": (6, 2, [2], 6),
    "S4": (24, 3, [2], 12),
    "Q8": (8, 2, [2, 2], 4),
    "D4": (8, 2, [2, 2], 4),
    "D5": (10, 2, [2], 10),
    "Z6": (6, 1, [6], 6),
    "Z2xZ2": (4, 1, [2, 2], 2),
}


@pytest.mark.parametrize("name", GROUPS)
def test_known_invariants(name):
    G = GROUPS[name]
    order, dl, inv, e = KNOWN[name]
    assert len(finite.group_elements(G)) == order
    assert finite.derived_length(G) == dl
    ab = finite.abelianization(G)
    assert ab.free_rank == 0 and ab.torsion_orders == inv
    assert finite.exponent(G) == e


@pytest.mark.parametrize("name", GROUPS)
def test_closure_and_derived_match_brute_force(name):
    G = GROUPS[name]
    elements = finite.group_elements(G)
    assert set(elements) == brute_closure(G, list(G.generators))
    assert set(finite.derived_subgroup(G, elements)) == brute_derived(G, elements)
    series = finite.derived_series(G)
    for a, b in zip(series, series[1:]):
        assert set(b) == brute_derived(G, a)


@pytest.mark.parametrize("name", GROUPS)
def test_abelianization_projection(name):
    G = GROUPS[name]
    ab = finite.abelianization(G)
    elements = finite.group_elements(G)
    dsub = set(finite.derived_subgroup(G, elements))
    assert prod(ab.torsion_orders) == len(elements) // len(dsub)
    orders = ab.torsion_orders
    # homomorphism onto the product of cyclic groups with kernel G'
    for g, h in itertools.product(elements, repeat=2):
        pg, ph, pgh = ab.project(g), ab.project(h), ab.project(G.mul(g, h))
        assert all((a + b - c) % l == 0 for a, b, c, l in zip(pg, ph, pgh, orders))
    kernel = {g for g in elements if all(c % l == 0 for c, l in zip(ab.project(g), orders))}
    assert kernel == dsub
    # the torsion preimages have the declared coordinates
    for j, (u, _) in enumerate(ab.torsion):
        assert [c % l for c, l in zip(ab.project(u), orders)] == [int(i == j) for i in range(len(orders))]


@pytest.mark.parametrize("name", ["S3", "S4", "Q8", "D5"])
def test_commutator_decompositions(name):
    G = GROUPS[name]
    elements = finite.group_elements(G)
    for g in finite.derived_subgroup(G, elements):
        dec = finite.commutator_decomposition_oracle(G, g)
        assert dec.evaluate(G) == g
    outside = next(g for g in elements if g not in set(finite.derived_subgroup(G, elements)))
    with pytest.raises(NotInDerivedSubgroupError):
        finite.commutator_decomposition_oracle(G, outside)


def test_s3_rotations_are_single_commutators():
    G = GROUPS["S3"]
    for g in finite.derived_subgroup(G, finite.group_elements(G)):
        assert finite.commutator_decomposition_oracle(G, g).length <= 1


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form(rows):
    diag, V, Vi = finite.smith_normal_form(rows)
    # V is unimodular with the given inverse
    n = len(V)
    assert [[sum(V[i][k] * Vi[k][j] for k in range(n)) for j in range(n)] for i in range(n)] == \
        [[int(i == j) for j in range(n)] for i in range(n)]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    # product of invariant factors is |det|
    (a, b, c), (d, e, f), (g, h, i) = rows
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det:
        assert prod(diag) == abs(det)


def test_smith_normal_form_textbook():
    assert finite.smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])[0] == [2, 6, 12]


def test_multiplication_table_presentation_holds():
    G = GROUPS["S3"]
    P = finite.multiplication_table_presentation(G)
    assert finite.check_relations(P, G.generators, G)
    # the same relators fail on generators of a non-isomorphic image
    Z6 = CyclicGroup(6)
    assert finite.first_failing_relator(P, [3, 2], Z6) is not None


def test_closure_bound():
    with pytest.raises(ClosureOverflowError):
        finite.group_elements(symmetric_group(5), bound=50)


def test_codec_table_is_group_law():
    G = GROUPS["Q8"]
    codec = finite.FiniteCodec.for_group(G)
    for i, j in itertools.product(range(len(codec)), repeat=2):
        assert codec.decode(codec.table[i, j]) == G.mul(codec.decode(i), codec.decode(j))
    assert all(codec.table[i, codec.inverse[i]] == codec.identity_code for i in range(len(codec)))


def test_commutator_pairs_generate_derived():
    assert finite.commutator_pairs_generate_derived(GROUPS["S3"])
    assert finite.commutator_pairs_generate_derived(GROUPS["Q8"])
