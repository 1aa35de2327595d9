"""Brute-force analysis of finite groups: closure, derived series,
abelianization and the commutator decomposition oracle.

Everything here enumerates elements, so it refuses infinite backends up
front instead of running into the closure bound.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClosureOverflowError,
    DecompositionNotFoundError,
    GroupError,
    NotInDerivedSubgroupError,
)
from .groups import EffectiveGroup, commutator

DEFAULT_CLOSURE_BOUND = 10**6
MAX_DECOMPOSITION_LENGTH = 4


def _require_finite(G: EffectiveGroup):
    if not G.is_finite:
        raise GroupError(f"{G.backend} backend is not finite; closure is never attempted")


def subgroup_closure(G: EffectiveGroup, gens, bound: int = DEFAULT_CLOSURE_BOUND) -> list:
    """Elements of ``gp(gens)`` in breadth-first discovery order."""
    _require_finite(G)
    gens = [G.check(g) for g in gens]
    steps = gens + [G._inv(g) for g in gens]
    e = G.identity()
    seen = {e}
    order = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for s in steps:
            y = G._mul(x, s)
            if y not in seen:
                if len(seen) >= bound:
                    raise ClosureOverflowError(f"closure exceeds the bound of {bound} elements")
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def group_elements(G, bound=DEFAULT_CLOSURE_BOUND):
    return subgroup_closure(G, G.generators, bound)


def normal_closure(G, normalizer_gens, gens, bound=DEFAULT_CLOSURE_BOUND) -> list:
    """Smallest subgroup containing ``gens`` and closed under conjugation by ``normalizer_gens``."""
    current = subgroup_closure(G, gens, bound)
    members = set(current)
    pool = list(gens)
    changed = True
    while changed:
        changed = False
        for n in list(pool):
            for h in normalizer_gens:
                c = G._mul(G._mul(G._inv(h), n), h)
                if c not in members:
                    pool.append(c)
                    current = subgroup_closure(G, pool, bound)
                    members = set(current)
                    changed = True
    return current


def small_generating_set(G, elements) -> list:
    """Greedy generating set for the subgroup whose elements are given."""
    gens, span = [], {G.identity()}
    for x in elements:
        if x not in span:
            gens.append(x)
            span = set(subgroup_closure(G, gens))
    return gens


def derived_subgroup(G, elements, gens=None, bound=DEFAULT_CLOSURE_BOUND) -> list:
    if gens is None:
        gens = small_generating_set(G, elements)
    comms = []
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            c = commutator(G, x, y)
            if c != G.identity():
                comms.append(c)
    if not comms:
        return [G.identity()]
    return normal_closure(G, gens, comms, bound)


def derived_series(G: EffectiveGroup, bound: int = DEFAULT_CLOSURE_BOUND, verify: bool = True) -> list:
    """``[G, G', G'', ...]`` as element lists, ending with the trivial group."""
    _require_finite(G)
    term = group_elements(G, bound)
    series = [term]
    while len(term) > 1:
        nxt = derived_subgroup(G, term, bound=bound)
        if verify and len(term) <= 400:
            _verify_commutator_products(G, term, nxt)
        if len(nxt) == len(term):
            break  # perfect term; the series stabilises
        series.append(nxt)
        term = nxt
    return series


def _verify_commutator_products(G, term, nxt):
    comms = {commutator(G, x, y) for x in term for y in term}
    span = set(subgroup_closure(G, list(comms)))
    if span != set(nxt):
        raise GroupError("derived series term is not generated by commutators of the previous term")


def derived_length(G: EffectiveGroup, bound: int = DEFAULT_CLOSURE_BOUND):
    """Derived length, or ``None`` when the group is not solvable."""
    series = derived_series(G, bound)
    if len(series[-1]) != 1:
        return None
    return len(series) - 1


# -- abelianization ------------------------------------------------------

@dataclass
class AbelianizationData:
    free_rank: int
    free_basis: list = field(default_factory=list)
    torsion: list = field(default_factory=list)  # (preimage u_j, order l_j)
    projection: object = None  # g -> (free coords..., torsion coords...) when known

    @property
    def torsion_orders(self):
        return [l for _, l in self.torsion]

    def project(self, g):
        if self.projection is None:
            raise GroupError("no projection map for a declared abelianization")
        return self.projection(g)


def smith_normal_form(rows):
    """Return ``(diag, V, V_inv)`` with ``U @ A @ V = D`` for some unimodular ``U``."""
    A = [list(r) for r in rows]
    n = len(A)
    m = len(A[0]) if n else 0
    V = [[int(i == j) for j in range(m)] for i in range(m)]
    Vi = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(n, m)):
        while True:
            entries = [(abs(A[r][c]), r, c) for r in range(t, n) for c in range(t, m) if A[r][c]]
            if not entries:
                break
            _, r, c = min(entries)
            A[t], A[r] = A[r], A[t]
            if c != t:
                swap_cols(t, c)
            p = A[t][t]
            for r in range(t + 1, n):
                q = A[r][t] // p
                if q:
                    A[r] = [x - q * y for x, y in zip(A[r], A[t])]
            for c in range(t + 1, m):
                q = A[t][c] // p
                if q:
                    add_col(c, t, -q)
            if any(A[r][t] for r in range(t + 1, n)) or any(A[t][c] for c in range(t + 1, m)):
                continue
            bad = next((r for r in range(t + 1, n) for c in range(t + 1, m) if A[r][c] % p), None)
            if bad is not None:
                A[t] = [x + y for x, y in zip(A[t], A[bad])]
                continue
            break
    diag = [abs(A[i][i]) if i < n else 0 for i in range(m)]
    return diag, V, Vi


def abelianization(G: EffectiveGroup, bound: int = DEFAULT_CLOSURE_BOUND) -> AbelianizationData:
    """``G/G'`` as a product of cyclic factors with chosen preimages."""
    _require_finite(G)
    elements = group_elements(G, bound)
    dsub = derived_subgroup(G, elements, gens=list(G.generators) or None, bound=bound) if G.generators else [G.identity()]
    dset = set(dsub)
    coset = {}
    cid = -1
    for x in elements:
        if x in coset:
            continue
        cid += 1
        for n in dsub:
            coset[G._mul(x, n)] = cid
    gens = list(G.generators)
    k = len(gens)
    # triangular relation basis: n_i e_i - (expression of g_i^{n_i} in earlier generators)
    span = {coset[G.identity()]: (0,) * k}
    span_rep = {coset[G.identity()]: G.identity()}
    relations = []
    for i, g in enumerate(gens):
        x, n = g, 1
        while coset[x] not in span:
            x = G._mul(x, g)
            n += 1
        v = list(span[coset[x]])
        row = [-a for a in v]
        row[i] += n
        relations.append(row)
        new_span, new_rep = dict(span), dict(span_rep)
        for cid, vec in span.items():
            y = span_rep[cid]
            for j in range(1, n):
                y = G._mul(y, g)
                w = list(vec)
                w[i] += j
                new_span.setdefault(coset[y], tuple(w))
                new_rep.setdefault(coset[y], y)
        span, span_rep = new_span, new_rep
    if k == 0:
        return AbelianizationData(0, [], [], lambda g: ())
    diag, V, Vi = smith_normal_form(relations)
    torsion, keep = [], []
    for j, d in enumerate(diag):
        if d == 1:
            continue
        if d == 0:
            raise GroupError("finite group produced a free abelianization factor")
        pre = G.identity()
        for i, e in enumerate(Vi[j]):
            pre = G._mul(pre, G.power(gens[i], e))
        torsion.append((pre, d))
        keep.append(j)

    def project(g, _span=span, _coset=coset, _V=V, _keep=keep, _diag=diag):
        x = _span[_coset[G.check(g)]]
        y = [sum(x[i] * _V[i][j] for i in range(k)) for j in range(k)]
        return tuple(y[j] % _diag[j] for j in _keep)

    data = AbelianizationData(0, [], torsion, project)
    data.derived_subgroup = dset
    return data


def verify_declared_orders(G, data: AbelianizationData, dsub=None):
    """Check that ``u_j^{l_j}`` lies in ``G'`` (finite backends only)."""
    if dsub is None:
        dsub = set(derived_subgroup(G, group_elements(G)))
    bad = []
    for u, l in data.torsion:
        if G.power(u, l) not in dsub:
            bad.append((u, l))
    return bad


# -- commutator decomposition oracle --------------------------------------

@dataclass
class CommutatorDecomposition:
    target: object
    factors: list  # pairs (u, v) of group elements

    @property
    def length(self):
        return len(self.factors)

    def evaluate(self, G):
        return G.product(commutator(G, u, v) for u, v in self.factors)


def commutator_decomposition_oracle(G: EffectiveGroup, g, bound=DEFAULT_CLOSURE_BOUND,
                                    max_length: int = MAX_DECOMPOSITION_LENGTH) -> CommutatorDecomposition:
    """Shortest product of commutators ``[u, v]`` equal to ``g`` (breadth-first)."""
    _require_finite(G)
    G.check(g)
    elements = group_elements(G, bound)
    dsub = set(derived_subgroup(G, elements, bound=bound))
    if g not in dsub:
        raise NotInDerivedSubgroupError(f"{G.format(g)} is not in the derived subgroup")
    e = G.identity()
    if g == e:
        return CommutatorDecomposition(g, [])
    single = {}
    for u in elements:
        for v in elements:
            c = commutator(G, u, v)
            single.setdefault(c, (u, v))
    reached = {e: None}
    frontier = [e]
    for _ in range(max_length):
        nxt = []
        for x in frontier:
            for c, pair in single.items():
                y = G._mul(x, c)
                if y not in reached:
                    reached[y] = (x, pair)
                    nxt.append(y)
        if g in reached:
            factors = []
            y = g
            while reached[y] is not None:
                y, pair = reached[y]
                factors.append(pair)
            factors.reverse()
            dec = CommutatorDecomposition(g, factors)
            assert dec.evaluate(G) == g
            return dec
        frontier = nxt
    raise DecompositionNotFoundError(f"no product of at most {max_length} commutators equals {G.format(g)}")


# -- relators and finite-index data -------------------------------------

def check_relations(presentation, images, carrier) -> bool:
    return first_failing_relator(presentation, images, carrier) is None


def first_failing_relator(presentation, images, carrier):
    """Index of the first relator not evaluating to the identity, else ``None``."""
    images = list(images)
    if len(images) != presentation.generator_count:
        raise GroupError(f"presentation has {presentation.generator_count} generators, got {len(images)} images")
    ident = carrier.identity()
    for i, w in enumerate(presentation.relators):
        if not carrier.eq(w.evaluate(carrier, images), ident):
            return i
    return None


def canonical_words(G, bound=DEFAULT_CLOSURE_BOUND) -> dict:
    """Shortest word (generator letters, exponent +-1) for every element."""
    _require_finite(G)
    words = {G.identity(): ()}
    queue = deque([G.identity()])
    steps = [(i, 1, g) for i, g in enumerate(G.generators)] + [(i, -1, G._inv(g)) for i, g in enumerate(G.generators)]
    while queue:
        x = queue.popleft()
        for i, e, s in steps:
            y = G._mul(x, s)
            if y not in words:
                if len(words) >= bound:
                    raise ClosureOverflowError(f"closure exceeds the bound of {bound} elements")
                words[y] = words[x] + ((i, e),)
                queue.append(y)
    return words


def multiplication_table_presentation(G, bound=DEFAULT_CLOSURE_BOUND):
    """Relators ``w_g w_h w_gh^-1`` over all element pairs: sound and complete for finite G."""
    from .words import Presentation, Word

    words = canonical_words(G, bound)
    elements = list(words)
    rels = []
    for g in elements:
        for h in elements:
            w = Word.from_letters(words[g]) * Word.from_letters(words[h]) * Word.from_letters(words[G._mul(g, h)]).inverse()
            if w.letters:
                rels.append(w)
    return Presentation(len(G.generators), tuple(dict.fromkeys(rels)), G.names)


def finite_index_subgroup_data(G: EffectiveGroup, data: AbelianizationData) -> list:
    """Generating data ``{a_i} + generators of G'`` of ``K = gp(a_i, G')``.

    Returns ``(role, element)`` pairs.  For infinite backends the derived
    subgroup is described by the nontrivial commutators of generator pairs,
    which generate it only up to normal closure.
    """
    out = [("free", a) for a in data.free_basis]
    if G.is_finite:
        elements = group_elements(G)
        dsub = derived_subgroup(G, elements)
        out += [("derived", g) for g in small_generating_set(G, dsub)]
        return out
    seen = set()
    gens = list(G.generators)
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            c = commutator(G, x, y)
            if c != G.identity() and c not in seen:
                seen.add(c)
                out.append(("derived", c))
    return out


def commutator_pairs_generate_derived(G, bound=DEFAULT_CLOSURE_BOUND) -> bool:
    """Whether ``gp([g_m, g_m'])`` (no normal closure) already equals ``G'``."""
    elements = group_elements(G, bound)
    dsub = set(derived_subgroup(G, elements, bound=bound))
    gens = list(G.generators)
    comms = [commutator(G, x, y) for x in gens for y in gens]
    return set(subgroup_closure(G, comms, bound)) == dsub


def exponent(G, bound=DEFAULT_CLOSURE_BOUND) -> int:
    from math import lcm
    from .groups import element_order

    out = 1
    for g in group_elements(G, bound):
        out = lcm(out, element_order(G, g, bound))
    return out


# -- dense codes ---------------------------------------------------------

class FiniteCodec:
    """Element <-> small-integer code map with a Cayley table, for dense storage."""

    def __init__(self, G: EffectiveGroup, elements):
        self.group = G
        self.elements = list(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        n = len(self.elements)
        table = np.empty((n, n), dtype=np.int32)
        for i, x in enumerate(self.elements):
            for j, y in enumerate(self.elements):
                try:
                    table[i, j] = self.index[G._mul(x, y)]
                except KeyError:
                    raise GroupError("codec elements are not closed under multiplication") from None
        self.table = table
        self.inverse = np.array([self.index[G._inv(x)] for x in self.elements], dtype=np.int32)
        self.identity_code = self.index[G.identity()]

    @classmethod
    def for_group(cls, G, bound=4096):
        return cls(G, group_elements(G, bound))

    @classmethod
    def for_elements(cls, G, gens, bound=4096):
        if G.is_finite:
            return cls(G, subgroup_closure(G, gens, bound))
        # infinite backends: only cyclic subgroups of finite order are enumerated
        from .groups import element_order

        gens = [g for g in gens if g != G.identity()]
        if len(gens) > 1:
            raise GroupError("dense storage over an infinite backend needs a single finite-order generator")
        elems = [G.identity()]
        if gens:
            n = element_order(G, gens[0], bound)
            elems = [G.power(gens[0], i) for i in range(n)]
        return cls(G, elems)

    def __len__(self):
        return len(self.elements)

    def encode(self, g) -> int:
        try:
            return self.index[g]
        except KeyError:
            raise GroupError(f"{self.group.format(g)} is outside the dense codec") from None

    def decode(self, code):
        return self.elements[int(code)]
