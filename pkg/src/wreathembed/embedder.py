"""Witness construction for the 2- and 4-generator wreath embeddings.

Four routes are provided:

* ``theorem1``: ``G Wr Z`` with ``H = gp(c, d)``; needs a free abelianization.
* ``theorem3``: ``G Wr Z^3`` with ``H = gp(c, b1, b2, d)``; free plus torsion
  abelianization, distinguisher slices for the torsion generators.
* ``theorem5``: ``G wr (Z_{s^2} x Z_s x Z_s)`` for finite ``G``, fully exact.
* ``cor6``: as ``theorem5`` with active group ``Z_{e^{m+1}} x Z_e x Z_e``.

Each builder returns an :class:`EmbeddingWitness`: the generators of ``H``,
formal recovery words over them, and the value each recovery word should
take, derived from the support layout rather than from the evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

from . import basefun as bf
from . import finite
from .errors import EmbeddingError
from .groups import EffectiveGroup, commutator, element_order
from .seqtools import SupportAssignment, plan_supports
from .words import Comm, Conj, Gen, Inv, One, Pow, Presentation, Prod, Term
from .wreath import CARTESIAN, DIRECT, WreathGroup

THEOREMS = ("1", "3", "5", "cor6")
DEFAULT_BOX_1D = ((-16, 16),)
DEFAULT_BOX_3D = ((-8, 8),) * 3


# -- group input ---------------------------------------------------------

@dataclass(frozen=True)
class GeneratorDecomposition:
    """``g = prod a_i^free[i] * prod u_j^torsion[j] * prod [x_q, y_q]``."""

    free: tuple = ()
    torsion: tuple = ()
    commutators: tuple = ()  # pairs of group elements

    def evaluate(self, G, free_basis, torsion_gens):
        out = G.identity()
        for a, e in zip(free_basis, self.free):
            out = G.mul(out, G.power(a, e))
        for u, e in zip(torsion_gens, self.torsion):
            out = G.mul(out, G.power(u, e))
        for x, y in self.commutators:
            out = G.mul(out, commutator(G, x, y))
        return out


@dataclass
class GroupData:
    """A group together with everything the builders need to know about it."""

    group: EffectiveGroup
    presentation: Presentation | None = None
    free: tuple = ()  # preimages a_i of a free abelian basis
    torsion: tuple = ()  # (u_j, l_j)
    decompositions: tuple = ()  # one GeneratorDecomposition per generator
    derived_length: int | None = None
    name: str = "G"
    fingerprint: str = ""

    @property
    def generators(self):
        return self.group.generators

    def check_decompositions(self):
        G = self.group
        if len(self.decompositions) != len(G.generators):
            raise EmbeddingError(f"need one decomposition per generator, got {len(self.decompositions)}")
        us = [u for u, _ in self.torsion]
        for m, (g, dec) in enumerate(zip(G.generators, self.decompositions)):
            if len(dec.free) > len(self.free) or len(dec.torsion) > len(us):
                raise EmbeddingError(f"decomposition of {G.names[m]} uses undeclared basis elements")
            if dec.evaluate(G, self.free, us) != g:
                raise EmbeddingError(f"declared decomposition of generator {G.names[m]} does not evaluate to it")

    @classmethod
    def from_finite(cls, G: EffectiveGroup, name="G", presentation=None, bound=finite.DEFAULT_CLOSURE_BOUND):
        """Abelianization, commutator decompositions and derived length, all computed."""
        data = finite.abelianization(G, bound)
        us = [u for u, _ in data.torsion]
        decs = []
        for g in G.generators:
            coords = list(data.project(g))
            prefix = G.product(G.power(u, e) for u, e in zip(us, coords))
            rest = G.mul(G.inv(prefix), g)
            dec = finite.commutator_decomposition_oracle(G, rest, bound)
            decs.append(GeneratorDecomposition((), tuple(coords), tuple(dec.factors)))
        out = cls(G, presentation, (), tuple(data.torsion), tuple(decs), finite.derived_length(G, bound), name)
        out.check_decompositions()
        return out


# -- witnesses -----------------------------------------------------------

@dataclass
class RecoveryWord:
    label: str
    term: Term
    expected: object  # WreathElement
    role: str = ""  # free | torsion | derived


@dataclass
class EmbeddingWitness:
    theorem: str
    data: GroupData
    W: WreathGroup
    h_names: tuple
    h_gens: tuple
    d: object  # intended base function of d
    layout: SupportAssignment
    recovery: list
    generator_words: tuple  # R(g_m) as terms over H
    info: dict = field(default_factory=dict)

    def env(self) -> dict:
        return dict(zip(self.h_names, self.h_gens))

    @property
    def d_element(self):
        return self.h_gens[self.h_names.index("d")]


def _c_pow(n):
    return Pow(Gen("c"), n) if n != 1 else Gen("c")


def _conj_c(term, n):
    return Conj(term, _c_pow(n)) if n else term


def _word_product(factors):
    factors = [f for f in factors if not isinstance(f, One)]
    if not factors:
        return One()
    return factors[0] if len(factors) == 1 else Prod(tuple(factors))


def _power_term(term, e):
    if e == 0:
        return One()
    if e == 1:
        return term
    if e == -1:
        return Inv(term)
    return Pow(term, e)


def distinguisher_word(j: int, t: int) -> Term:
    """``[d, b2; j, b1; t - j]`` (the ``b1`` block is omitted when ``t = j``)."""
    out = Comm(Gen("d"), Gen("b2"), j)
    if t - j:
        out = Comm(out, Gen("b1"), t - j)
    return out


def _shift_keys(f: bf.BaseFunction, n: int, A: bf.ActiveGroup):
    """Bookkeeping form of ``f^{c^n}`` for a sparse or sliced ``f``: every key moves to ``key - n``."""
    if isinstance(f, bf.SparseFunction):
        return bf.SparseFunction(A, f.target, {A.add(p, A.unit(0, -n)): v for p, v in f.support.items()})
    return bf.SlicedFunction(A, f.target, {k - n: s for k, s in f.slices.items()})


def _const_slice(A, G, value):
    sub = A.drop_axis(0)
    return bf.SlicedFunction(A, G, {0: bf.ConstFunction(sub, G, value)})


# -- two-generator route -------------------------------------------------

def build_theorem1_witness(data: GroupData, sequence=None, box=None) -> EmbeddingWitness:
    """``G Wr Z``: ``d`` carries ``a_i`` on the A-slots and the commutator
    factors ``x_q``, ``y_q`` on the U- and V-slots; identity elsewhere."""
    G = data.group
    if data.torsion:
        raise EmbeddingError("the two-generator route needs a free abelianization; use --theorem 3 for torsion")
    data.check_decompositions()
    pairs = []  # (generator index, x, y)
    for m, dec in enumerate(data.decompositions):
        pairs += [(m, x, y) for x, y in dec.commutators]
    layout = plan_supports({"A": len(data.free), "U": len(pairs), "V": len(pairs)}, sequence)
    A = bf.ActiveGroup((None,), ("c",))
    W = WreathGroup(G, A, CARTESIAN, box or DEFAULT_BOX_1D)
    support = {}
    for i, a in enumerate(data.free):
        support[(layout.slot("A", i),)] = a
    for q, (_, x, y) in enumerate(pairs):
        support[(layout.slot("U", q),)] = x
        support[(layout.slot("V", q),)] = y
    d = bf.SparseFunction(A, G, support)
    c_el, d_el = W.active_element(0), W.base_element(d)

    recovery = []
    a_terms = []
    for i in range(len(data.free)):
        s = layout.slot("A", i)
        term = _conj_c(Gen("d"), s)
        a_terms.append(term)
        recovery.append(RecoveryWord(f"a~{i + 1}", term, W.base_element(_shift_keys(d, s, A)), "free"))
    g_terms = []
    q = 0
    for m, dec in enumerate(data.decompositions):
        factors = []
        for x, y in dec.commutators:
            factors.append(Comm(_conj_c(Gen("d"), layout.slot("U", q)), _conj_c(Gen("d"), layout.slot("V", q))))
            q += 1
        term = _word_product(factors)
        g_terms.append(term)
        if factors:
            value = G.product(commutator(G, x, y) for x, y in dec.commutators)
            expected = W.base_element(bf.SparseFunction(A, G, {A.identity(): value}))
            recovery.append(RecoveryWord(f"g'~{G.names[m]}", term, expected, "derived"))
    gen_words = []
    for m, dec in enumerate(data.decompositions):
        parts = [_power_term(a_terms[i], e) for i, e in enumerate(dec.free)]
        gen_words.append(_word_product(parts + [g_terms[m]]))
    info = {
        "active_group": "Z",
        "slots": {name: list(layout.slots(name)) for name in layout.classes},
        "sequence": list(layout.sequence.terms[: layout.total]),
    }
    return EmbeddingWitness("1", data, W, ("c", "d"), (c_el, d_el), d, layout, recovery, tuple(gen_words), info)


# -- four-generator routes ------------------------------------------------

def _four_generator_witness(data, W, torsion, free, gens, layout, sub_distinguisher):
    """Shared assembly for the ``c, b1, b2, d`` routes."""
    G = data.group
    A = W.active
    sub = A.drop_axis(0)
    t = len(torsion)
    slices = {}
    for j in range(t):
        slices[layout.slot("F", j)] = sub_distinguisher(torsion[j], j + 1, t)
    for i, a in enumerate(free):
        slices[layout.slot("I", i)] = bf.ConstFunction(sub, G, a)
    for m, g in enumerate(gens):
        slices[layout.slot("M", m)] = bf.ConstFunction(sub, G, g)
    if len(set(A.reduce((k, 0, 0))[0] for k in slices)) != len(slices):
        raise EmbeddingError("two support slices of d coincide on the cyclic c-axis")
    d = bf.SlicedFunction(A, G, slices)
    h = (W.active_element(0), W.active_element(1), W.active_element(2), W.base_element(d))

    recovery = []
    u_terms, a_terms = [], []
    for j in range(t):
        term = _conj_c(distinguisher_word(j + 1, t), layout.slot("F", j))
        u_terms.append(term)
        recovery.append(RecoveryWord(f"u~{j + 1}", term, W.base_element(_const_slice(A, G, torsion[j])), "torsion"))
    for i in range(len(free)):
        s = layout.slot("I", i)
        term = _conj_c(Gen("d"), s)
        a_terms.append(term)
        recovery.append(RecoveryWord(f"a~{i + 1}", term, W.base_element(_shift_keys(d, s, A)), "free"))
    g_terms = {}
    for m in range(len(gens)):
        for n in range(m + 1, len(gens)):
            term = Comm(_conj_c(Gen("d"), layout.slot("M", m)), _conj_c(Gen("d"), layout.slot("M", n)))
            g_terms[(m, n)] = term
            value = commutator(G, gens[m], gens[n])
            recovery.append(RecoveryWord(f"g~{m + 1},{n + 1}", term, W.base_element(_const_slice(A, G, value)), "derived"))
    return d, h, recovery, u_terms, a_terms, g_terms


def _comm_term(g_terms, gens, G, x, y):
    """Term for ``[x, y]`` when ``x, y`` are generators (or the pair is trivial)."""
    idx = {g: m for m, g in reversed(list(enumerate(gens)))}
    if x not in idx or y not in idx:
        raise EmbeddingError(
            f"the four-generator route needs commutators of generators, got [{G.format(x)}, {G.format(y)}]"
        )
    m, n = idx[x], idx[y]
    if m == n:
        return One()
    return g_terms[(m, n)] if m < n else Inv(g_terms[(n, m)])


def build_theorem3_witness(data: GroupData, sequence=None, box=None) -> EmbeddingWitness:
    """``G Wr (Z x Z^2)`` with distinguishers on slices ``c_1..c_t``, constants
    ``a_i`` on the I-slots and ``g_m`` on the M-slots."""
    G = data.group
    data.check_decompositions()
    torsion = [u for u, _ in data.torsion]
    for u, l in data.torsion:
        if element_order(G, u) % l:
            raise EmbeddingError(f"declared order {l} does not divide the order of {G.format(u)}")
    gens = list(G.generators)
    layout = plan_supports({"F": len(torsion), "I": len(data.free), "M": len(gens)}, sequence)
    A = bf.ActiveGroup((None, None, None), ("c", "b1", "b2"))
    W = WreathGroup(G, A, CARTESIAN, box or DEFAULT_BOX_3D)
    sub = A.drop_axis(0)

    def dist(u, j, t):
        return bf.grid_distinguisher(G, u, j, t, sub)

    d, h, recovery, u_terms, a_terms, g_terms = _four_generator_witness(
        data, W, torsion, list(data.free), gens, layout, dist
    )
    gen_words = []
    for dec in data.decompositions:
        parts = [_power_term(a_terms[i], e) for i, e in enumerate(dec.free)]
        parts += [_power_term(u_terms[j], e) for j, e in enumerate(dec.torsion)]
        parts += [_comm_term(g_terms, gens, G, x, y) for x, y in dec.commutators]
        gen_words.append(_word_product(parts))
    info = {
        "active_group": "Z x Z x Z",
        "slots": {name: list(layout.slots(name)) for name in layout.classes},
        "sequence": list(layout.sequence.terms[: layout.total]),
    }
    return EmbeddingWitness("3", data, W, ("c", "b1", "b2", "d"), h, d, layout, recovery, tuple(gen_words), info)


def theorem5_size(orders) -> int:
    """``s = lcm(l_1^m, ..., l_m^m)`` for ``m`` generators of the given orders."""
    m = len(orders)
    return lcm(*(l**m for l in orders)) if orders else 1


def _finite_route(theorem, data, c_order, grid_order, sequence, extra):
    G = data.group
    if not G.is_finite:
        raise EmbeddingError("finite orders required: this route needs a finite group backend")
    gens = list(G.generators)
    m = len(gens)
    layout = plan_supports({"F": m, "M": m}, sequence, modulus=c_order)
    A = bf.ActiveGroup((c_order, grid_order, grid_order), ("c", "b1", "b2"))
    W = WreathGroup(G, A, DIRECT)
    sub = A.drop_axis(0)

    def dist(u, j, t):
        return bf.grid_distinguisher(G, u, j, t, sub)

    d, h, recovery, u_terms, _, _ = _four_generator_witness(data, W, gens, [], gens, layout, dist)
    info = {
        "active_group": f"Z_{c_order} x Z_{grid_order} x Z_{grid_order}",
        "domain_points": A.size,
        "slots": {name: [s % c_order for s in layout.slots(name)] for name in layout.classes},
        "sequence": list(layout.sequence.terms[: layout.total]),
        **extra,
    }
    return EmbeddingWitness(theorem, data, W, ("c", "b1", "b2", "d"), h, d, layout, recovery, tuple(u_terms), info)


def _as_data(G_or_data):
    if isinstance(G_or_data, GroupData):
        return G_or_data
    return GroupData.from_finite(G_or_data)


def build_theorem5_witness(G_or_data, sequence=None) -> EmbeddingWitness:
    """Exact witness in ``G wr (Z_{s^2} x Z_s x Z_s)``; the generators ``u_j`` of
    ``G`` are recovered directly as ``[d, b2; j, b1; m-j]^{c^{2^j}}``."""
    data = _as_data(G_or_data)
    G = data.group
    if not G.is_finite:
        raise EmbeddingError("finite orders required: this route needs a finite group backend")
    orders = [element_order(G, g) for g in G.generators]
    s = theorem5_size(orders)
    return _finite_route("5", data, s * s, s, sequence, {"s": s, "generator_orders": orders})


def build_corollary6_witness(G_or_data, sequence=None) -> EmbeddingWitness:
    """As :func:`build_theorem5_witness` over ``Z_{e^{m+1}} x Z_e x Z_e``, ``e`` the exponent of ``G``."""
    data = _as_data(G_or_data)
    G = data.group
    if not G.is_finite:
        raise EmbeddingError("finite orders required: this route needs a finite group backend")
    e = finite.exponent(G)
    m = len(G.generators)
    extra = {"exponent": e, "s": e ** (m + 1), "exponent_bound": e ** (m + 2)}
    return _finite_route("cor6", data, e ** (m + 1), e, sequence, extra)


def build_witness(theorem: str, data: GroupData, sequence=None, box=None) -> EmbeddingWitness:
    theorem = str(theorem)
    if theorem == "1":
        return build_theorem1_witness(data, sequence, box)
    if theorem == "3":
        return build_theorem3_witness(data, sequence, box)
    if theorem == "5":
        return build_theorem5_witness(data, sequence)
    if theorem == "cor6":
        return build_corollary6_witness(data, sequence)
    raise EmbeddingError(f"unknown route {theorem!r}; choose one of {', '.join(THEOREMS)}")


def corrupt_witness(w: EmbeddingWitness, point, value=None) -> EmbeddingWitness:
    """Copy of ``w`` whose generator ``d`` has ``value`` at ``point``; the
    expected recovery values stay those of the intended layout.

    Without a ``value`` the current one is multiplied by the first
    nontrivial generator, so the corruption always changes something.
    """
    W, G = w.W, w.data.group
    A = W.active
    point = A.reduce(tuple(point))
    d = w.d
    if value is None:
        g = next((g for g in G.generators if g != G.identity()), None)
        if g is None:
            raise EmbeddingError("the trivial group admits no corruption")
        value = G.mul(d.eval(point), g)
    if isinstance(d, bf.SparseFunction):
        support = dict(d.support)
        support[point] = value
        bad = bf.SparseFunction(A, G, support)
    elif isinstance(d, bf.SlicedFunction):
        sub = d.sub
        old = d.slice(point[0])
        q = point[1:]
        patch = bf.SparseFunction(sub, G, {q: G.mul(G.inv(old.eval(sub.reduce(q))), value)})
        if sub.is_finite:
            patch = bf.to_dense(patch, bf.shared_codec(G) if G.is_finite else None)
        slices = dict(d.slices)
        slices[point[0]] = bf.pointwise_mul(old, patch)
        bad = bf.SlicedFunction(A, G, slices)
    else:
        raise EmbeddingError(f"cannot corrupt a {d.describe()}")
    h = tuple(W.base_element(bad) if n == "d" else g for n, g in zip(w.h_names, w.h_gens))
    info = dict(w.info, corrupted_point=list(point))
    return EmbeddingWitness(w.theorem, w.data, W, w.h_names, h, w.d, w.layout, w.recovery, w.generator_words, info)


def route_domain_points(theorem: str, data: GroupData) -> int | None:
    """Size of the finite active group a route would use (``None`` for infinite routes)."""
    G = data.group
    if str(theorem) not in ("5", "cor6") or not G.is_finite:
        return None
    m = len(G.generators)
    if str(theorem) == "5":
        s = theorem5_size([element_order(G, g) for g in G.generators])
        return s**4
    e = finite.exponent(G)
    return e ** (m + 1) * e * e


def witness_dump(w: EmbeddingWitness) -> str:
    """Support of ``d`` as ``(coordinates) -> element`` lines, slice by slice."""
    W, d = w.W, w.d
    G = w.data.group
    lines = [f"# {W.description}, H = gp({', '.join(w.h_names)})"]
    if isinstance(d, bf.SparseFunction):
        for p in sorted(d.support):
            lines.append(f"({', '.join(map(str, p))}) -> {G.format(d.support[p])}")
        return "\n".join(lines) + "\n"
    sub = d.sub
    box = sub.default_box() if sub.is_finite else tuple(W.box[1:])
    for k in sorted(d.slices):
        lines.append(f"# slice c^{k}: {d.slices[k].describe()}")
        for row in bf.dump(d.slices[k], box).splitlines():
            lines.append(f"({k}, {row[1:]}")
    return "\n".join(lines) + "\n"
