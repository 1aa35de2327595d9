"""Functions from an abelian active group into a target group, and the
discrete calculus on them.

The active group is ``Z^a x Z_n1 x ...`` written additively as integer
tuples; an axis of order ``None`` is infinite cyclic.  The left shift
``f^b(x) = f(b x)`` becomes ``shift(f, b)(x) = f(x + b)``, and the discrete
derivative along an axis is the base part of ``[x, b]``:
``x(p)^-1 x(p + e_axis)``.

Representations:

``ConstFunction``, ``SparseFunction``, ``StepFunction`` (eventually constant
on ``Z``), ``DenseFunction`` (integer codes over a finite active group) and
``SlicedFunction`` (finitely many nontrivial slices along axis 0) support
exact equality.  Lazy nodes (shift, product, inverse, integral, power rule,
views) support only window equality.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass
from math import comb, prod

import numpy as np

from . import _kernels
from .errors import BaseFunctionError, GroupError, PeriodicityError
from .finite import FiniteCodec
from .groups import EffectiveGroup, element_order

DEFAULT_RADIUS = 32

_CODECS = weakref.WeakKeyDictionary()


def shared_codec(G: EffectiveGroup) -> FiniteCodec:
    """One codec per finite target group, so dense functions share a table."""
    if not G.is_finite:
        raise BaseFunctionError("a group-wide codec needs a finite target")
    codec = _CODECS.get(G)
    if codec is None:
        codec = _CODECS[G] = FiniteCodec.for_group(G, bound=1 << 16)
    return codec


def _codec_for(G, values):
    return shared_codec(G) if G.is_finite else FiniteCodec.for_elements(G, [v for v in values if v != G.identity()][:1])


# -- active groups -------------------------------------------------------

@dataclass(frozen=True)
class ActiveGroup:
    """Direct product of cyclic axes; ``None`` marks an infinite axis."""

    orders: tuple
    names: tuple = ()

    def __post_init__(self):
        if any(o is not None and o < 1 for o in self.orders):
            raise BaseFunctionError(f"bad axis orders {self.orders}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{i + 1}" for i in range(len(self.orders))))

    @classmethod
    def free(cls, rank, names=()):
        return cls((None,) * rank, tuple(names))

    @property
    def rank(self):
        return len(self.orders)

    @property
    def free_rank(self):
        return sum(o is None for o in self.orders)

    @property
    def is_finite(self):
        return all(o is not None for o in self.orders)

    @property
    def size(self):
        return prod(self.orders) if self.is_finite else None

    @property
    def shape(self):
        if not self.is_finite:
            raise BaseFunctionError("infinite active group has no array shape")
        return tuple(self.orders)

    def identity(self):
        return (0,) * self.rank

    def reduce(self, p):
        if len(p) != self.rank:
            raise BaseFunctionError(f"point {p} has dimension {len(p)}, active group has rank {self.rank}")
        return tuple(int(x) if o is None else int(x) % o for x, o in zip(p, self.orders))

    def add(self, p, q):
        return self.reduce(tuple(a + b for a, b in zip(p, q)))

    def neg(self, p):
        return self.reduce(tuple(-a for a in p))

    def unit(self, axis, n=1):
        p = [0] * self.rank
        p[axis] = n
        return self.reduce(tuple(p))

    def drop_axis(self, axis=0):
        keep = [i for i in range(self.rank) if i != axis]
        return ActiveGroup(tuple(self.orders[i] for i in keep), tuple(self.names[i] for i in keep))

    def default_box(self, radius=DEFAULT_RADIUS):
        return tuple((0, o - 1) if o is not None else (-radius, radius) for o in self.orders)

    def box_points(self, box=None):
        box = box or self.default_box()
        return itertools.product(*(range(lo, hi + 1) for lo, hi in box))

    def points(self):
        if not self.is_finite:
            raise BaseFunctionError("cannot enumerate an infinite active group")
        return itertools.product(*(range(o) for o in self.orders))

    def box_size(self, box):
        return prod(hi - lo + 1 for lo, hi in box)


Z1 = ActiveGroup((None,), ("b",))
Z2 = ActiveGroup((None, None), ("b1", "b2"))


# -- base class ----------------------------------------------------------

class BaseFunction:
    exact = True

    def __init__(self, active: ActiveGroup, target: EffectiveGroup):
        self.active = active
        self.target = target

    def eval(self, p):
        raise NotImplementedError

    def __call__(self, p):
        return self.eval(self.active.reduce(p))

    def describe(self) -> str:
        return type(self).__name__

    def __repr__(self):
        return f"<{self.describe()} on {self.active.orders}>"


def _same_space(f, g):
    if f.active != g.active:
        raise BaseFunctionError(f"active groups differ: {f.active.orders} vs {g.active.orders}")
    if f.target is not g.target:
        raise BaseFunctionError("target groups differ")


class ConstFunction(BaseFunction):
    def __init__(self, active, target, value):
        super().__init__(active, target)
        self.value = target.check(value)

    def eval(self, p):
        return self.value

    @property
    def is_identity(self):
        return self.value == self.target.identity()

    def describe(self):
        return f"const({self.target.format(self.value)})"


def identity_function(active, target):
    return ConstFunction(active, target, target.identity())


class SparseFunction(BaseFunction):
    """Finite support; identity elsewhere."""

    def __init__(self, active, target, support=None):
        super().__init__(active, target)
        e = target.identity()
        clean = {}
        for p, v in (support or {}).items():
            target.check(v)
            if v != e:
                clean[active.reduce(p)] = v
        self.support = clean

    def eval(self, p):
        return self.support.get(p, self.target.identity())

    def describe(self):
        return f"sparse({len(self.support)} points)"


class StepFunction(BaseFunction):
    """Eventually constant function on ``Z``: ``left`` below ``lo``, ``values``
    on ``lo .. lo+len-1`` and ``right`` from there on."""

    def __init__(self, target, left, lo, values, right, active=Z1):
        if active.orders != (None,):
            raise BaseFunctionError("step functions live on Z")
        super().__init__(active, target)
        self.left, self.lo, self.values, self.right = left, int(lo), tuple(values), right

    @property
    def hi(self):
        return self.lo + len(self.values)

    def eval(self, p):
        i = p[0]
        if i < self.lo:
            return self.left
        if i >= self.hi:
            return self.right
        return self.values[i - self.lo]

    def describe(self):
        return f"step([{self.lo}, {self.hi}))"


class DenseFunction(BaseFunction):
    """Full table of integer codes over a finite active group."""

    def __init__(self, active, codec: FiniteCodec, codes):
        if not active.is_finite:
            raise BaseFunctionError("dense storage needs a finite active group")
        super().__init__(active, codec.group)
        codes = np.ascontiguousarray(codes, dtype=np.int32)
        if codes.shape != active.shape:
            raise BaseFunctionError(f"code array shape {codes.shape} != {active.shape}")
        self.codec = codec
        self.codes = codes

    def eval(self, p):
        return self.codec.elements[int(self.codes[p])]

    def describe(self):
        return f"dense({self.active.size} points)"


class SlicedFunction(BaseFunction):
    """Finitely many nontrivial slices along axis 0; each slice is a function
    of the remaining axes."""

    def __init__(self, active, target, slices=None):
        super().__init__(active, target)
        self.sub = active.drop_axis(0)
        self.slices = {}
        for k, f in (slices or {}).items():
            if f.active != self.sub:
                raise BaseFunctionError("slice active group does not match")
            if isinstance(f, ConstFunction) and f.is_identity:
                continue
            if isinstance(f, SparseFunction) and not f.support:
                continue
            if isinstance(f, DenseFunction) and not np.any(f.codes != f.codec.identity_code):
                continue
            key = active.reduce((k,) + self.sub.identity())[0]
            self.slices[key] = f

    @property
    def exact(self):
        return all(f.exact for f in self.slices.values())

    def eval(self, p):
        f = self.slices.get(p[0])
        return self.target.identity() if f is None else f.eval(p[1:])

    def slice(self, k):
        return self.slices.get(k) or identity_function(self.sub, self.target)

    def describe(self):
        return f"sliced({sorted(self.slices)})"


# -- lazy nodes ----------------------------------------------------------

class LazyFunction(BaseFunction):
    exact = False

    def __init__(self, active, target):
        super().__init__(active, target)
        self._memo = {}

    def eval(self, p):
        try:
            return self._memo[p]
        except KeyError:
            v = self._compute(p)
            self._memo[p] = v
            return v

    def _compute(self, p):
        raise NotImplementedError


class ShiftNode(LazyFunction):
    def __init__(self, f, b):
        super().__init__(f.active, f.target)
        self.f, self.b = f, f.active.reduce(b)

    def _compute(self, p):
        return self.f.eval(self.active.add(p, self.b))

    def describe(self):
        return f"shift({self.f.describe()}, {self.b})"


class MulNode(LazyFunction):
    def __init__(self, f, g):
        _same_space(f, g)
        super().__init__(f.active, f.target)
        self.f, self.g = f, g

    def _compute(self, p):
        return self.target._mul(self.f.eval(p), self.g.eval(p))

    def describe(self):
        return f"({self.f.describe()} * {self.g.describe()})"


class InvNode(LazyFunction):
    def __init__(self, f):
        super().__init__(f.active, f.target)
        self.f = f

    def _compute(self, p):
        return self.target._inv(self.f.eval(p))

    def describe(self):
        return f"inv({self.f.describe()})"


class IntegralNode(LazyFunction):
    """Unique ``x`` with ``x(p)^-1 x(p + e_axis) = d(p)`` and prescribed values
    on the hyperplane ``p[axis] = 0`` (an element, or a function read there)."""

    def __init__(self, d, axis, start):
        super().__init__(d.active, d.target)
        if d.active.orders[axis] is not None:
            raise BaseFunctionError("lazy integrals run along infinite axes")
        self.d, self.axis, self.start = d, axis, start
        self._lines = {}

    def _start_at(self, q):
        if isinstance(self.start, BaseFunction):
            return self.start.eval(q)
        return self.start

    def _compute(self, p):
        a = self.axis
        n = p[a]
        q = p[:a] + (0,) + p[a + 1:]
        line = self._lines.get(q)
        if line is None:
            line = self._lines[q] = [{0: self._start_at(q)}, 0, 0]
        vals = line[0]
        G = self.target
        while n > line[2]:
            i = line[2]
            vals[i + 1] = G._mul(vals[i], self.d.eval(q[:a] + (i,) + q[a + 1:]))
            line[2] = i + 1
        while n < line[1]:
            i = line[1]
            vals[i - 1] = G._mul(vals[i], G._inv(self.d.eval(q[:a] + (i - 1,) + q[a + 1:])))
            line[1] = i - 1
        return vals[n]

    def describe(self):
        return f"integral({self.d.describe()}, axis {self.axis})"


class PowerRule(LazyFunction):
    """``p -> u^{e(p)}`` for an integer exponent rule ``e``; all values lie in ``gp(u)``."""

    def __init__(self, active, target, u, exponent, order=None, label="power"):
        super().__init__(active, target)
        self.u = target.check(u)
        self.exponent = exponent
        self.order = order
        self.label = label
        self._powers = {}

    def exponent_at(self, p):
        e = self.exponent(p)
        return e % self.order if self.order else e

    def _compute(self, p):
        e = self.exponent_at(p)
        try:
            return self._powers[e]
        except KeyError:
            v = self._powers[e] = self.target.power(self.u, e)
            return v

    def describe(self):
        return self.label


class ViewNode(LazyFunction):
    """Restriction of ``f`` along an embedding of a smaller active group."""

    def __init__(self, f, active, embed, label="view"):
        super().__init__(active, f.target)
        self.f, self.embed, self.label = f, embed, label

    def _compute(self, p):
        return self.f.eval(self.f.active.reduce(self.embed(p)))

    def describe(self):
        return f"{self.label}({self.f.describe()})"


# -- pointwise operations ------------------------------------------------

def eval(f: BaseFunction, p):  # noqa: A001 - mirrors the operation name
    return f(p)


def _is_identity_const(f):
    return isinstance(f, ConstFunction) and f.is_identity


def to_dense(f: BaseFunction, codec: FiniteCodec | None = None) -> DenseFunction:
    if isinstance(f, DenseFunction) and (codec is None or codec is f.codec):
        return f
    if isinstance(f, DenseFunction):
        codes = np.vectorize(lambda c: codec.encode(f.codec.elements[c]), otypes=[np.int32])(f.codes)
        return DenseFunction(f.active, codec, codes)
    if codec is None:
        codec = shared_codec(f.target)
    shape = f.active.shape
    if isinstance(f, ConstFunction):
        return DenseFunction(f.active, codec, np.full(shape, codec.encode(f.value), dtype=np.int32))
    if isinstance(f, SparseFunction):
        codes = np.full(shape, codec.identity_code, dtype=np.int32)
        for p, v in f.support.items():
            codes[p] = codec.encode(v)
        return DenseFunction(f.active, codec, codes)
    if isinstance(f, SlicedFunction):
        codes = np.full(shape, codec.identity_code, dtype=np.int32)
        for k, s in f.slices.items():
            codes[k] = to_dense(s, codec).codes
        return DenseFunction(f.active, codec, codes)
    codes = np.empty(shape, dtype=np.int32)
    for p in f.active.points():
        codes[p] = codec.encode(f.eval(p))
    return DenseFunction(f.active, codec, codes)


def _as3d(a):
    return a.reshape((1,) * (3 - a.ndim) + a.shape) if a.ndim <= 3 else a


def _pad3(b, ndim):
    b = tuple(b)
    return (0,) * (3 - ndim) + b


def _dense_product(f: DenseFunction, fshift, g: DenseFunction, gshift) -> DenseFunction:
    """``out(p) = f(p + fshift) g(p + gshift)``, via the selected kernels."""
    nd = f.codes.ndim
    if nd > 3:
        raise BaseFunctionError("dense kernels handle at most three axes")
    out = _kernels.shifted_product(
        f.codec.table, _as3d(f.codes), _pad3(fshift, nd), _as3d(g.codes), _pad3(gshift, nd)
    )
    return DenseFunction(f.active, f.codec, out.reshape(f.active.shape))


def pointwise_mul(f: BaseFunction, g: BaseFunction) -> BaseFunction:
    """``(fg)(x) = f(x) g(x)``."""
    _same_space(f, g)
    if _is_identity_const(f):
        return g
    if _is_identity_const(g):
        return f
    G = f.target
    if isinstance(f, ConstFunction) and isinstance(g, ConstFunction):
        return ConstFunction(f.active, G, G._mul(f.value, g.value))
    if f.active.is_finite and (isinstance(f, DenseFunction) or isinstance(g, DenseFunction)):
        codec = f.codec if isinstance(f, DenseFunction) else g.codec
        if isinstance(g, DenseFunction) and g.codec is not codec:
            codec = shared_codec(G)
        zero = f.active.identity()
        return _dense_product(to_dense(f, codec), zero, to_dense(g, codec), zero)
    if isinstance(f, SparseFunction) and isinstance(g, SparseFunction):
        e = G.identity()
        support = {}
        for p in set(f.support) | set(g.support):
            support[p] = G._mul(f.support.get(p, e), g.support.get(p, e))
        return SparseFunction(f.active, G, support)
    if f.active.orders == (None,) and _step_like(f) and _step_like(g):
        return _step_product(_as_step(f), _as_step(g))
    if isinstance(f, SlicedFunction) and isinstance(g, SlicedFunction):
        keys = set(f.slices) | set(g.slices)
        return SlicedFunction(f.active, G, {k: pointwise_mul(f.slice(k), g.slice(k)) for k in keys})
    return MulNode(f, g)


def pointwise_inv(f: BaseFunction) -> BaseFunction:
    G = f.target
    if isinstance(f, ConstFunction):
        return ConstFunction(f.active, G, G._inv(f.value))
    if isinstance(f, SparseFunction):
        return SparseFunction(f.active, G, {p: G._inv(v) for p, v in f.support.items()})
    if isinstance(f, StepFunction):
        return StepFunction(G, G._inv(f.left), f.lo, [G._inv(v) for v in f.values], G._inv(f.right))
    if isinstance(f, DenseFunction):
        return DenseFunction(f.active, f.codec, f.codec.inverse[f.codes])
    if isinstance(f, SlicedFunction):
        return SlicedFunction(f.active, G, {k: pointwise_inv(s) for k, s in f.slices.items()})
    if isinstance(f, InvNode):
        return f.f
    return InvNode(f)


def shift(f: BaseFunction, b) -> BaseFunction:
    """``f^b``: ``x -> f(x + b)``."""
    A = f.active
    b = A.reduce(tuple(b))
    if b == A.identity() or isinstance(f, ConstFunction):
        return f
    if isinstance(f, SparseFunction):
        return SparseFunction(A, f.target, {A.add(p, A.neg(b)): v for p, v in f.support.items()})
    if isinstance(f, StepFunction):
        return StepFunction(f.target, f.left, f.lo - b[0], f.values, f.right)
    if isinstance(f, DenseFunction):
        return DenseFunction(A, f.codec, np.roll(f.codes, tuple(-x for x in b), axis=tuple(range(A.rank))))
    if isinstance(f, SlicedFunction):
        sub_b = b[1:]
        return SlicedFunction(A, f.target, {k - b[0]: shift(s, sub_b) for k, s in f.slices.items()})
    if isinstance(f, ShiftNode):
        return shift(f.f, A.add(f.b, b))
    return ShiftNode(f, b)


def discrete_derivative(x: BaseFunction, axis: int = 0) -> BaseFunction:
    """``p -> x(p)^-1 x(p + e_axis)``, the base part of ``[x, b_axis]``."""
    A = x.active
    if not 0 <= axis < A.rank:
        raise BaseFunctionError(f"axis {axis} out of range for rank {A.rank}")
    if isinstance(x, ConstFunction):
        return identity_function(A, x.target)
    e = A.unit(axis)
    if isinstance(x, DenseFunction):
        inv = DenseFunction(A, x.codec, x.codec.inverse[x.codes])
        return _dense_product(inv, A.identity(), x, e)
    if isinstance(x, SlicedFunction):
        if axis == 0:
            return pointwise_mul(pointwise_inv(x), shift(x, e))
        return SlicedFunction(A, x.target, {k: discrete_derivative(s, axis - 1) for k, s in x.slices.items()})
    return pointwise_mul(pointwise_inv(x), shift(x, e))


def discrete_integral(d: BaseFunction, start, axis: int = 0) -> BaseFunction:
    """Unique ``x`` with ``discrete_derivative(x, axis) = d`` and ``x = start``
    on the hyperplane through the identity point (prefix products forward,
    inverse prefix products backward)."""
    A = d.active
    G = d.target
    if not isinstance(start, BaseFunction):
        G.check(start)
    if A.orders[axis] is not None:
        return _finite_integral(d, start, axis)
    if A.rank == 1 and not isinstance(start, BaseFunction):
        if isinstance(d, ConstFunction) and d.is_identity:
            return ConstFunction(A, G, start)
        if isinstance(d, SparseFunction):
            return _step_integral(d, start)
    return IntegralNode(d, axis, start)


def _step_integral(d: SparseFunction, start):
    G = d.target
    if not d.support:
        return ConstFunction(d.active, G, start)
    keys = [p[0] for p in d.support]
    lo, hi = min(min(keys), 0), max(max(keys) + 1, 0)
    vals = {0: start}
    for i in range(0, hi):
        vals[i + 1] = G._mul(vals[i], d.eval((i,)))
    for i in range(0, lo, -1):
        vals[i - 1] = G._mul(vals[i], G._inv(d.eval((i - 1,))))
    return StepFunction(G, vals[lo], lo, [vals[i] for i in range(lo, hi + 1)], vals[hi])


def _finite_integral(d, start, axis):
    A = d.active
    if not A.is_finite:
        raise BaseFunctionError("integral along a finite axis of a mixed active group is not supported")
    if isinstance(d, DenseFunction):
        codec = d.codec
    else:
        codec = shared_codec(d.target)
        d = to_dense(d, codec)
    codes = np.moveaxis(d.codes, axis, -1)
    shape = codes.shape
    flat = np.ascontiguousarray(codes.reshape(-1, 1, shape[-1]))
    if isinstance(start, BaseFunction):
        s = np.moveaxis(to_dense(start, codec).codes, axis, -1)[..., 0]
    else:
        s = np.full(shape[:-1], codec.encode(start), dtype=np.int32)
    s = np.ascontiguousarray(s.reshape(-1, 1), dtype=np.int32)
    x, wrap = _kernels.scan_axis(codec.table, flat, s, 2)
    if not np.array_equal(wrap, s):
        bad = int(np.flatnonzero(wrap.ravel() != s.ravel())[0])
        raise PeriodicityError(
            f"integral does not close up around the cyclic axis {axis} (order {A.orders[axis]}); "
            f"first failing line {bad}"
        )
    x = np.moveaxis(x.reshape(shape), -1, axis)
    return DenseFunction(A, codec, x)


def _step_like(f):
    return isinstance(f, (StepFunction, SparseFunction, ConstFunction))


def _as_step(f):
    if isinstance(f, StepFunction):
        return f
    e = f.target.identity()
    if isinstance(f, ConstFunction):
        return StepFunction(f.target, f.value, 0, [], f.value)
    if not f.support:
        return StepFunction(f.target, e, 0, [], e)
    keys = [p[0] for p in f.support]
    lo, hi = min(keys), max(keys) + 1
    return StepFunction(f.target, e, lo, [f.eval((i,)) for i in range(lo, hi)], e)


def _step_product(f: StepFunction, g: StepFunction):
    G = f.target
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    vals = [G._mul(f.eval((i,)), g.eval((i,))) for i in range(lo, hi)]
    return StepFunction(G, G._mul(f.left, g.left), lo, vals, G._mul(f.right, g.right))


# -- iterated integrals in exponent form ---------------------------------

def binomial(n: int, k: int) -> int:
    """``C(n, k)`` for any integer ``n`` (falling factorial over ``k!``)."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    # C(-m, k) = (-1)^k C(m + k - 1, k)
    return (-1) ** k * comb(-n + k - 1, k)


def integral_exponent(n: int, k: int) -> int:
    """Exponent of ``u^(k)`` at ``b^n``: ``sum_{j<=k} C(n, j)``.

    ``u^(0) = u`` everywhere, each ``u^(k)`` takes the value ``u`` at the
    identity point and has ``u^(k-1)`` as its derivative.
    """
    return sum(binomial(n, j) for j in range(k + 1))


def integral_exponent_array(n: int, k: int) -> np.ndarray:
    """``integral_exponent(i, k)`` for ``i = 0 .. n-1`` as Python-int objects."""
    out = np.empty(n, dtype=object)
    for i in range(n):
        out[i] = integral_exponent(i, k)
    return out


def constant(active, target, value):
    return ConstFunction(active, target, value)


def iterated_integral(G: EffectiveGroup, u, k: int, active: ActiveGroup = Z1, axis: int = 0) -> BaseFunction:
    """``u^(k)``: the ``k``-fold integral of the constant ``u`` with all start values ``u``."""
    if k < 0:
        raise BaseFunctionError("k must be nonnegative")
    G.check(u)
    if k == 0:
        return ConstFunction(active, G, u)
    if active.orders[axis] is not None:
        return _finite_power_rule(G, u, lambda p: integral_exponent(p[axis], k), active, [axis],
                                  label=f"u^({k}) along {active.names[axis]}")
    order = _finite_order_or_none(G, u)
    return PowerRule(active, G, u, lambda p: integral_exponent(p[axis], k), order,
                     label=f"{G.format(u)}^({k}) along {active.names[axis]}")


def _finite_order_or_none(G, u):
    from .errors import OrderUndetectedError

    try:
        return element_order(G, u, bound=4096)
    except OrderUndetectedError:
        return None


def _finite_power_rule(G, u, exponent, active, periodic_axes, label="power"):
    """Dense ``u^{e(p)}`` over a finite active group, checking that the exponent
    rule really is periodic modulo the order of ``u`` along ``periodic_axes``."""
    l = element_order(G, u, bound=4096)
    shape = active.shape
    exps = np.empty(shape, dtype=np.int64)
    for p in active.points():
        exps[p] = exponent(p) % l
    for axis in periodic_axes:
        n = active.orders[axis]
        for p in active.points():
            q = list(p)
            q[axis] += n
            if exponent(tuple(q)) % l != exps[p]:
                raise PeriodicityError(
                    f"{label}: exponent rule is not periodic with period {n} along axis "
                    f"{active.names[axis]} modulo the order {l} of {G.format(u)} (first failure at {p})"
                )
    codec = _codec_for(G, [u])
    codes = np.array([codec.encode(G.power(u, int(e))) for e in range(l)], dtype=np.int32)[exps]
    return DenseFunction(active, codec, codes)


def periodic_descent(d: BaseFunction, period: int, u, start, order: int | None = None) -> DenseFunction:
    """Integral of an ``r``-periodic ``d`` with values in ``gp(u)``, returned on ``Z_{l r}``.

    The integral over ``Z`` is ``l r``-periodic because the product over ``l``
    periods is ``u^{l * (period exponent sum)} = 1``; that closure is
    re-checked numerically, and so is the agreement with the integral over
    ``Z`` on ``[-l r, 2 l r)``.
    """
    G = d.target
    if d.active.orders != (None,):
        raise BaseFunctionError("periodic descent starts from a function on Z")
    l = element_order(G, u, bound=4096)
    if order is not None and order != l:
        raise BaseFunctionError(f"declared order {order} but {G.format(u)} has order {l}")
    r = int(period)
    if r < 1:
        raise BaseFunctionError("period must be positive")
    n = l * r
    powers = {G.power(u, i): i for i in range(l)}
    for i in range(-n, 2 * n):
        v = d.eval((i,))
        if v not in powers:
            raise BaseFunctionError(f"d({i}) = {G.format(v)} is outside gp({G.format(u)})")
        if d.eval((i + r,)) != v:
            raise PeriodicityError(f"d is not {r}-periodic: d({i}) != d({i + r})")
    codec = _codec_for(G, [u])
    target_axis = ActiveGroup((n,), ("b",))
    folded = DenseFunction(target_axis, codec, np.array([codec.encode(d.eval((i,))) for i in range(n)]))
    x = _finite_integral(folded, start, 0)  # raises unless the product over l periods is trivial
    over_z = discrete_integral(d, start, 0)
    for i in range(-n, 2 * n):
        if over_z.eval((i,)) != x.eval((i % n,)):
            raise PeriodicityError(f"integral over Z is not {n}-periodic at {i}")
    return x


def fold(d: BaseFunction, order: int) -> DenseFunction:
    """Restrict a function on ``Z`` to ``Z_order``, checking periodicity on a window."""
    G = d.target
    for i in range(-order, 2 * order):
        if d.eval((i,)) != d.eval((i % order,)):
            raise PeriodicityError(f"function is not {order}-periodic at {i}")
    vals = [d.eval((i,)) for i in range(order)]
    codec = _codec_for(G, vals)
    return DenseFunction(ActiveGroup((order,), ("b",)), codec, np.array([codec.encode(v) for v in vals]))


def finite_iterated_integral(G: EffectiveGroup, u, k: int, t: int) -> DenseFunction:
    """``u^(k)`` folded onto ``Z_{l^t}`` where ``l`` is the order of ``u``; needs ``k <= t``."""
    if k > t:
        raise BaseFunctionError(f"k = {k} exceeds t = {t}: period l^k need not divide l^t")
    l = element_order(G, u, bound=4096)
    active = ActiveGroup((l**t,), ("b",))
    return _finite_power_rule(G, u, lambda p: integral_exponent(p[0], k), active, [0],
                              label=f"{G.format(u)}^({k}) on Z_{l ** t}")


# -- distinguishers ------------------------------------------------------

def grid_distinguisher(G: EffectiveGroup, u, i: int, t: int, active: ActiveGroup = Z2) -> BaseFunction:
    """Function ``f_i`` on the ``(b1, b2)`` grid with ``[f_i, b2; i, b1; t-i] = u^(0)``
    and ``[f_j, b2; i, b1; t-i] = 1`` for ``j != i``.

    Its 0-row is the ``(t-i)``-th iterated integral of ``u`` along ``b1``; the
    column through ``b1^x`` is the ``i``-th iterated integral along ``b2`` of
    the constant equal to the 0-row value at ``x`` (same start value).  In
    exponents of ``u`` this is ``row(x) * col(y)`` with both factors
    binomial partial sums.
    """
    if not 1 <= i <= t:
        raise BaseFunctionError(f"distinguisher index {i} outside 1..{t}")
    if active.rank != 2:
        raise BaseFunctionError("distinguishers live on a rank-2 active group")
    G.check(u)

    def row_exponent(x):
        return integral_exponent(x, t - i)

    def exponent(p):
        # column x: i-fold integral of the constant u^row(x) with start u^row(x)
        return row_exponent(p[0]) * integral_exponent(p[1], i)

    label = f"f_{i}/{t}[{G.format(u)}]"
    if active.is_finite:
        return _finite_power_rule(G, u, exponent, active, [0, 1], label=label)
    if active.free_rank != 2:
        raise BaseFunctionError("mixed finite/infinite grids are not supported")
    return PowerRule(active, G, u, exponent, _finite_order_or_none(G, u), label=label)


def distinguisher_by_integrals(G, u, i, t, active=Z2):
    """Same function as :func:`grid_distinguisher`, assembled from lazy integral
    nodes instead of exponent arithmetic (independent route for tests)."""
    row = ConstFunction(active, G, u)
    for _ in range(t - i):
        row = IntegralNode(row, 0, u)
    # start values of each column: the 0-row value at that column
    start = ViewNode(row, active, lambda p: (p[0], 0), label="row0")
    col = start
    for _ in range(i):
        col = IntegralNode(col, 1, start)
    return col


# -- grid views ----------------------------------------------------------

def column(f: BaseFunction, i0: int) -> BaseFunction:
    """``C(i0)``: the restriction ``j -> f(b1^i0, b2^j)`` as a function on one axis."""
    A = f.active
    sub = ActiveGroup((A.orders[1],), (A.names[1],))
    if isinstance(f, DenseFunction):
        return DenseFunction(sub, f.codec, f.codes[i0 % A.orders[0], :])
    return ViewNode(f, sub, lambda p: (i0, p[0]), label=f"column {i0}")


def row(f: BaseFunction, j0: int) -> BaseFunction:
    """``R(j0)``: the restriction ``i -> f(b1^i, b2^j0)``."""
    A = f.active
    sub = ActiveGroup((A.orders[0],), (A.names[0],))
    if isinstance(f, DenseFunction):
        return DenseFunction(sub, f.codec, f.codes[:, j0 % A.orders[1]])
    return ViewNode(f, sub, lambda p: (p[0], j0), label=f"row {j0}")


# -- equality ------------------------------------------------------------

def first_difference(f: BaseFunction, g: BaseFunction, box=None):
    """First point (lexicographic over ``box``) where ``f`` and ``g`` differ, or ``None``."""
    _same_space(f, g)
    A = f.active
    box = box or A.default_box()
    if A.is_finite and isinstance(f, DenseFunction) and isinstance(g, DenseFunction) and f.codec is g.codec:
        sub = tuple(slice(lo, hi + 1) for lo, hi in box)
        diff = np.argwhere(f.codes[sub] != g.codes[sub])
        if diff.size == 0:
            return None
        return tuple(int(x) + lo for x, (lo, _) in zip(diff[0], box))
    if isinstance(f, SlicedFunction) and isinstance(g, SlicedFunction):
        lo, hi = box[0]
        keys = sorted(k for k in set(f.slices) | set(g.slices) if _in_range(k, lo, hi, A.orders[0]))
        for k in keys:
            q = first_difference(f.slice(k), g.slice(k), box[1:])
            if q is not None:
                return (k,) + q
        return None
    for p in A.box_points(box):
        p = A.reduce(p)
        if f.eval(p) != g.eval(p):
            return p
    return None


def _in_range(k, lo, hi, order):
    if order is None:
        return lo <= k <= hi
    return any((x % order) == k for x in range(lo, hi + 1))


def window_equal(f: BaseFunction, g: BaseFunction, box=None) -> bool:
    return first_difference(f, g, box) is None


def exact_equal(f: BaseFunction, g: BaseFunction) -> bool:
    """Full equality for exact representations; raises for lazy ones."""
    _same_space(f, g)
    if not (f.exact and g.exact):
        raise BaseFunctionError("exact equality needs exact representations; use window_equal")
    A = f.active
    if isinstance(f, ConstFunction) and isinstance(g, ConstFunction):
        return f.value == g.value
    if isinstance(f, SlicedFunction) or isinstance(g, SlicedFunction):
        if not (isinstance(f, DenseFunction) or isinstance(g, DenseFunction)):
            return _sliced_equal(f, g)
    if A.is_finite:
        if isinstance(f, DenseFunction) or isinstance(g, DenseFunction):
            codec = f.codec if isinstance(f, DenseFunction) else g.codec
            try:
                return np.array_equal(to_dense(f, codec).codes, to_dense(g, codec).codes)
            except GroupError:
                return False  # a value outside the codec cannot match
        return all(f.eval(p) == g.eval(p) for p in A.points())
    if isinstance(f, ConstFunction) and isinstance(g, ConstFunction):
        return f.value == g.value
    if A.orders == (None,) and _step_like(f) and _step_like(g):
        a, b = _as_step(f), _as_step(g)
        lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
        return a.left == b.left and a.right == b.right and all(
            a.eval((i,)) == b.eval((i,)) for i in range(lo, hi)
        )
    if isinstance(f, SparseFunction) and isinstance(g, SparseFunction):
        return f.support == g.support
    if isinstance(f, ConstFunction) or isinstance(g, ConstFunction):
        c, s = (f, g) if isinstance(f, ConstFunction) else (g, f)
        return c.is_identity and isinstance(s, SparseFunction) and not s.support
    raise BaseFunctionError(f"no exact comparison between {f.describe()} and {g.describe()}")


def _slice_of(f, k, sub):
    if isinstance(f, SlicedFunction):
        return f.slice(k)
    if isinstance(f, ConstFunction):
        return ConstFunction(sub, f.target, f.value)
    raise BaseFunctionError(f"no exact comparison between sliced and {f.describe()}")


def _sliced_equal(f, g):
    A = f.active
    sub = A.drop_axis(0)
    if isinstance(f, SlicedFunction) and isinstance(g, SlicedFunction):
        keys = set(f.slices) | set(g.slices)  # both trivial elsewhere
    elif A.orders[0] is not None:
        keys = range(A.orders[0])
    else:
        for h in (f, g):
            if isinstance(h, ConstFunction) and not h.is_identity:
                return False  # finitely many nontrivial slices against a nontrivial constant
        keys = set().union(*(h.slices for h in (f, g) if isinstance(h, SlicedFunction)))
    return all(exact_equal(_slice_of(f, k, sub), _slice_of(g, k, sub)) for k in keys)


def functions_equal(f, g, box=None) -> bool:
    """Exact equality when both sides allow it, window equality otherwise."""
    if f.exact and g.exact:
        return exact_equal(f, g)
    return window_equal(f, g, box)


def is_trivial(f: BaseFunction, box=None) -> bool:
    return functions_equal(f, identity_function(f.active, f.target), box)


# -- debug dump ----------------------------------------------------------

def dump(f: BaseFunction, box=None) -> str:
    """``(coordinates) -> element`` lines over ``box`` in lexicographic order."""
    A = f.active
    box = box or A.default_box()
    lines = []
    for p in A.box_points(box):
        q = A.reduce(p)
        lines.append(f"({', '.join(str(x) for x in p)}) -> {f.target.format(f.eval(q))}")
    return "\n".join(lines) + "\n"
