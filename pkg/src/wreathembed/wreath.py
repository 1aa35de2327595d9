"""Wreath products ``A Wr B`` over an abelian active group ``B``.

Elements are kept in the normal form ``b f`` (active point ``b``, base
function ``f``), and

    (b1 f1)(b2 f2) = (b1 + b2) (f1^{b2} f2),      f^b(x) = f(x + b).

In Cartesian mode any base function is allowed; direct mode insists on
finite support, which is automatic over a finite active group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import basefun as bf
from .errors import WreathError
from .groups import EffectiveGroup

CARTESIAN = "cartesian"
DIRECT = "direct"


@dataclass(frozen=True, eq=False)
class WreathElement:
    group: "WreathGroup"
    active: tuple
    base: bf.BaseFunction

    def __mul__(self, other):
        return self.group.mul(self, other)

    def __invert__(self):
        return self.group.inv(self)

    def __repr__(self):
        return f"WreathElement(active={self.active}, base={self.base.describe()})"


class WreathGroup:
    """``passive Wr active`` (Cartesian) or ``passive wr active`` (direct).

    ``box`` is the window used when two lazy base functions must be compared;
    exact representations are compared exactly regardless of the box.
    """

    def __init__(self, passive: EffectiveGroup, active: bf.ActiveGroup, mode: str = CARTESIAN, box=None):
        if mode not in (CARTESIAN, DIRECT):
            raise WreathError(f"unknown wreath mode {mode!r}")
        self.passive = passive
        self.active = active
        self.mode = mode
        self.box = tuple(box) if box is not None else active.default_box()
        self._one = bf.identity_function(active, passive)

    # -- construction ---------------------------------------------------
    def element(self, active=None, base=None) -> WreathElement:
        A = self.active
        b = A.reduce(tuple(active)) if active is not None else A.identity()
        if base is None:
            base = self._one
        if base.active != A or base.target is not self.passive:
            raise WreathError("base function does not live on this wreath product")
        if self.mode == DIRECT and not A.is_finite and not _finite_support(base):
            raise WreathError(f"direct wreath product needs finite support, got {base.describe()}")
        return WreathElement(self, b, base)

    def identity(self) -> WreathElement:
        return WreathElement(self, self.active.identity(), self._one)

    def active_element(self, axis: int, n: int = 1) -> WreathElement:
        return WreathElement(self, self.active.unit(axis, n), self._one)

    def base_element(self, f: bf.BaseFunction) -> WreathElement:
        return self.element(None, f)

    def _own(self, x):
        if not isinstance(x, WreathElement) or x.group is not self:
            raise WreathError("element belongs to a different wreath product")
        return x

    # -- arithmetic -----------------------------------------------------
    def mul(self, x: WreathElement, y: WreathElement) -> WreathElement:
        self._own(x), self._own(y)
        A = self.active
        base = bf.pointwise_mul(bf.shift(x.base, y.active), y.base)
        return WreathElement(self, A.add(x.active, y.active), base)

    def inv(self, x: WreathElement) -> WreathElement:
        self._own(x)
        A = self.active
        nb = A.neg(x.active)
        return WreathElement(self, nb, bf.shift(bf.pointwise_inv(x.base), nb))

    def eq(self, x: WreathElement, y: WreathElement, box=None) -> bool:
        self._own(x), self._own(y)
        if x.active != y.active:
            return False
        return bf.functions_equal(x.base, y.base, box or self.box)

    def first_difference(self, x, y, box=None):
        """``None`` if equal; ``("active", a, b)`` or ``("base", point)`` otherwise."""
        if x.active != y.active:
            return ("active", x.active, y.active)
        box = box or self.box
        A = self.active
        if x.base.exact and y.base.exact:
            if A.is_finite:
                box = A.default_box()
            elif bf.exact_equal(x.base, y.base):
                return None
            else:
                # exact bases differ somewhere: widen the window until it shows
                p, r = None, max(hi - lo for lo, hi in box)
                while p is None:
                    p = bf.first_difference(x.base, y.base, A.default_box(r))
                    r *= 2
                return ("base", p)
        p = bf.first_difference(x.base, y.base, box)
        return None if p is None else ("base", p)

    def is_identity(self, x, box=None) -> bool:
        return self.eq(x, self.identity(), box)

    def conjugate(self, x, y):
        """``x^y = y^-1 x y``."""
        return self.mul(self.mul(self.inv(y), x), y)

    def commutator(self, x, y):
        """``[x, y] = x^-1 y^-1 x y``."""
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))

    def iterated_commutator(self, x, y, k: int):
        if k < 1:
            raise WreathError("iterated commutators start at k = 1")
        for _ in range(k):
            x = self.commutator(x, y)
        return x

    def power(self, x, n: int):
        if n < 0:
            x, n = self.inv(x), -n
        out, base = self.identity(), x
        while n:
            if n & 1:
                out = self.mul(out, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return out

    def element_order(self, x, bound: int = 10_000) -> int:
        y, k = x, 1
        while not self.is_identity(y):
            if k >= bound:
                raise WreathError(f"order not detected within {bound} powers")
            y = self.mul(y, x)
            k += 1
        return k

    # -- projections ----------------------------------------------------
    def is_base(self, x) -> bool:
        return self._own(x).active == self.active.identity()

    def project_at_identity(self, x):
        """``h -> h(1)`` for a pure base element."""
        if not self.is_base(x):
            raise WreathError(f"projection needs a pure base element, active part is {x.active}")
        return x.base.eval(self.active.identity())

    def base_support_slices(self, x, axis: int = 0, box=None) -> set:
        """Coordinates along ``axis`` where the base is not identically trivial
        (exact for exact representations, window-bounded for lazy ones)."""
        return support_slices(x.base, axis, box or self.box)

    def dump(self, x, box=None) -> str:
        return f"active {x.active}\n" + bf.dump(x.base, box or self.box)

    @property
    def description(self) -> str:
        sym = "Wr" if self.mode == CARTESIAN else "wr"
        axes = " x ".join("Z" if o is None else f"Z_{o}" for o in self.active.orders)
        return f"G {sym} ({axes})"


def _finite_support(f) -> bool:
    if isinstance(f, bf.ConstFunction):
        return f.is_identity
    if isinstance(f, bf.SparseFunction):
        return True
    if isinstance(f, bf.StepFunction):
        e = f.target.identity()
        return f.left == e and f.right == e
    if isinstance(f, bf.SlicedFunction):
        return all(_finite_support(s) for s in f.slices.values())
    return f.active.is_finite


def support_slices(f: bf.BaseFunction, axis: int = 0, box=None) -> set:
    A = f.active
    box = box or A.default_box()
    e = f.target.identity()
    if isinstance(f, bf.ConstFunction):
        if f.is_identity:
            return set()
        lo, hi = box[axis]
        return {A.reduce(A.unit(axis, k))[axis] for k in range(lo, hi + 1)}
    if isinstance(f, bf.SparseFunction):
        return {p[axis] for p in f.support}
    if isinstance(f, bf.DenseFunction):
        other = tuple(i for i in range(A.rank) if i != axis)
        hit = np.any(f.codes != f.codec.identity_code, axis=other) if other else f.codes != f.codec.identity_code
        return {int(k) for k in np.flatnonzero(hit)}
    if isinstance(f, bf.SlicedFunction) and axis == 0:
        out = set()
        for k, s in f.slices.items():
            if s.exact:
                if not bf.exact_equal(s, bf.identity_function(s.active, s.target)):
                    out.add(k)
            elif not bf.window_equal(s, bf.identity_function(s.active, s.target), box[1:]):
                out.add(k)
        return out
    out = set()
    for p in A.box_points(box):
        q = A.reduce(p)
        if f.eval(q) != e:
            out.add(q[axis])
    return out
