"""Exact group backends and commutator calculus.

Elements are plain hashable payloads owned by a group object:

* ``PermutationGroup``  -- tuples of 0-based images; products compose
  left to right, ``mul(g, h)`` means "apply g, then h".
* ``TableGroup``        -- integer indices into a Cayley table.
* ``MatrixGroup``       -- tuples of tuples of Python ints (arbitrary precision).
* ``CyclicGroup``       -- integer exponents of the formal generator,
  reduced modulo the order when the order is finite.

Conventions follow ``g^f = f^-1 g f`` and ``[g, f] = g^-1 f^-1 g f``, with
``[g, f; k+1] = [[g, f; k], f]``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import BackendMismatchError, OrderUndetectedError, GroupError

DEFAULT_ORDER_BOUND = 10_000


class EffectiveGroup:
    """Common interface; subclasses implement the underscore primitives."""

    backend = "abstract"
    is_finite = False
    is_abelian_backend = False

    def __init__(self, generators=(), names=None):
        gens = [self.element(g) for g in generators]
        self.generators = tuple(gens)
        if names is None:
            names = [f"x{i + 1}" for i in range(len(gens))]
        self.names = tuple(names)

    # -- to be provided by backends --------------------------------------
    def element(self, payload):
        raise NotImplementedError

    def _valid(self, g) -> bool:
        raise NotImplementedError

    def _mul(self, g, h):
        raise NotImplementedError

    def _inv(self, g):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def format(self, g) -> str:
        return repr(g)

    # -- checked arithmetic ---------------------------------------------
    def check(self, g):
        if not self._valid(g):
            raise BackendMismatchError(f"{g!r} is not an element of this {self.backend} group")
        return g

    def mul(self, g, h):
        return self._mul(self.check(g), self.check(h))

    def inv(self, g):
        return self._inv(self.check(g))

    def eq(self, g, h) -> bool:
        return self.check(g) == self.check(h)

    def is_identity(self, g) -> bool:
        return g == self.identity()

    def product(self, elements):
        out = self.identity()
        for g in elements:
            out = self._mul(out, self.check(g))
        return out

    def power(self, g, n: int):
        self.check(g)
        if n < 0:
            g, n = self._inv(g), -n
        result, base = self.identity(), g
        while n:
            if n & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            n >>= 1
        return result

    def __repr__(self):
        return f"{type(self).__name__}({len(self.generators)} generators)"


class PermutationGroup(EffectiveGroup):
    backend = "finite-permutation"
    is_finite = True

    def __init__(self, degree: int, generators=(), names=None):
        self.degree = degree
        super().__init__(generators, names)

    def element(self, payload):
        if isinstance(payload, str):
            return parse_cycles(payload, self.degree)
        perm = tuple(int(i) for i in payload)
        if sorted(perm) != list(range(self.degree)):
            raise GroupError(f"not a permutation of degree {self.degree}: {payload!r}")
        return perm

    def _valid(self, g):
        return isinstance(g, tuple) and len(g) == self.degree

    def _mul(self, g, h):
        # apply g first, then h
        return tuple(h[i] for i in g)

    def _inv(self, g):
        out = [0] * len(g)
        for i, j in enumerate(g):
            out[j] = i
        return tuple(out)

    def identity(self):
        return tuple(range(self.degree))

    def format(self, g):
        return format_cycles(g)


class TableGroup(EffectiveGroup):
    backend = "finite-table"
    is_finite = True

    def __init__(self, table, generators=(), names=None, labels=None):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(self.table)
        if any(len(row) != n for row in self.table):
            raise GroupError("multiplication table must be square")
        self.order = n
        ident = [e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))]
        if not ident:
            raise GroupError("multiplication table has no identity")
        self._identity = ident[0]
        self._inverse = []
        for x in range(n):
            inv = [y for y in range(n) if self.table[x][y] == self._identity]
            if len(inv) != 1:
                raise GroupError(f"element {x} has no unique inverse")
            self._inverse.append(inv[0])
        self.labels = tuple(labels) if labels else None
        super().__init__(generators, names)

    def element(self, payload):
        if isinstance(payload, str) and self.labels and payload in self.labels:
            return self.labels.index(payload)
        g = int(payload)
        if not 0 <= g < self.order:
            raise GroupError(f"table index {g} out of range")
        return g

    def _valid(self, g):
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < self.order

    def _mul(self, g, h):
        return self.table[g][h]

    def _inv(self, g):
        return self._inverse[g]

    def identity(self):
        return self._identity

    def format(self, g):
        return self.labels[g] if self.labels else f"e{g}"


class MatrixGroup(EffectiveGroup):
    backend = "integer-matrix"

    def __init__(self, dimension: int, generators=(), names=None):
        self.dimension = dimension
        super().__init__(generators, names)

    def element(self, payload):
        rows = tuple(tuple(int(x) for x in row) for row in payload)
        if len(rows) != self.dimension or any(len(r) != self.dimension for r in rows):
            raise GroupError(f"expected a {self.dimension}x{self.dimension} integer matrix")
        if abs(determinant(rows)) != 1:
            raise GroupError("integer matrix is not invertible over Z (det != +-1)")
        return rows

    def _valid(self, g):
        return isinstance(g, tuple) and len(g) == self.dimension and all(
            isinstance(r, tuple) and len(r) == self.dimension for r in g
        )

    def _mul(self, g, h):
        n = self.dimension
        cols = list(zip(*h))
        return tuple(tuple(sum(g[i][k] * cols[j][k] for k in range(n)) for j in range(n)) for i in range(n))

    def _inv(self, g):
        return integer_inverse(g)

    def identity(self):
        n = self.dimension
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    def format(self, g):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in g) + "]"


class CyclicGroup(EffectiveGroup):
    """Formal cyclic group ``<u>`` of the given order (``None`` means infinite)."""

    backend = "formal-cyclic"
    is_abelian_backend = True

    def __init__(self, order: int | None = None, generators=(1,), names=None):
        if order is not None and order < 1:
            raise GroupError("cyclic order must be positive")
        self.order = order
        self.is_finite = order is not None
        super().__init__(generators, names or ["u"][: len(generators)] or None)

    def element(self, payload):
        e = int(payload)
        return e % self.order if self.order else e

    def _valid(self, g):
        if not isinstance(g, int) or isinstance(g, bool):
            return False
        return self.order is None or 0 <= g < self.order

    def _mul(self, g, h):
        return (g + h) % self.order if self.order else g + h

    def _inv(self, g):
        return (-g) % self.order if self.order else -g

    def identity(self):
        return 0

    def power(self, g, n):
        self.check(g)
        return self.element(g * n)

    def format(self, g):
        return "1" if g == 0 else ("u" if g == 1 else f"u^{g}")


# -- commutator calculus -------------------------------------------------

def conjugate(G: EffectiveGroup, g, f):
    """``g^f = f^-1 g f``."""
    return G.mul(G.mul(G.inv(f), g), f)


def commutator(G: EffectiveGroup, g, f):
    """``[g, f] = g^-1 f^-1 g f``."""
    return G.mul(G.mul(G.inv(g), G.inv(f)), G.mul(g, f))


def iterated_commutator(G: EffectiveGroup, g, f, k: int):
    if k < 1:
        raise ValueError("iterated commutators start at k = 1")
    x = g
    for _ in range(k):
        x = commutator(G, x, f)
    return x


def element_order(G: EffectiveGroup, g, bound: int = DEFAULT_ORDER_BOUND) -> int:
    G.check(g)
    if isinstance(G, CyclicGroup):
        if G.order is None:
            if g == 0:
                return 1
            raise OrderUndetectedError(f"{G.format(g)} has infinite order")
        return G.order // gcd(G.order, g)
    ident = G.identity()
    x, k = g, 1
    while x != ident:
        if k >= bound:
            raise OrderUndetectedError(f"order of {G.format(g)} not detected within {bound} powers")
        x = G._mul(x, g)
        k += 1
    return k


# -- cycle notation ------------------------------------------------------

def parse_cycles(text: str, degree: int) -> tuple:
    """``"(1 2)(3 4 5)"`` (1-based) -> image tuple (0-based)."""
    perm = list(range(degree))
    text = text.strip()
    if text in ("", "()", "1", "e"):
        return tuple(perm)
    seen = set()
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if text[pos] != "(":
            raise GroupError(f"bad cycle notation at column {pos + 1}: {text!r}")
        end = text.find(")", pos)
        if end < 0:
            raise GroupError(f"unclosed cycle at column {pos + 1}: {text!r}")
        points = [int(p) - 1 for p in text[pos + 1:end].replace(",", " ").split()]
        for p in points:
            if not 0 <= p < degree or p in seen:
                raise GroupError(f"bad point {p + 1} in {text!r}")
            seen.add(p)
        for a, b in zip(points, points[1:] + points[:1]):
            perm[a] = b
        pos = end + 1
    return tuple(perm)


def format_cycles(perm) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(x + 1)
            x = perm[x]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


# -- exact integer linear algebra -----------------------------------------

def determinant(m) -> int:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(det)


@lru_cache(maxsize=4096)
def integer_inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    inv = [row[n:] for row in a]
    if any(x.denominator != 1 for row in inv for x in row):
        raise GroupError("matrix inverse is not integral")
    return tuple(tuple(int(x) for x in row) for row in inv)
