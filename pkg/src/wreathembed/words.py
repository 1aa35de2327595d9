"""Formal words: flat letter words for presentations and term trees for
recovery words (commutators, conjugates, powers).

Text syntax, shared by group spec files and certificates::

    x1^2 x2^-1            juxtaposition is product, ^n is a power
    [x1, x2]              commutator g^-1 f^-1 g f
    [x1, x2; 3]           iterated commutator [[[x1, x2], x2], x2]
    x1^(x2 x3)            conjugate by a parenthesised term
    (x1 x2)^2, 1          grouping, identity
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import WreathEmbedError


class WordSyntaxError(WreathEmbedError):
    def __init__(self, message, column):
        super().__init__(f"{message} at column {column}")
        self.column = column


# -- term trees ----------------------------------------------------------

class Term:
    def __mul__(self, other):
        return Prod((self, other))

    def __pow__(self, n):
        return Pow(self, n)

    def __invert__(self):
        return Inv(self)


@dataclass(frozen=True)
class Gen(Term):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class One(Term):
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Prod(Term):
    factors: tuple

    def __str__(self):
        return " ".join(f"({f})" if isinstance(f, Prod) else str(f) for f in self.factors) or "1"


@dataclass(frozen=True)
class Inv(Term):
    arg: Term

    def __str__(self):
        return f"{_wrap(self.arg)}^-1"


@dataclass(frozen=True)
class Pow(Term):
    arg: Term
    n: int

    def __str__(self):
        return f"{_wrap(self.arg)}^{self.n}"


@dataclass(frozen=True)
class Comm(Term):
    left: Term
    right: Term
    k: int = 1

    def __str__(self):
        tail = f"; {self.k}" if self.k != 1 else ""
        return f"[{self.left}, {self.right}{tail}]"


@dataclass(frozen=True)
class Conj(Term):
    arg: Term
    by: Term

    def __str__(self):
        return f"{_wrap(self.arg)}^({self.by})"


def _wrap(t: Term) -> str:
    # operand of a postfix ^
    return f"({t})" if isinstance(t, (Prod, Pow, Inv, Conj)) else str(t)


def evaluate(term: Term, group, env: dict):
    """Evaluate ``term`` in any carrier exposing ``mul``, ``inv`` and ``identity``."""
    if isinstance(term, Gen):
        try:
            return env[term.name]
        except KeyError:
            raise WreathEmbedError(f"unknown generator {term.name!r}") from None
    if isinstance(term, One):
        return group.identity()
    if isinstance(term, Prod):
        out = group.identity()
        for f in term.factors:
            out = group.mul(out, evaluate(f, group, env))
        return out
    if isinstance(term, Inv):
        return group.inv(evaluate(term.arg, group, env))
    if isinstance(term, Pow):
        return _power(group, evaluate(term.arg, group, env), term.n)
    if isinstance(term, Comm):
        x = evaluate(term.left, group, env)
        y = evaluate(term.right, group, env)
        yi = group.inv(y)
        for _ in range(term.k):
            x = group.mul(group.mul(group.inv(x), yi), group.mul(x, y))
        return x
    if isinstance(term, Conj):
        x = evaluate(term.arg, group, env)
        y = evaluate(term.by, group, env)
        return group.mul(group.mul(group.inv(y), x), y)
    raise TypeError(f"not a term: {term!r}")


def _power(group, g, n):
    if n < 0:
        g, n = group.inv(g), -n
    out, base = group.identity(), g
    while n:
        if n & 1:
            out = group.mul(out, base)
        n >>= 1
        if n:
            base = group.mul(base, base)
    return out


def generator_names(term: Term) -> set:
    if isinstance(term, Gen):
        return {term.name}
    if isinstance(term, One):
        return set()
    if isinstance(term, Prod):
        return set().union(*(generator_names(f) for f in term.factors))
    if isinstance(term, (Inv, Pow)):
        return generator_names(term.arg)
    if isinstance(term, Comm):
        return generator_names(term.left) | generator_names(term.right)
    if isinstance(term, Conj):
        return generator_names(term.arg) | generator_names(term.by)
    raise TypeError(term)


# -- flat words ----------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """Letters ``(generator index, nonzero exponent)``, freely reduced."""

    letters: tuple = ()

    @classmethod
    def from_letters(cls, letters):
        out = []
        for gen, e in letters:
            if e == 0:
                continue
            if out and out[-1][0] == gen:
                e += out.pop()[1]
                if e == 0:
                    continue
            out.append((gen, e))
        return cls(tuple(out))

    def inverse(self):
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other):
        return Word.from_letters(self.letters + other.letters)

    def exponent_sum(self, gen: int) -> int:
        return sum(e for g, e in self.letters if g == gen)

    def to_term(self, names) -> Term:
        if not self.letters:
            return One()
        parts = [Gen(names[g]) if e == 1 else Pow(Gen(names[g]), e) for g, e in self.letters]
        return parts[0] if len(parts) == 1 else Prod(tuple(parts))

    def evaluate(self, group, images):
        out = group.identity()
        for g, e in self.letters:
            out = group.mul(out, _power(group, images[g], e))
        return out

    def format(self, names) -> str:
        return str(self.to_term(names))


def expand(term: Term, index: dict) -> Word:
    """Expand a term to a flat word over generator indices."""
    if isinstance(term, Gen):
        if term.name not in index:
            raise WreathEmbedError(f"unknown generator {term.name!r}")
        return Word(((index[term.name], 1),))
    if isinstance(term, One):
        return Word()
    if isinstance(term, Prod):
        out = Word()
        for f in term.factors:
            out = out * expand(f, index)
        return out
    if isinstance(term, Inv):
        return expand(term.arg, index).inverse()
    if isinstance(term, Pow):
        w = expand(term.arg, index)
        if term.n < 0:
            w, n = w.inverse(), -term.n
        else:
            n = term.n
        return Word.from_letters(w.letters * n)
    if isinstance(term, Comm):
        x, y = expand(term.left, index), expand(term.right, index)
        for _ in range(term.k):
            x = x.inverse() * y.inverse() * x * y
        return x
    if isinstance(term, Conj):
        x, y = expand(term.arg, index), expand(term.by, index)
        return y.inverse() * x * y
    raise TypeError(term)


@dataclass(frozen=True)
class Presentation:
    generator_count: int
    relators: tuple = ()
    names: tuple = ()

    def __post_init__(self):
        for w in self.relators:
            for g, _ in w.letters:
                if not 0 <= g < self.generator_count:
                    raise WreathEmbedError(f"relator uses generator index {g} outside 0..{self.generator_count - 1}")

    @classmethod
    def parse(cls, names, relator_texts):
        index = {n: i for i, n in enumerate(names)}
        rels = tuple(expand(parse_term(t), index) for t in relator_texts)
        return cls(len(names), rels, tuple(names))


# -- parser --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[+-]?\d+)|(?P<sym>[\[\]();,^*]))")


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", None, len(text) + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise WordSyntaxError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        factors = []
        while True:
            kind, val, _ = self.peek()
            if kind == "name" or (kind == "sym" and val in "([") or (kind == "int" and val == "1"):
                factors.append(self.factor())
            elif kind == "sym" and val == "*":
                self.take()
            else:
                break
        if not factors:
            tok = self.peek()
            raise WordSyntaxError("expected a term", tok[2])
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self):
        base = self.atom()
        while self.peek()[1] == "^":
            self.take()
            kind, val, col = self.peek()
            if kind == "int":
                self.take()
                base = Pow(base, int(val)) if int(val) != -1 else Inv(base)
            elif kind == "name" or (kind == "sym" and val in "(["):
                base = Conj(base, self.atom())
            else:
                raise WordSyntaxError("expected exponent or conjugator", col)
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "name":
            return Gen(val)
        if kind == "int" and val == "1":
            return One()
        if val == "(":
            e = self.expr()
            self.take(")")
            return e
        if val == "[":
            # [x, y], [x, y; k] and the block form [x, y; i, z; j] = [[x, y; i], z; j]
            out = self.expr()
            while True:
                self.take(",")
                right = self.expr()
                k = 1
                if self.peek()[1] == ";":
                    self.take()
                    kind, kv, kcol = self.take()
                    if kind != "int" or int(kv) < 1:
                        raise WordSyntaxError("iterated commutator count must be a positive integer", kcol)
                    k = int(kv)
                out = Comm(out, right, k)
                if self.peek()[1] != ",":
                    break
            self.take("]")
            return out
        raise WordSyntaxError(f"unexpected {val!r}", col)

    def parse(self):
        e = self.expr()
        kind, val, col = self.peek()
        if kind != "end":
            raise WordSyntaxError(f"unexpected {val!r}", col)
        return e


def parse_term(text: str) -> Term:
    return _Parser(text).parse()
