"""Strictly uneven sparse sequences and support layouts.

A sequence ``s_1 < s_2 < ...`` is strictly uneven when a difference
``s_{i+j} - s_j`` (with ``i >= 1``) determines the index pair ``(i, j)``;
in other words all differences of a later term minus an earlier term are
distinct.  With a modulus the differences are compared modulo it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapacityError, SequenceError


@dataclass(frozen=True)
class SparseSequence:
    terms: tuple
    modulus: int | None = None

    def __post_init__(self):
        if not self.terms:
            raise SequenceError("empty sequence")
        if any(b <= a for a, b in zip(self.terms, self.terms[1:])) or self.terms[0] < 1:
            raise SequenceError(f"terms must be strictly increasing positive integers: {self.terms}")

    def __len__(self):
        return len(self.terms)

    def term(self, index: int) -> int:
        """1-based access, matching ``s_1, s_2, ...``."""
        return self.terms[index - 1]

    def residue(self, index: int) -> int:
        s = self.term(index)
        return s % self.modulus if self.modulus else s


@dataclass(frozen=True)
class UnevenResult:
    uneven: bool
    witness: tuple | None = None  # (i, j, k, l), 1-based, when not uneven

    def __bool__(self):
        return self.uneven


def is_strictly_uneven(seq, modulus: int | None = None) -> UnevenResult:
    """Exhaustive check of ``s_{i+j} - s_j = s_{k+l} - s_l  =>  i = k, j = l``.

    Brute force over index quadruples; returns the first violating
    quadruple ``(i, j, k, l)`` in lexicographic order.
    """
    terms = tuple(seq.terms if isinstance(seq, SparseSequence) else seq)
    if not terms:
        raise SequenceError("empty sequence")
    if any(b <= a for a, b in zip(terms, terms[1:])):
        raise SequenceError(f"sequence must be strictly increasing: {terms}")
    if modulus is not None and modulus < 1:
        raise SequenceError("modulus must be positive")
    n = len(terms)
    s = (None,) + terms  # 1-based

    def diff(i, j):
        d = s[i + j] - s[j]
        return d % modulus if modulus else d

    pairs = [(i, j) for j in range(1, n + 1) for i in range(1, n - j + 1)]
    pairs.sort()
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs:
            if (k, l) != (i, j) and diff(i, j) == diff(k, l):
                return UnevenResult(False, (i, j, k, l))
    return UnevenResult(True)


def powers_of_two(n: int) -> SparseSequence:
    """``(2, 4, ..., 2^n)``."""
    if n < 1:
        raise SequenceError("need at least one term")
    seq = SparseSequence(tuple(2**i for i in range(1, n + 1)))
    result = is_strictly_uneven(seq)
    if not result:
        raise SequenceError(f"powers of two failed the unevenness check at {result.witness}")
    return seq


def arithmetic_progression(n: int, start: int = 1, step: int = 1) -> SparseSequence:
    """Deliberately *not* uneven for ``n >= 3``; used as a negative control."""
    return SparseSequence(tuple(start + step * i for i in range(n)))


@dataclass(frozen=True)
class SupportAssignment:
    """Injective map from named index classes onto consecutive sequence indices.

    ``classes`` maps a class name (``"A"``, ``"U"``, ``"V"`` for the
    two-generator layout; ``"F"``, ``"I"``, ``"M"`` for the four-generator
    layout) to the tuple of 1-based sequence indices assigned to its members,
    in member order.
    """

    sequence: SparseSequence
    classes: dict = field(default_factory=dict)

    def indices(self, name):
        return self.classes.get(name, ())

    def slot(self, name, member: int) -> int:
        """Sequence term (the exponent of ``c``) of a class member (0-based member)."""
        return self.sequence.term(self.classes[name][member])

    def slots(self, name):
        return tuple(self.sequence.term(i) for i in self.indices(name))

    @property
    def all_indices(self):
        return tuple(i for idx in self.classes.values() for i in idx)

    @property
    def total(self):
        return len(self.all_indices)


def plan_supports(counts: dict, sequence: SparseSequence | None = None,
                  modulus: int | None = None) -> SupportAssignment:
    """Assign consecutive indices ``1..N`` to the classes in the order given.

    With a ``modulus`` (cyclic c-axis) the assigned terms must stay pairwise
    distinct and uneven modulo it; otherwise a :class:`CapacityError` names
    the smallest modulus that would work.
    """
    total = sum(counts.values())
    if any(v < 0 for v in counts.values()):
        raise SequenceError("class sizes must be nonnegative")
    if sequence is None:
        sequence = powers_of_two(max(total, 1))
    if len(sequence) < total:
        raise SequenceError(f"sequence has {len(sequence)} terms, layout needs {total}")
    classes, nxt = {}, 1
    for name, size in counts.items():
        classes[name] = tuple(range(nxt, nxt + size))
        nxt += size
    used = SparseSequence(sequence.terms[:total], modulus) if total else None
    if modulus is not None and used is not None:
        problem = modular_layout_problem(used.terms, modulus)
        if problem:
            suggestion = smallest_admissible_modulus(used.terms, modulus)
            hint = (f"smallest admissible cyclic order is {suggestion}" if suggestion
                    else "the terms are not uneven under any modulus")
            raise CapacityError(
                f"support layout {used.terms} does not fit modulo {modulus}: {problem}; {hint}",
                suggested_modulus=suggestion,
            )
    return SupportAssignment(SparseSequence(sequence.terms, modulus), classes)


def modular_layout_problem(terms, modulus):
    residues = [t % modulus for t in terms]
    if len(set(residues)) != len(residues):
        a = next(i for i, r in enumerate(residues) if residues.index(r) != i)
        b = residues.index(residues[a])
        return f"terms s_{b + 1} = {terms[b]} and s_{a + 1} = {terms[a]} collide (both = {residues[a]} mod {modulus})"
    result = is_strictly_uneven(terms, modulus)
    if not result:
        i, j, k, l = result.witness
        return f"s_{i + j} - s_{j} = s_{k + l} - s_{l} mod {modulus}"
    return None


def smallest_admissible_modulus(terms, start: int = 1) -> int | None:
    """Least modulus ``>= start`` under which ``terms`` stay distinct and uneven.

    ``None`` when the terms are not uneven over the integers: equal
    differences stay equal under every modulus.  Otherwise any modulus
    above the largest term works, which bounds the search.
    """
    terms = tuple(terms)
    if not is_strictly_uneven(terms):
        return None
    m = max(start, 1)
    while modular_layout_problem(terms, m):
        m += 1
    return m
