"""Group spec files (YAML) and a small catalogue of named groups.

A spec file describes one group::

    name: S3
    backend: permutation        # permutation | table | matrix | cyclic
    degree: 3
    generators:
      s: "(1 2)"
      r: "(1 2 3)"
    presentation: ["s^2", "r^3", "(s r)^2"]

Matrix groups give ``dimension`` and row-major integer matrices; table groups
give ``table`` (and optional ``labels``) with generators as table indices;
cyclic groups give ``order`` (an integer or ``infinite``).  Infinite groups
declare what cannot be computed::

    derived_length: 2
    abelianization:
      free: [x, y]                  # words for a free abelian basis
      torsion: [[u, 2]]             # [word, order] pairs
      decompose:                    # per generator
        z: {free: [0, 0], commutators: [[x, y]]}

Errors carry the line and column of the offending node.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import yaml

from .embedder import GeneratorDecomposition, GroupData
from .errors import SpecFileError, WreathEmbedError
from .finite import DEFAULT_CLOSURE_BOUND
from .groups import CyclicGroup, EffectiveGroup, MatrixGroup, PermutationGroup, TableGroup
from .words import Presentation, WordSyntaxError, evaluate, parse_term

BACKENDS = {"permutation", "table", "matrix", "cyclic"}


# -- node helpers ----------------------------------------------------------

def _where(node):
    m = node.start_mark
    return m.line + 1, m.column + 1


def _fail(node, message):
    raise SpecFileError(message, *_where(node))


def _mapping(node, what):
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    out = {}
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            _fail(k, f"keys of {what} must be plain names")
        if k.value in out:
            _fail(k, f"duplicate key {k.value!r} in {what}")
        out[k.value] = (k, v)
    return out


def _seq(node, what):
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what} must be a list")
    return node.value


def _plain(node):
    """Python value of a node (no tags beyond the standard scalars)."""
    return yaml.safe_load(yaml.serialize(node))


def _int(node, what, minimum=None):
    v = _plain(node)
    if not isinstance(v, int) or isinstance(v, bool):
        _fail(node, f"{what} must be an integer")
    if minimum is not None and v < minimum:
        _fail(node, f"{what} must be at least {minimum}")
    return v


def _text(node, what):
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, f"{what} must be a string")
    return str(node.value)


def _term(node, what, G, env):
    text = _text(node, what)
    try:
        term = parse_term(text)
    except WordSyntaxError as exc:
        line, col = _where(node)
        raise SpecFileError(f"{what}: {exc}", line, col + exc.column - 1) from None
    try:
        return evaluate(term, G, env)
    except WreathEmbedError as exc:
        _fail(node, f"{what}: {exc}")


# -- parsing ---------------------------------------------------------------

def parse_spec(text: str, source: str = "<string>", bound: int = DEFAULT_CLOSURE_BOUND) -> GroupData:
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise SpecFileError(f"{source}: {exc.problem or exc}", line, col) from None
    if root is None:
        raise SpecFileError(f"{source}: empty group spec", 1, 1)
    top = _mapping(root, "group spec")
    known = {"name", "backend", "degree", "dimension", "order", "table", "labels", "generators",
             "presentation", "abelianization", "derived_length"}
    for key, (knode, _) in top.items():
        if key not in known:
            _fail(knode, f"unknown field {key!r}")
    if "backend" not in top:
        _fail(root, "missing field 'backend'")
    bnode = top["backend"][1]
    backend = _text(bnode, "backend")
    if backend not in BACKENDS:
        _fail(bnode, f"unknown backend {backend!r}; expected one of {', '.join(sorted(BACKENDS))}")
    name = _text(top["name"][1], "name") if "name" in top else Path(source).stem

    G = _build_group(backend, top, root)
    env = dict(zip(G.names, G.generators))

    presentation = None
    if "presentation" in top:
        rels = _seq(top["presentation"][1], "presentation")
        texts = []
        for r in rels:
            _term(r, "relator", G, env)  # syntax and names
            texts.append(_text(r, "relator"))
        presentation = Presentation.parse(G.names, texts)

    dl = None
    if "derived_length" in top:
        dl = _int(top["derived_length"][1], "derived_length", 0)

    fp = hashlib.sha256(text.encode()).hexdigest()
    if G.is_finite:
        data = GroupData.from_finite(G, name, presentation, bound)
        data.fingerprint = fp
        if "abelianization" in top:
            _check_declared_finite(top["abelianization"][1], G, env, data)
        if dl is not None and dl != data.derived_length:
            _fail(top["derived_length"][1], f"declared derived length {dl}, computed {data.derived_length}")
        return data

    if "abelianization" not in top:
        _fail(root, "infinite groups must declare their abelianization (free, torsion, decompose)")
    free, torsion, decs = _abelianization(top["abelianization"][1], G, env)
    data = GroupData(G, presentation, tuple(free), tuple(torsion), tuple(decs), dl, name, fp)
    try:
        data.check_decompositions()
    except WreathEmbedError as exc:
        _fail(top["abelianization"][1], str(exc))
    return data


def _build_group(backend, top, root) -> EffectiveGroup:
    if "generators" not in top:
        _fail(root, "missing field 'generators'")
    gnode = top["generators"][1]
    gens = _mapping(gnode, "generators")
    names = list(gens)

    def need(key):
        if key not in top:
            _fail(root, f"backend {backend!r} needs field {key!r}")
        return top[key][1]

    payloads = []
    try:
        if backend == "permutation":
            degree = _int(need("degree"), "degree", 1)
            for n, (_, v) in gens.items():
                payloads.append(_plain(v))
            for (n, (_, v)), p in zip(gens.items(), payloads):
                try:
                    PermutationGroup(degree, [p])
                except WreathEmbedError as exc:
                    _fail(v, f"generator {n}: {exc}")
            return PermutationGroup(degree, payloads, names)
        if backend == "matrix":
            dim = _int(need("dimension"), "dimension", 1)
            for n, (_, v) in gens.items():
                try:
                    MatrixGroup(dim, [_plain(v)])
                except (WreathEmbedError, TypeError, ValueError) as exc:
                    _fail(v, f"generator {n}: {exc}")
                payloads.append(_plain(v))
            return MatrixGroup(dim, payloads, names)
        if backend == "table":
            tnode = need("table")
            table = _plain(tnode)
            labels = _plain(top["labels"][1]) if "labels" in top else None
            try:
                base = TableGroup(table, [], labels=labels)
            except (WreathEmbedError, TypeError, ValueError) as exc:
                _fail(tnode, f"table: {exc}")
            for n, (_, v) in gens.items():
                try:
                    payloads.append(base.element(_plain(v)))
                except (WreathEmbedError, TypeError, ValueError) as exc:
                    _fail(v, f"generator {n}: {exc}")
            return TableGroup(table, payloads, names, labels)
        onode = need("order")
        order = _plain(onode)
        if order in ("infinite", "inf", None):
            order = None
        elif not isinstance(order, int) or order < 1:
            _fail(onode, "order must be a positive integer or 'infinite'")
        for n, (_, v) in gens.items():
            payloads.append(_int(v, f"generator {n}"))
        return CyclicGroup(order, payloads, names)
    except SpecFileError:
        raise
    except WreathEmbedError as exc:
        _fail(gnode, str(exc))


def _abelianization(node, G, env):
    ab = _mapping(node, "abelianization")
    free = [_term(v, "free basis word", G, env) for v in _seq(ab["free"][1], "free")] if "free" in ab else []
    torsion = []
    for item in _seq(ab["torsion"][1], "torsion") if "torsion" in ab else []:
        pair = _seq(item, "torsion entry")
        if len(pair) != 2:
            _fail(item, "torsion entries are [word, order]")
        u = _term(pair[0], "torsion word", G, env)
        torsion.append((u, _int(pair[1], "torsion order", 1)))
    if "decompose" not in ab:
        _fail(node, "abelianization needs a 'decompose' entry for each generator")
    dnode = ab["decompose"][1]
    dmap = _mapping(dnode, "decompose")
    decs = []
    for n in G.names:
        if n not in dmap:
            _fail(dnode, f"no decomposition for generator {n!r}")
        entry = _mapping(dmap[n][1], f"decomposition of {n}")
        fr = tuple(_int(x, "free exponent") for x in _seq(entry["free"][1], "free")) if "free" in entry else ()
        to = tuple(_int(x, "torsion exponent") for x in _seq(entry["torsion"][1], "torsion")) if "torsion" in entry else ()
        comms = []
        for c in _seq(entry["commutators"][1], "commutators") if "commutators" in entry else []:
            pair = _seq(c, "commutator")
            if len(pair) != 2:
                _fail(c, "commutators are [word, word] pairs")
            comms.append((_term(pair[0], "commutator word", G, env), _term(pair[1], "commutator word", G, env)))
        decs.append(GeneratorDecomposition(fr, to, tuple(comms)))
    return free, torsion, decs


def _check_declared_finite(node, G, env, data):
    """A declared abelianization of a finite group must match the computed torsion orders."""
    ab = _mapping(node, "abelianization")
    if "free" in ab and _seq(ab["free"][1], "free"):
        _fail(ab["free"][1], "a finite group has no free abelian part")
    declared = []
    for item in _seq(ab["torsion"][1], "torsion") if "torsion" in ab else []:
        pair = _seq(item, "torsion entry")
        if len(pair) != 2:
            _fail(item, "torsion entries are [word, order]")
        _term(pair[0], "torsion word", G, env)
        declared.append(_int(pair[1], "torsion order", 1))
    declared = sorted(l for l in declared if l > 1)
    computed = sorted(l for _, l in data.torsion if l > 1)
    if declared != computed:
        _fail(node, f"declared torsion orders {declared} differ from computed {computed}")


def load_spec(path, bound: int = DEFAULT_CLOSURE_BOUND) -> GroupData:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text, str(path), bound)


# -- named groups ------------------------------------------------------------

def symmetric_group(n: int) -> PermutationGroup:
    if n < 2:
        return PermutationGroup(max(n, 1), [], [])
    if n == 2:
        return PermutationGroup(2, ["(1 2)"], ["s"])
    return PermutationGroup(n, ["(1 2)", "(" + " ".join(map(str, range(1, n + 1))) + ")"], ["s", "r"])


def dihedral_group(n: int) -> PermutationGroup:
    """Symmetries of an ``n``-gon (order ``2n``)."""
    rot = "(" + " ".join(map(str, range(1, n + 1))) + ")"
    refl = "".join(f"({i} {n + 2 - i})" for i in range(2, n + 1) if i < n + 2 - i)
    return PermutationGroup(n, [rot, refl or "()"], ["r", "f"])


def quaternion_group() -> PermutationGroup:
    # regular representation on {1, -1, i, -i, j, -j, k, -k}
    return PermutationGroup(8, ["(1 3 2 4)(5 8 6 7)", "(1 5 2 6)(3 7 4 8)"], ["i", "j"])


def _matrix(*rows):
    return tuple(tuple(r) for r in rows)


def heisenberg() -> GroupData:
    x = _matrix((1, 1, 0), (0, 1, 0), (0, 0, 1))
    y = _matrix((1, 0, 0), (0, 1, 1), (0, 0, 1))
    z = _matrix((1, 0, 1), (0, 1, 0), (0, 0, 1))
    G = MatrixGroup(3, [x, y, z], ["x", "y", "z"])
    P = Presentation.parse(G.names, ["[x, y] z^-1", "[x, z]", "[y, z]"])
    decs = (GeneratorDecomposition((1, 0)), GeneratorDecomposition((0, 1)),
            GeneratorDecomposition((0, 0), (), ((x, y),)))
    return GroupData(G, P, (x, y), (), decs, 2, "Heisenberg")


def z_times_z2() -> GroupData:
    a = _matrix((1, 1, 0), (0, 1, 0), (0, 0, 1))
    u = _matrix((1, 0, 0), (0, 1, 0), (0, 0, -1))
    G = MatrixGroup(3, [a, u], ["a", "u"])
    P = Presentation.parse(G.names, ["u^2", "[a, u]"])
    decs = (GeneratorDecomposition((1,), (0,)), GeneratorDecomposition((0,), (1,)))
    return GroupData(G, P, (a,), ((u, 2),), decs, 1, "ZxZ2")


def infinite_cyclic() -> GroupData:
    G = CyclicGroup(None, [1], ["a"])
    return GroupData(G, Presentation(1, (), ("a",)), (1,), (), (GeneratorDecomposition((1,)),), 1, "Z")


def _finite(G, name, bound=DEFAULT_CLOSURE_BOUND):
    return GroupData.from_finite(G, name, bound=bound)


def named_group(name: str, bound: int = DEFAULT_CLOSURE_BOUND) -> GroupData:
    """``trivial``, ``Zn``, ``Z``, ``Z2xZ2``, ``Sn``, ``Dn``, ``Q8``, ``Heisenberg``, ``ZxZ2``."""
    key = name.strip()
    low = key.lower()
    if low == "trivial":
        return _finite(PermutationGroup(1, [], []), "trivial", bound)
    if low == "z":
        return infinite_cyclic()
    if low in ("heisenberg", "h3"):
        return heisenberg()
    if low in ("zxz2", "z*z2"):
        return z_times_z2()
    if low == "q8":
        return _finite(quaternion_group(), "Q8", bound)
    if low == "z2xz2":
        return _finite(PermutationGroup(4, ["(1 2)", "(3 4)"], ["u", "v"]), "Z2xZ2", bound)
    if len(low) > 1 and low[0] in "zsd" and low[1:].isdigit():
        n = int(low[1:])
        if low[0] == "z":
            return _finite(CyclicGroup(n, [1], ["u"]), key, bound)
        if low[0] == "s":
            return _finite(symmetric_group(n), key, bound)
        return _finite(dihedral_group(n), key, bound)
    raise SpecFileError(f"unknown group name {name!r}")


def load_group(ref: str, bound: int = DEFAULT_CLOSURE_BOUND) -> GroupData:
    """A spec file path, or a catalogue name when no such file exists."""
    p = Path(ref)
    if p.exists():
        return load_spec(p, bound)
    try:
        return named_group(ref, bound)
    except SpecFileError:
        raise SpecFileError(f"{ref!r} is neither a readable spec file nor a known group name") from None
